#pragma once

#include <cstdint>
#include <vector>

#include "mayerkit/errors.hpp"

namespace mayerkit::oracles {

// Hard rods with exclusion distance sigma on [0, L]: the grand-canonical
// normalization is the finite polynomial sum_n z^n (L - (n-1) sigma)_+^n / n!,
// evaluated exactly (every term with n - 1 >= L / sigma vanishes).
double tonks_log_xi(double z, double sigma, double L);

// closed n-fold configuration integral of the same model:
// int_{[0,L]^n} prod 1{|x_i - x_j| > sigma} = (L - (n-1) sigma)_+^n.
double tonks_config_integral(int n, double sigma, double L);

// int over ([0,L]^2)^2 of 1{|x - y| <= r}, r <= L:
// pi r^2 L^2 - (8/3) r^3 L + r^4 / 2.
double square_overlap_integral(double L, double r);

// int over [0,L]^2 of 1{|x - y| <= s}, s <= L: 2 s L - s^2.
double segment_overlap_integral(double L, double s);

double factorial(int n);
double binomial(int n, int k);
double stirling2(int n, int k);
std::uint64_t bell_number(int s);

// E[N^j] for N ~ Poisson(lambda): sum_k S(j,k) lambda^k.
double poisson_moment(double lambda, int j);

// Raw moments m_1..m_n from cumulants k_1..k_n by summing over set
// partitions (products of k_{block size}).
std::vector<double> moments_from_cumulants(const std::vector<double>& kappa);

// Inverse map via the recursion
//  k_n = m_n - sum_{j=1}^{n-1} C(n-1, j-1) k_j m_{n-j}.
std::vector<double> cumulants_from_moments(const std::vector<double>& moments);

// Cumulants k_1..k_m of X = N (N - 1) with N ~ Poisson(lambda), from the
// exact Poisson moment algebra.
std::vector<double> pair_count_cumulants(double lambda, int m);

// Partial sums of exp: B_0..B_n with B_k = sum over partitions of {1..k} of
// prod A_{block size} (complete Bell polynomials), via the binomial
// recursion.  Input A is 1-based conceptually: A[0] = A_1.
std::vector<double> complete_bell(const std::vector<double>& a);

// Regularized lower incomplete gamma P(s, x); used for chi-square p-values:
// P_chi2(stat <= x | k dof) = gamma_p(k/2, x/2).
double gamma_p(double s, double x);

}  // namespace mayerkit::oracles
