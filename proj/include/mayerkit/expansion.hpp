#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "mayerkit/model.hpp"
#include "mayerkit/quad.hpp"

namespace mayerkit::expansion {

using model::Activity;
using model::PairPotential;
using model::Point;

// Exponential-slack witness (a, t) taken from a convergence certificate;
// t > 0 buys geometric bounds on truncated series tails.
struct TailWitness {
  double a = 0.0;
  double t = 0.0;
};

enum class Quantity { log_xi, rho, rho_truncated, log_laplace, janossy };

struct OrderTerm {
  int order = 0;
  quad::McEstimate estimate;
};

// Order-by-order series summary.  Per-order estimates use disjoint RNG
// streams (plan.stream + order), so std_error combines in quadrature.
struct ExpansionReport {
  Quantity quantity = Quantity::log_xi;
  std::vector<OrderTerm> orders;  // contiguous from the minimal order
  int truncation_order = 0;
  double partial_sum = 0.0;
  double std_error = 0.0;
  std::optional<double> tail_bound;  // set only under a t > 0 witness
};

// log Xi = sum_n (1/n!) int (connected-graph sum) dlambda_z^n up to order N.
// Order 1 is the exact activity mass.  1 <= N <= 7.
ExpansionReport log_partition_expansion(
    const PairPotential& pot, const Activity& act, int N,
    const quad::McPlan& plan,
    std::optional<TailWitness> witness = std::nullopt);

// Xi from its defining series 1 + sum_n (1/n!) int e^{-H_n} dlambda_z^n,
// truncated at nmax.  Throws tail_too_large_error (with the nmax that would
// suffice) when the Poisson envelope sum_{n > nmax} mass^n/n! exceeds
// plan.tol; e^{-H} <= 1 justifies the envelope.
quad::McEstimate xi_bruteforce(const PairPotential& pot, const Activity& act,
                               int nmax, const quad::McPlan& plan);

// Finite-volume reference evaluator.  One Xi estimate is frozen at
// construction and shared by every density call, so ratios of values from
// the same oracle cancel the common normalization error.  Density calls are
// deterministic (internal call counter selects disjoint streams) but not
// safe to issue concurrently.
class BruteForceOracle {
 public:
  // inner_samples = 0 means plan.samples for the per-call integrals.
  BruteForceOracle(const PairPotential& pot, const Activity& act, int nmax,
                   const quad::McPlan& plan, std::uint64_t inner_samples = 0);

  const quad::McEstimate& xi() const { return xi_; }

  // rho_n(pts) = prod_i z(x_i) * (1/Xi) * sum_j (1/j!) int e^{-H(pts, w)}
  // dlambda_z^j(w), truncated so pts plus integration points stay <= nmax.
  // Exact 0 (no sampling) when pts contains a hard-core overlap.
  quad::McEstimate rho(std::span<const Point> pts) const;

 private:
  PairPotential pot_;
  Activity act_;
  int nmax_;
  quad::McPlan plan_;
  std::uint64_t inner_samples_;
  quad::McEstimate xi_;
  mutable std::uint64_t calls_ = 0;
};

// One-shot convenience around BruteForceOracle.
quad::McEstimate rho_bruteforce(const PairPotential& pot, const Activity& act,
                                std::span<const Point> pts, int nmax,
                                const quad::McPlan& plan);

// rho_k(pts) ~= prod z(x_i) * [psi_{k,k}(pts) + sum_{m=1}^{N} (1/m!) int
// psi_{k,k+m}(pts, y) dlambda_z^m(y)].  Order 0 is exact; hard-core overlap
// among pts short-circuits to an exact all-zero report.  k + N <= 7.
ExpansionReport correlation_expansion(const PairPotential& pot,
                                      const Activity& act,
                                      std::span<const Point> pts, int N,
                                      const quad::McPlan& plan);

// Same shape for the factorial cumulant densities: connected-graph kernels
// instead of multirooted ones.
ExpansionReport truncated_expansion(const PairPotential& pot,
                                    const Activity& act,
                                    std::span<const Point> pts, int N,
                                    const quad::McPlan& plan);

// Correlation values for every nonempty sub-tuple of an n-tuple, keyed by
// position bitmask (bit i = point i present).
using RhoTable = std::unordered_map<std::uint32_t, double>;

// Recursive partition inversion: rho^T(S) = rho(S) - sum over partitions of
// S into >= 2 blocks of prod rho^T(block).  Missing sub-tuple entries are a
// contract violation.
double truncated_from_correlations(const RhoTable& rho, int n);

// sum_n (1/n!) int (e^{-sum_j h(x_j)} - 1) * (connected-graph sum)
// dlambda_z^n.  h is range-checked on sampled points: h >= -t under the
// witness (h >= 0 without one).
ExpansionReport log_laplace_expansion(
    const PairPotential& pot, const Activity& act,
    const std::function<double(const Point&)>& h, int N,
    const quad::McPlan& plan,
    std::optional<TailWitness> witness = std::nullopt);

// Density of seeing exactly the tuple pts in region (and nothing else),
// with respect to plain Lebesgue at the fixed points:
//   J_k(pts) = sum_m ((-1)^m/m!) int_{region^m} rho_{k+m}(pts, y) dy,
// with the correlation series expanded through a shared Xi estimate so every
// (m, j) cell is one flat Monte Carlo job.  Constant activity only.
quad::McEstimate janossy_from_correlations(const PairPotential& pot,
                                           const Activity& act,
                                           const model::Box& region,
                                           std::span<const Point> pts,
                                           int nmax, const quad::McPlan& plan);

using RhoFn = std::function<quad::McEstimate(std::span<const Point>)>;

// Right side of the one-point reduction identity at (x0; pts):
//   z(x0) prod_i (1+f(x0,x_i)) [rho_n(pts)
//     + sum_{k=1}^{kmax} (1/k!) int prod_j f(x0,y_j) rho_{n+k}(pts,y) dy^k],
// with plain-Lebesgue integrals over the activity domain.  rho_0 = 1.  The
// k-tail is bounded by rho <= prod z and checked against plan.tol.  Table
// std_errors propagate linearly into the returned error.
quad::McEstimate ks_apply(const PairPotential& pot, const Activity& act,
                          const RhoFn& rho, const Point& x0,
                          std::span<const Point> pts, int kmax,
                          const quad::McPlan& plan);

// Partial sums of the fixed-point iteration for the correlation series:
// order m of the report is the n = k + m term, evaluated through the
// root-peeling recursion instead of graph enumeration, on the same per-order
// streams as correlation_expansion.  Zero report when k > N.
ExpansionReport picard_iterate(const PairPotential& pot, const Activity& act,
                               std::span<const Point> pts, int N,
                               const quad::McPlan& plan);

}  // namespace mayerkit::expansion
