#pragma once

#include <cstdint>
#include <vector>

#include "mayerkit/model.hpp"
#include "mayerkit/quad.hpp"

namespace mayerkit::branching {

using model::Activity;
using model::PairPotential;
using model::Point;

// Poisson offspring dominator of the pinned-cluster growth: mu = z * b with
// b the plain-Lebesgue integral of |f(x0, .)|.
struct BranchingSpec {
  double z = 0.0;
  double b = 0.0;
  double mu = 0.0;
};

// b via the k = 1 pinned integral (closed form for hard spheres).  Constant
// activity only.
BranchingSpec from_model(const PairPotential& pot, const Activity& act,
                         const quad::McPlan& plan);

enum class ExtinctionMethod { fixed_point, simulation };

// Smallest fixed point of p = e^{mu (p - 1)}: 1 when mu <= 1, else the
// iteration from 0 (monotone, checked) run to convergence.
double extinction_fixed_point(double mu);

// fixed_point: exact value, zero error.  simulation: fraction of extinct
// trees over plan.samples trials, one generation-superposed Poisson draw per
// level, generation cap 1e4 and population cap 1e6 (a capped tree counts as
// surviving).
quad::McEstimate extinction_probability(const BranchingSpec& spec,
                                        ExtinctionMethod method,
                                        const quad::McPlan& plan);

// P(total progeny = n) = (mu n)^{n-1} e^{-mu n} / n!, log-space for large n.
double borel_pmf(double mu, std::uint64_t n);

// sum_n P(n) for mu <= 1 (equals 1 in exact arithmetic): direct summation
// while the geometric ratio bound certifies the remainder, plus an explicit
// power-tail estimate at mu = 1 where the decay is only n^{-3/2}.
double borel_total_mass(double mu);

// Cumulative P(N <= n) for n = 1..nmax.
std::vector<double> borel_cdf_table(double mu, std::uint64_t nmax);

// Partial sums of sum_n (mu n)^{n-1} / n! with the divergence flag raised
// when the terminal successive term ratio reaches 1 (the ratio increases to
// mu e, so the series converges iff mu <= 1/e).
struct ProgenyGf {
  double value = 0.0;
  bool diverged = false;
  int terms = 0;
};

ProgenyGf total_progeny_gf(double mu, int N);

// Total progeny of one Poi(mu) tree, saturated at cap (returns cap when the
// running total reaches it).
std::uint64_t sample_gw_progeny(quad::RngStream& rng, double mu,
                                std::uint64_t cap);

// Cluster of the added point q in the random connection model driven by
// lambda_z with connection probability |f|: per trial, a Poisson cloud and
// lazy pair coins on separate streams (plan.stream + 2 trial, + 2 trial + 1),
// breadth-first growth, sizes saturated at cap.  Sizes include q itself.
struct RcmClusterReport {
  std::vector<std::uint64_t> sizes;
  std::uint64_t cap = 0;
  double cap_fraction = 0.0;
};

RcmClusterReport rcm_cluster(const PairPotential& pot, const Activity& act,
                             const Point& q, std::uint64_t trials,
                             std::uint64_t cap, const quad::McPlan& plan);

}  // namespace mayerkit::branching
