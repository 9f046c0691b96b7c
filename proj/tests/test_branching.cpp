#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mayerkit/branching.hpp"
#include "mayerkit/model.hpp"
#include "mayerkit/oracles.hpp"
#include "mayerkit/quad.hpp"

using namespace mayerkit;
using model::Activity;
using model::make_box;
using model::make_point;
using model::PairPotential;

namespace {

quad::McPlan plan_with(std::uint64_t seed, std::uint64_t samples) {
  quad::McPlan p;
  p.seed = seed;
  p.samples = samples;
  return p;
}

}  // namespace

TEST_CASE("cluster size law at small orders") {
  for (double mu : {0.3, 0.8}) {
    CHECK(branching::borel_pmf(mu, 1) ==
          doctest::Approx(std::exp(-mu)).epsilon(1e-13));
    CHECK(branching::borel_pmf(mu, 2) ==
          doctest::Approx(mu * std::exp(-2.0 * mu)).epsilon(1e-13));
    CHECK(branching::borel_pmf(mu, 3) ==
          doctest::Approx(1.5 * mu * mu * std::exp(-3.0 * mu)).epsilon(1e-13));
  }
  // Large argument goes through log space without overflow.
  CHECK(branching::borel_pmf(0.9, 5000) >= 0.0);
  CHECK(std::isfinite(branching::borel_pmf(0.9, 5000)));
  CHECK_THROWS_AS(branching::borel_pmf(0.5, 0), contract_violation);
}

TEST_CASE("subcritical cluster sizes carry full mass") {
  CHECK(branching::borel_total_mass(0.5) == doctest::Approx(1.0).epsilon(1e-11));
  // Critical point: only n^{-3/2} decay, summed with an explicit tail.
  CHECK(branching::borel_total_mass(1.0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(branching::borel_total_mass(1.2), contract_violation);
}

TEST_CASE("cdf table accumulates the pmf") {
  const double mu = 0.6;
  const auto cdf = branching::borel_cdf_table(mu, 30);
  REQUIRE(cdf.size() == 30);
  double acc = 0.0;
  for (std::size_t i = 0; i < cdf.size(); ++i) {
    acc += branching::borel_pmf(mu, i + 1);
    CHECK(cdf[i] == doctest::Approx(acc).epsilon(1e-13));
    if (i > 0) CHECK(cdf[i] >= cdf[i - 1]);
  }
  CHECK(cdf.back() <= 1.0 + 1e-12);
}

TEST_CASE("progeny series converges exactly up to 1/e") {
  // sum_n (mu n)^{n-1} / n! = T(mu) / mu with T = mu e^T.
  const double mu = 0.3;
  double T = 0.0;
  for (int i = 0; i < 200; ++i) T = mu * std::exp(T);
  const auto gf = branching::total_progeny_gf(mu, 400);
  CHECK(!gf.diverged);
  CHECK(gf.value == doctest::Approx(T / mu).epsilon(1e-8));

  CHECK(branching::total_progeny_gf(1.0 / std::exp(1.0) - 0.02, 400).diverged ==
        false);
  CHECK(branching::total_progeny_gf(1.0 / std::exp(1.0) + 0.02, 400).diverged);
  CHECK(branching::total_progeny_gf(0.5, 400).diverged);
}

TEST_CASE("extinction probability, exact route and simulated route") {
  CHECK(branching::extinction_fixed_point(0.5) == 1.0);
  CHECK(branching::extinction_fixed_point(1.0) == 1.0);

  // Supercritical: smallest root of p = e^{mu (p - 1)} by bisection.
  const double mu = 2.0;
  double lo = 0.0, hi = 1.0 - 1e-9;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (std::exp(mu * (mid - 1.0)) - mid > 0.0 ? lo : hi) = mid;
  }
  const double root = 0.5 * (lo + hi);
  CHECK(branching::extinction_fixed_point(mu) ==
        doctest::Approx(root).epsilon(1e-10));

  branching::BranchingSpec spec;
  spec.mu = mu;
  const auto exact = branching::extinction_probability(
      spec, branching::ExtinctionMethod::fixed_point, plan_with(201, 10));
  CHECK(exact.mean == branching::extinction_fixed_point(mu));
  CHECK(exact.std_error == 0.0);

  // Surviving supercritical trees run to the population cap, so keep the
  // trial count modest.
  const auto sim = branching::extinction_probability(
      spec, branching::ExtinctionMethod::simulation, plan_with(201, 1000));
  CHECK(std::abs(sim.mean - root) <= 3.0 * sim.std_error + 1e-3);

  branching::BranchingSpec sub;
  sub.mu = 0.8;
  const auto all = branching::extinction_probability(
      sub, branching::ExtinctionMethod::simulation, plan_with(201, 5000));
  CHECK(all.mean == 1.0);
}

TEST_CASE("sampled tree totals follow the cluster size law") {
  // Chi-square over bins {1..6, >= 7} against the exact pmf.
  for (double mu : {0.3, 0.8}) {
    quad::RngStream rng(202, mu < 0.5 ? 0 : 1);
    const int trials = 100000;
    std::vector<double> obs(7, 0.0);
    for (int i = 0; i < trials; ++i) {
      const auto n = branching::sample_gw_progeny(rng, mu, 1000000);
      obs[n >= 7 ? 6 : static_cast<std::size_t>(n - 1)] += 1.0;
    }
    double chi2 = 0.0, cdf6 = 0.0;
    for (int n = 1; n <= 6; ++n) {
      const double p = branching::borel_pmf(mu, static_cast<std::uint64_t>(n));
      cdf6 += p;
      const double e = trials * p;
      chi2 += (obs[static_cast<std::size_t>(n - 1)] - e) *
              (obs[static_cast<std::size_t>(n - 1)] - e) / e;
    }
    const double etail = trials * (1.0 - cdf6);
    chi2 += (obs[6] - etail) * (obs[6] - etail) / etail;
    // 6 degrees of freedom; reject only below the 1% tail.
    CHECK(oracles::gamma_p(3.0, chi2 / 2.0) < 0.99);
  }
}

TEST_CASE("offspring mean derived from the model") {
  const auto act = Activity::constant(0.15, make_box({0.0}, {50.0}));
  const auto spec = branching::from_model(PairPotential::hard_sphere(1.0), act,
                                          plan_with(203, 100));
  CHECK(spec.z == 0.15);
  CHECK(spec.b == 2.0);  // closed-form ball volume
  CHECK(spec.mu == doctest::Approx(0.3).epsilon(1e-13));
}

TEST_CASE("cluster growth is reproducible and respects its contracts") {
  const auto pot = PairPotential::hard_sphere(1.0);
  const auto act = Activity::constant(0.1, make_box({0.0}, {40.0}));
  const auto q = make_point({20.0});
  const auto plan = plan_with(204, 100);

  const auto a = branching::rcm_cluster(pot, act, q, 200, 50, plan);
  const auto b = branching::rcm_cluster(pot, act, q, 200, 50, plan);
  REQUIRE(a.sizes.size() == 200);
  CHECK(a.sizes == b.sizes);
  for (const auto s : a.sizes) {
    CHECK(s >= 1);  // the pinned point itself
    CHECK(s <= 50);
  }
  CHECK(a.cap == 50);
  CHECK(a.cap_fraction == 0.0);  // far subcritical, cap unreachable in 200 tries

  // A tiny cap saturates and is reported as such.
  const auto act_dense = Activity::constant(2.0, make_box({0.0}, {40.0}));
  const auto capped = branching::rcm_cluster(pot, act_dense, q, 50, 2, plan);
  std::uint64_t at_cap = 0;
  for (const auto s : capped.sizes) at_cap += (s == 2);
  CHECK(capped.cap_fraction ==
        doctest::Approx(static_cast<double>(at_cap) / 50.0).epsilon(1e-12));
  CHECK(capped.cap_fraction > 0.0);

  // Domain must dwarf the interaction range.
  const auto small = Activity::constant(0.1, make_box({0.0}, {5.0}));
  CHECK_THROWS_AS(
      branching::rcm_cluster(pot, small, make_point({2.5}), 10, 10, plan),
      contract_violation);
  CHECK_THROWS_AS(
      branching::rcm_cluster(pot, act, make_point({45.0}), 10, 10, plan),
      contract_violation);
}
