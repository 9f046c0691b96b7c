#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mayerkit/combinat.hpp"
#include "mayerkit/expansion.hpp"
#include "mayerkit/model.hpp"
#include "mayerkit/oracles.hpp"
#include "mayerkit/quad.hpp"

using namespace mayerkit;
using model::Activity;
using model::make_box;
using model::make_point;
using model::PairPotential;
using model::Point;

namespace {

quad::McPlan plan_with(std::uint64_t seed, std::uint64_t samples,
                       double tol = 1e-9) {
  quad::McPlan p;
  p.seed = seed;
  p.samples = samples;
  p.workers = 2;
  p.tol = tol;
  return p;
}

Activity rods_act(double z, double L) {
  return Activity::constant(z, make_box({0.0}, {L}));
}

}  // namespace

TEST_CASE("hard rod normalization matches its polynomial form") {
  CHECK(oracles::tonks_config_integral(1, 1.0, 5.0) == doctest::Approx(5.0));
  CHECK(oracles::tonks_config_integral(2, 1.0, 5.0) == doctest::Approx(16.0));
  CHECK(oracles::tonks_config_integral(7, 1.0, 5.0) == 0.0);  // (5 - 6)_+ = 0
  const double z = 0.3, L = 5.0;
  double xi = 1.0;
  for (int n = 1; n <= 6; ++n)
    xi += std::pow(z, n) * oracles::tonks_config_integral(n, 1.0, L) /
          oracles::factorial(n);
  CHECK(oracles::tonks_log_xi(z, 1.0, L) ==
        doctest::Approx(std::log(xi)).epsilon(1e-13));
}

TEST_CASE("moment and cumulant maps invert each other") {
  const std::vector<double> kappa{0.4, 1.3, -0.2, 0.7};
  const auto mom = oracles::moments_from_cumulants(kappa);
  const auto back = oracles::cumulants_from_moments(mom);
  REQUIRE(back.size() == kappa.size());
  for (std::size_t i = 0; i < kappa.size(); ++i)
    CHECK(back[i] == doctest::Approx(kappa[i]).epsilon(1e-12));

  // Poisson: all cumulants lambda, moments via Stirling numbers.
  const double lam = 1.9;
  const auto pm = oracles::moments_from_cumulants({lam, lam, lam, lam});
  for (int j = 1; j <= 4; ++j)
    CHECK(pm[static_cast<std::size_t>(j - 1)] ==
          doctest::Approx(oracles::poisson_moment(lam, j)).epsilon(1e-12));
}

TEST_CASE("complete Bell values match direct partition sums") {
  const std::vector<double> a{0.7, -0.3, 1.1, 0.25, -0.6};
  const auto bell = oracles::complete_bell(a);
  REQUIRE(bell.size() == a.size() + 1);
  CHECK(bell[0] == 1.0);
  for (int k = 1; k <= 5; ++k) {
    double direct = 0.0;
    combinat::PartitionRange parts(k);
    while (auto p = parts.next()) {
      double w = 1.0;
      for (const auto& b : p->blocks())
        w *= a[b.size() - 1];
      direct += w;
    }
    CHECK(bell[static_cast<std::size_t>(k)] ==
          doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("incomplete gamma on known slices") {
  for (double x : {0.1, 1.0, 3.0}) {
    CHECK(oracles::gamma_p(1.0, x) ==
          doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-10));
    CHECK(oracles::gamma_p(0.5, x) ==
          doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-10));
  }
  CHECK(oracles::gamma_p(2.5, 0.5) < oracles::gamma_p(2.5, 2.0));
}

TEST_CASE("pair count cumulants reproduce the Poisson moment algebra") {
  const double lam = 1.7;
  const auto kap = oracles::pair_count_cumulants(lam, 2);
  REQUIRE(kap.size() == 2);
  // X = N (N - 1): E[X] = lambda^2.
  CHECK(kap[0] == doctest::Approx(lam * lam).epsilon(1e-12));
  const double m2 = oracles::poisson_moment(lam, 4) -
                    2.0 * oracles::poisson_moment(lam, 3) +
                    oracles::poisson_moment(lam, 2);
  CHECK(kap[1] == doctest::Approx(m2 - kap[0] * kap[0]).epsilon(1e-12));
}

TEST_CASE("bruteforce normalization matches hard rods") {
  const auto pot = PairPotential::hard_sphere(1.0);
  const auto act = rods_act(0.05, 10.0);
  const auto est = expansion::xi_bruteforce(pot, act, 10,
                                            plan_with(11, 60000));
  const double exact = std::exp(oracles::tonks_log_xi(0.05, 1.0, 10.0));
  CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error + 1e-9);
  CHECK(est.std_error < 0.01);
}

TEST_CASE("free gas collapses every series to its leading order") {
  const auto pot = PairPotential::none();
  const auto act = Activity::constant(0.25, make_box({0.0}, {4.0}));
  const auto plan = plan_with(7, 1000);

  const auto lp = expansion::log_partition_expansion(pot, act, 4, plan);
  REQUIRE(lp.orders.size() == 4);
  CHECK(lp.orders[0].estimate.mean == act.mass());
  CHECK(lp.orders[0].estimate.std_error == 0.0);
  for (std::size_t i = 1; i < lp.orders.size(); ++i) {
    CHECK(lp.orders[i].estimate.mean == 0.0);
    CHECK(lp.orders[i].estimate.std_error == 0.0);
  }
  CHECK(lp.partial_sum == act.mass());
  CHECK(!lp.tail_bound);

  const std::vector<Point> one{make_point({0.5})};
  const std::vector<Point> two{make_point({0.5}), make_point({1.5})};
  const auto r1 = expansion::correlation_expansion(pot, act, one, 3, plan);
  CHECK(r1.partial_sum == doctest::Approx(0.25).epsilon(1e-14));
  const auto r2 = expansion::correlation_expansion(pot, act, two, 3, plan);
  CHECK(r2.partial_sum == doctest::Approx(0.25 * 0.25).epsilon(1e-14));
  for (std::size_t i = 1; i < r2.orders.size(); ++i)
    CHECK(r2.orders[i].estimate.mean == 0.0);

  // Factorial cumulant densities: a pair decouples, so everything past the
  // single-point density vanishes identically.
  const auto t1 = expansion::truncated_expansion(pot, act, one, 3, plan);
  CHECK(t1.partial_sum == doctest::Approx(0.25).epsilon(1e-14));
  const auto t2 = expansion::truncated_expansion(pot, act, two, 3, plan);
  CHECK(t2.partial_sum == 0.0);
}

TEST_CASE("correlation series agrees with the bruteforce density") {
  const auto pot = PairPotential::hard_sphere(1.0);
  const auto act = rods_act(0.05, 8.0);
  const std::vector<Point> one{make_point({3.0})};
  const std::vector<Point> two{make_point({3.0}), make_point({4.2})};
  // Truncation slack: with witness a = 0.2 the dropped orders sum below
  // z^n e^{an} (z b e^a)^{N+1} / (1 - z b e^a) < 5e-7 for both tuples.
  for (const auto& pts : {one, two}) {
    const int N = pts.size() == 1 ? 5 : 4;
    const auto series = expansion::correlation_expansion(
        pot, act, pts, N, plan_with(21, pts.size() == 1 ? 20000 : 10000));
    const auto brute = expansion::rho_bruteforce(
        pot, act, pts, 10, plan_with(21, 20000).with_stream(900));
    const double tol =
        3.0 * (series.std_error + brute.std_error) + 5e-7;
    CHECK(std::abs(series.partial_sum - brute.mean) <= tol);
  }
  // A hard overlap inside the tuple short-circuits both routes to zero.
  const std::vector<Point> overlap{make_point({3.0}), make_point({3.4})};
  CHECK(expansion::correlation_expansion(pot, act, overlap, 3,
                                         plan_with(21, 100))
            .partial_sum == 0.0);
  CHECK(expansion::rho_bruteforce(pot, act, overlap, 8,
                                  plan_with(21, 100))
            .mean == 0.0);
}

TEST_CASE("partition inversion round trips and enforces its table contract") {
  // Compose correlations from chosen truncated values, then invert.
  const double t1 = 0.4, t2 = 0.5, t3 = 0.6;       // singles
  const double t12 = 0.07, t13 = -0.03, t23 = 0.11;  // pairs
  const double t123 = 0.013;
  expansion::RhoTable rho;
  rho[0b001] = t1;
  rho[0b010] = t2;
  rho[0b100] = t3;
  rho[0b011] = t12 + t1 * t2;
  rho[0b101] = t13 + t1 * t3;
  rho[0b110] = t23 + t2 * t3;
  rho[0b111] = t123 + t1 * t23 + t2 * t13 + t3 * t12 + t1 * t2 * t3;
  CHECK(expansion::truncated_from_correlations(rho, 3) ==
        doctest::Approx(t123).epsilon(1e-12));

  expansion::RhoTable pair;
  pair[0b01] = t1;
  pair[0b10] = t2;
  pair[0b11] = 0.9;
  CHECK(expansion::truncated_from_correlations(pair, 2) ==
        doctest::Approx(0.9 - t1 * t2).epsilon(1e-12));

  pair.erase(0b10);
  CHECK_THROWS_AS(expansion::truncated_from_correlations(pair, 2),
                  contract_violation);
}

TEST_CASE("one point reduction identity on exact tables") {
  const auto plan = plan_with(17, 5000);
  // Free gas: every f factor vanishes, so the right side is exactly z.
  const auto free_act = Activity::constant(0.4, make_box({0.0}, {6.0}));
  const expansion::RhoFn free_rho =
      [](std::span<const Point> pts) -> quad::McEstimate {
    return {std::pow(0.4, static_cast<double>(pts.size())), 0.0, 1};
  };
  const auto freev =
      expansion::ks_apply(PairPotential::none(), free_act, free_rho,
                          make_point({1.7}), {}, 2, plan);
  CHECK(freev.mean == doctest::Approx(0.4).epsilon(1e-12));

  // Pinned point overlapping a fixed one: the boundary factor kills it.
  const auto pot = PairPotential::hard_sphere(1.0);
  const auto act = rods_act(0.05, 8.0);
  // Deep table calls leave only a few integration orders; the checked
  // Poisson tails (folded into each std_error) need the looser tolerance.
  expansion::BruteForceOracle oracle(pot, act, 8, plan_with(17, 30000, 1e-4),
                                     1000);
  const std::vector<Point> near{make_point({3.4})};
  const expansion::RhoFn via_oracle =
      [&oracle](std::span<const Point> pts) { return oracle.rho(pts); };
  const auto zero = expansion::ks_apply(pot, act, via_oracle,
                                        make_point({3.0}), near, 2,
                                        plan_with(17, 2000, 1e-4));
  CHECK(zero.mean == 0.0);

  // Separated tuple: both sides estimate the same two-point density.
  const std::vector<Point> far{make_point({5.5})};
  const auto lhs = oracle.rho(std::vector<Point>{make_point({3.0}),
                                                 make_point({5.5})});
  const auto rhs = expansion::ks_apply(pot, act, via_oracle,
                                       make_point({3.0}), far, 2,
                                       plan_with(17, 8000, 1e-4));
  CHECK(std::abs(lhs.mean - rhs.mean) <=
        3.0 * (lhs.std_error + rhs.std_error) + 1e-9);
}

TEST_CASE("fixed point iterates reproduce the expansion orders") {
  const auto pot = PairPotential::hard_sphere(1.0);
  const auto act = rods_act(0.1, 8.0);
  const auto plan = plan_with(23, 4000);
  const std::vector<Point> one{make_point({2.0})};
  const std::vector<Point> two{make_point({2.0}), make_point({4.7})};
  for (const auto& pts : {one, two}) {
    const auto direct = expansion::correlation_expansion(pot, act, pts, 4, plan);
    // The iteration order cap counts total points, roots included.
    const auto iter = expansion::picard_iterate(
        pot, act, pts, static_cast<int>(pts.size()) + 4, plan);
    REQUIRE(iter.orders.size() == direct.orders.size());
    for (std::size_t i = 0; i < iter.orders.size(); ++i) {
      const double a = direct.orders[i].estimate.mean;
      const double b = iter.orders[i].estimate.mean;
      CHECK(std::abs(a - b) <=
            1e-10 * std::max({1.0, std::abs(a), std::abs(b)}));
    }
  }
  // Truncation below the root count leaves nothing to report.
  CHECK(expansion::picard_iterate(pot, act, two, 1, plan).partial_sum == 0.0);
}

TEST_CASE("log Laplace functional matches the Campbell formula on a free gas") {
  const auto act = Activity::constant(0.4, make_box({0.0}, {5.0}));
  const auto h = [](const Point& p) {
    return (p.coords[0] >= 1.0 && p.coords[0] <= 3.0) ? 0.7 : 0.0;
  };
  const auto rep = expansion::log_laplace_expansion(
      PairPotential::none(), act, h, 3, plan_with(31, 40000));
  const double exact = 0.4 * 2.0 * std::expm1(-0.7);
  CHECK(std::abs(rep.partial_sum - exact) <= 3.0 * rep.std_error + 1e-9);
  for (std::size_t i = 1; i < rep.orders.size(); ++i)
    CHECK(rep.orders[i].estimate.mean == 0.0);

  // Negative test functions need a witness that covers the excursion.
  const auto bad = [](const Point&) { return -0.1; };
  CHECK_THROWS_AS(expansion::log_laplace_expansion(PairPotential::none(), act,
                                                   bad, 2, plan_with(31, 100)),
                  contract_violation);
}

TEST_CASE("empty region probability of the free gas") {
  const auto act = Activity::constant(0.3, make_box({0.0}, {4.0}));
  const auto region = make_box({1.0}, {3.0});
  const std::vector<Point> one{make_point({1.5})};
  const auto est = expansion::janossy_from_correlations(
      PairPotential::none(), act, region, one, 12, plan_with(37, 20000, 1e-6));
  // J_1(x) = z e^{-z |region|} for independent points.
  const double exact = 0.3 * std::exp(-0.3 * 2.0);
  CHECK(std::abs(est.mean - exact) <= 3.0 * est.std_error + 1e-5);

  const std::vector<Point> outside{make_point({3.5})};
  CHECK_THROWS_AS(
      expansion::janossy_from_correlations(PairPotential::none(), act, region,
                                           outside, 12, plan_with(37, 100)),
      contract_violation);
}

TEST_CASE("oversized tails are rejected with a usable order hint") {
  const auto act = Activity::constant(1.0, make_box({0.0}, {10.0}));  // mass 10
  const auto pot = PairPotential::none();
  CHECK_THROWS_AS(expansion::xi_bruteforce(pot, act, 3, plan_with(5, 100)),
                  tail_too_large_error);
  try {
    expansion::xi_bruteforce(pot, act, 3, plan_with(5, 100));
  } catch (const tail_too_large_error& e) {
    CHECK(e.required_nmax > 3);
    // The hinted order really does satisfy the tolerance; the free gas sums
    // its Poisson series with zero variance.
    const auto est = expansion::xi_bruteforce(pot, act, e.required_nmax,
                                              plan_with(5, 200));
    CHECK(est.mean == doctest::Approx(std::exp(10.0)).epsilon(1e-6));
  }
}
