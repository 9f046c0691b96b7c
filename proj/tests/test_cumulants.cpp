#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "mayerkit/cumulants.hpp"
#include "mayerkit/model.hpp"
#include "mayerkit/oracles.hpp"
#include "mayerkit/quad.hpp"

using namespace mayerkit;
using model::Activity;
using model::Kernel;
using model::make_box;
using model::Point;

namespace {

quad::McPlan plan_with(std::uint64_t seed, std::uint64_t samples) {
  quad::McPlan p;
  p.seed = seed;
  p.samples = samples;
  p.workers = 2;
  return p;
}

const Activity kAct = Activity::constant(0.6, make_box({0.0}, {4.0}));

}  // namespace

TEST_CASE("constant kernel reduces to the pair count statistic") {
  // u = 1 makes X = N (N - 1), whose cumulants follow from the Poisson
  // moment algebra.
  const auto exact = oracles::pair_count_cumulants(kAct.mass(), 3);
  for (int m = 1; m <= 3; ++m) {
    const auto pp = cumulants::cumulant_partition_pairs(
        Kernel::constant(1.0), kAct, m, plan_with(301, 40000));
    CHECK(std::abs(pp.value - exact[static_cast<std::size_t>(m - 1)]) <=
          3.0 * pp.std_error + 1e-9);
    CHECK(pp.connected);
  }
}

TEST_CASE("the two cumulant routes agree term by term on shared streams") {
  const auto u = Kernel::tabulated({0.0, 0.7, 1.4}, {0.8, 0.5, 0.0});
  for (int m = 1; m <= 3; ++m) {
    const auto plan = plan_with(302, 10000);
    const auto mg = cumulants::cumulant_multigraph(u, kAct, m, plan);
    const auto pp = cumulants::cumulant_partition_pairs(u, kAct, m, plan);
    const double scale = std::pow(2.0, m);
    REQUIRE(pp.per_n.size() == mg.per_n.size());
    for (std::size_t i = 0; i < pp.per_n.size(); ++i) {
      CHECK(pp.per_n[i].n == mg.per_n[i].n);
      const double a = pp.per_n[i].estimate.mean;
      const double b = scale * mg.per_n[i].estimate.mean;
      CHECK(std::abs(a - b) <=
            1e-10 * std::max({1.0, std::abs(a), std::abs(b)}));
    }
    CHECK(pp.value ==
          doctest::Approx(scale * mg.value).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("moment route agrees with the cumulant algebra") {
  const auto u = Kernel::constant(1.0);
  const auto plan = plan_with(303, 60000);
  // Y = N (N - 1) / 2: raw moments through the Poisson algebra.
  const double lam = kAct.mass();
  const auto pm = [&](int j) { return oracles::poisson_moment(lam, j); };
  const double ey = 0.5 * (pm(2) - pm(1));
  const double ey2 = 0.25 * (pm(4) - 2.0 * pm(3) + pm(2));

  const auto m1 = cumulants::moment_multigraph(u, kAct, 1, plan);
  CHECK(!m1.connected);
  CHECK(std::abs(m1.value - ey) <= 3.0 * m1.std_error + 1e-9);
  const auto m2 = cumulants::moment_multigraph(u, kAct, 2, plan);
  CHECK(std::abs(m2.value - ey2) <= 3.0 * m2.std_error + 1e-9);

  // Moments reconstructed from the connected sums.
  const auto k1 = cumulants::cumulant_multigraph(u, kAct, 1, plan);
  const auto k2 = cumulants::cumulant_multigraph(u, kAct, 2, plan);
  const auto rebuilt = oracles::moments_from_cumulants({k1.value, k2.value});
  CHECK(std::abs(rebuilt[1] - m2.value) <=
        3.0 * (m2.std_error + k2.std_error + 2.0 * ey * k1.std_error) + 1e-9);
}

TEST_CASE("sampled k statistics match the analytic cumulants") {
  const auto u = Kernel::tabulated({0.0, 1.0}, {1.0, 0.0});
  const auto emp = cumulants::empirical_cumulants(u, kAct, 2,
                                                  plan_with(304, 60000));
  REQUIRE(emp.k.size() == 2);
  CHECK(emp.trials == 60000);
  for (int m = 1; m <= 2; ++m) {
    const auto an = cumulants::cumulant_partition_pairs(
        u, kAct, m, plan_with(305, 40000));
    const std::size_t i = static_cast<std::size_t>(m - 1);
    CHECK(std::abs(emp.k[i] - an.value) <=
          3.0 * (emp.std_error[i] + an.std_error) + 1e-6);
  }
}

TEST_CASE("order caps and kernel probes") {
  const auto u = Kernel::constant(1.0);
  CHECK_THROWS_AS(
      cumulants::cumulant_multigraph(u, kAct, 5, plan_with(306, 100)),
      size_limit_error);
  CHECK_THROWS_AS(
      cumulants::cumulant_partition_pairs(u, kAct, 0, plan_with(306, 100)),
      contract_violation);

  const auto hard = Kernel::callback(
      [](const Point&, const Point&) { return model::kInf; }, 1.0);
  CHECK_THROWS_AS(
      cumulants::cumulant_multigraph(hard, kAct, 2, plan_with(306, 100)),
      contract_violation);

  CHECK_THROWS_AS(
      cumulants::empirical_cumulants(u, kAct, 2, plan_with(306, 100)),
      contract_violation);
}
