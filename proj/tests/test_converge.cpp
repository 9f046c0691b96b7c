#include <doctest.h>

#include <cmath>
#include <vector>

#include "mayerkit/converge.hpp"
#include "mayerkit/model.hpp"
#include "mayerkit/quad.hpp"

using namespace mayerkit;
using model::Activity;
using model::make_box;
using model::make_point;
using model::PairPotential;
using model::Point;

namespace {

constexpr double kInvE = 0.36787944117144233;

quad::McPlan plan_with(std::uint64_t seed, std::uint64_t samples) {
  quad::McPlan p;
  p.seed = seed;
  p.samples = samples;
  p.workers = 2;
  return p;
}

Activity rods_act(double z) {
  return Activity::constant(z, make_box({0.0}, {10.0}));
}

const PairPotential kRods = PairPotential::hard_sphere(1.0);

}  // namespace

TEST_CASE("packing saturation orders per dimension") {
  CHECK(converge::packing_kmax(1) == 2);
  CHECK(converge::packing_kmax(2) == 5);
  CHECK(converge::packing_kmax(3) == 12);
}

TEST_CASE("pinned integrals for hard rods") {
  const auto v = converge::packing_integrals(kRods, make_point({0.0}), 3,
                                             plan_with(101, 200000));
  REQUIRE(v.size() == 3);
  // V_1 is the closed-form ball volume, no sampling.
  CHECK(v[0].mean == 2.0);
  CHECK(v[0].std_error == 0.0);
  // V_2: two points of [-1,1] farther than 1 apart fill a quarter of the
  // square, twice the triangle area 1/2, so the integral is 1.
  CHECK(std::abs(v[1].mean - 1.0) <= 3.0 * v[1].std_error + 1e-12);
  // V_3 = 0: three points of a length-2 interval cannot be pairwise > 1
  // apart, so the integrand vanishes at every sample.
  CHECK(v[2].mean == 0.0);
  CHECK(v[2].std_error == 0.0);
}

TEST_CASE("exponential-weight condition is sharp for hard rods") {
  // e^a z b <= a with b = 2 and the optimal a = -log(z b); feasibility up to
  // z b = 1/e.  Hard spheres evaluate b in closed form, so this is exact.
  const double z_edge = kInvE / 2.0;
  const auto below = converge::check_kpu(kRods, rods_act(0.99 * z_edge), 1.0,
                                         0.0, plan_with(102, 100));
  CHECK(below.satisfied);
  CHECK(below.lhs == doctest::Approx(std::exp(1.0) * 0.99 * z_edge * 2.0)
                         .epsilon(1e-12));
  const auto above = converge::check_kpu(kRods, rods_act(1.01 * z_edge), 1.0,
                                         0.0, plan_with(102, 100));
  CHECK(!above.satisfied);
  CHECK(above.margin < 0.0);

  const auto best = converge::optimize_witness(
      kRods, rods_act(0.9 * z_edge), converge::Condition::kpu, 0.0, 0,
      plan_with(102, 100));
  CHECK(best.satisfied);
  CHECK(best.margin > 0.0);
  // Optimal witness: a* = -log(z b) = 1 - log(0.9).
  CHECK(std::abs(best.a - (1.0 - std::log(0.9))) < 0.05);
}

TEST_CASE("critical activities for rods match closed forms") {
  const auto plan = plan_with(103, 1000000);
  const double zc_kpu =
      converge::critical_activity(kRods, 1, converge::Condition::kpu, 0.0, 0,
                                  plan);
  CHECK(zc_kpu * 2.0 == doctest::Approx(kInvE).epsilon(1e-3));

  // Pinned-cluster condition: tangency of z (1 + 2T + T^2/2) = T sits at
  // T = sqrt(2), giving z * 2 = 2 - sqrt(2).
  const double zc_fp = converge::critical_activity(
      kRods, 1, converge::Condition::fp, 0.0, 0, plan);
  CHECK(zc_fp * 2.0 == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(0.01));

  // The pinned-cluster threshold strictly dominates the exponential one.
  CHECK(zc_fp > zc_kpu * 1.2);

  // Two dimensions, closed-form disk volume.
  const double zc2 = converge::critical_activity(
      PairPotential::hard_sphere(1.0), 2, converge::Condition::kpu, 0.0, 0,
      plan_with(103, 100));
  CHECK(zc2 * 3.14159265358979 == doctest::Approx(kInvE).epsilon(1e-3));
}

TEST_CASE("tree maps converge below their boundary and escape above it") {
  const auto plan = plan_with(104, 1000000);
  const double z_plain = kInvE / 2.0;
  const auto ok = converge::tree_gf(kRods, rods_act(0.95 * z_plain),
                                    converge::TreeVariant::plain, plan);
  CHECK(!ok.diverged);
  // Fixed point of T = z e^{2T}.
  const double z = 0.95 * z_plain;
  CHECK(std::abs(ok.value - z * std::exp(2.0 * ok.value)) <=
        1e-9 * std::max(1.0, ok.value));
  const auto bad = converge::tree_gf(kRods, rods_act(1.05 * z_plain),
                                     converge::TreeVariant::plain, plan);
  CHECK(bad.diverged);

  const double z_fp = (2.0 - std::sqrt(2.0)) / 2.0;
  CHECK(!converge::tree_gf(kRods, rods_act(0.95 * z_fp),
                           converge::TreeVariant::fp, plan)
             .diverged);
  CHECK(converge::tree_gf(kRods, rods_act(1.05 * z_fp),
                          converge::TreeVariant::fp, plan)
            .diverged);
}

TEST_CASE("tree series coefficients and forest partial sums") {
  const double z = 0.1;
  const auto plan = plan_with(105, 1000000);
  const auto t = converge::tree_series(kRods, rods_act(z), 3, plan);
  REQUIRE(t.size() == 3);
  // t_1 = z, t_2 = z V_1 t_1, t_3 = z (V_1 t_2 + (V_2/2) t_1^2) with
  // V_1 = 2 exact and V_2 = 1 up to sampling.
  CHECK(t[0] == z);
  CHECK(t[1] == doctest::Approx(2.0 * z * z).epsilon(1e-12));
  CHECK(t[2] == doctest::Approx(4.5 * z * z * z).epsilon(0.01));

  const double f1 = converge::forest_picard(kRods, rods_act(z), 1, 3, plan);
  CHECK(f1 == doctest::Approx(t[0] + t[1] + t[2]).epsilon(1e-12));
  const double f2 = converge::forest_picard(kRods, rods_act(z), 2, 3, plan);
  CHECK(f2 == doctest::Approx(t[0] * t[0] + 2.0 * t[0] * t[1]).epsilon(1e-12));
  CHECK(converge::forest_picard(kRods, rods_act(z), 4, 3, plan) == 0.0);
}

TEST_CASE("signed-kernel condition evaluates its closed forms") {
  const auto act = Activity::constant(0.3, make_box({0.0}, {2.0}));  // mass 0.6
  const auto B = [](const Point&) { return 0.0; };
  const auto plan = plan_with(106, 400);

  const auto ok = converge::check_py(model::Kernel::constant(0.1), act, B, 0.5,
                                     plan);
  CHECK(ok.satisfied);
  CHECK(ok.lhs ==
        doctest::Approx(0.6 * (1.0 - std::exp(-0.1)) * std::exp(0.5))
            .epsilon(1e-12));

  const auto bad = converge::check_py(model::Kernel::constant(5.0), act, B, 0.5,
                                      plan);
  CHECK(!bad.satisfied);
}

TEST_CASE("cumulant bound needs a strict exponential slack") {
  const auto act = rods_act(0.1);
  const auto cert =
      converge::check_kpu(kRods, act, 1.0, 0.2, plan_with(107, 100));
  REQUIRE(cert.satisfied);
  CHECK(converge::cumulant_bound(cert, act.mass(), 2) ==
        doctest::Approx(2.0 / 0.04 * act.mass()).epsilon(1e-12));
  CHECK(converge::cumulant_bound(cert, act.mass(), 1) ==
        doctest::Approx(act.mass() / 0.2).epsilon(1e-12));

  const auto flat =
      converge::check_kpu(kRods, act, 1.0, 0.0, plan_with(107, 100));
  CHECK_THROWS_AS(converge::cumulant_bound(flat, act.mass(), 2),
                  unsupported_error);
  CHECK_THROWS_AS(converge::cumulant_bound(cert, act.mass(), 0),
                  contract_violation);
}

TEST_CASE("witness search covers the two repulsive conditions only") {
  CHECK_THROWS_AS(
      converge::optimize_witness(kRods, rods_act(0.1), converge::Condition::py,
                                 0.0, 0, plan_with(108, 100)),
      unsupported_error);
  CHECK_THROWS_AS(converge::critical_activity(
                      kRods, 1, converge::Condition::py, 0.0, 0,
                      plan_with(108, 100)),
                  unsupported_error);
}

TEST_CASE("conditions require a constant activity") {
  const auto cb = Activity::callback([](const Point&) { return 0.1; }, 0.1,
                                     1.0, make_box({0.0}, {10.0}));
  CHECK_THROWS_AS(converge::check_kpu(kRods, cb, 1.0, 0.0, plan_with(109, 100)),
                  unsupported_error);
  CHECK_THROWS_AS(converge::tree_gf(kRods, cb, converge::TreeVariant::plain,
                                    plan_with(109, 100)),
                  unsupported_error);
}
