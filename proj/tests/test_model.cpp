#include <doctest.h>

#include <cmath>
#include <vector>

#include "mayerkit/model.hpp"

using namespace mayerkit;
using model::make_box;
using model::make_point;
using model::Point;

TEST_CASE("hard sphere potential and mayer f") {
  const auto pot = model::PairPotential::hard_sphere(1.0);
  const Point a = make_point({0.0});
  const Point b = make_point({0.5});
  const Point c = make_point({2.5});
  const Point contact = make_point({1.0});

  CHECK(std::isinf(pot.v(a, b)));
  CHECK(pot.v(a, c) == 0.0);
  // Contact distance counts as overlap (closed ball).
  CHECK(std::isinf(pot.v(a, contact)));

  CHECK(model::mayer_f(pot, a, b) == -1.0);  // exactly -1 on the core
  CHECK(model::mayer_f(pot, a, c) == 0.0);   // exactly 0 outside
}

TEST_CASE("mayer f range and beta scaling for soft potentials") {
  const auto pot =
      model::PairPotential::tabulated({0.0, 1.0, 2.0}, {3.0, 1.0, 0.0}, 2.0);
  const Point a = make_point({0.0});
  for (double d : {0.0, 0.3, 0.9, 1.5, 1.9, 2.0, 5.0}) {
    const Point b = make_point({d});
    const double f = model::mayer_f(pot, a, b);
    CHECK(f >= -1.0);
    CHECK(f <= 0.0);
  }
  // Linear interpolation with beta = 2 as a multiplier.
  CHECK(pot.v(a, make_point({0.5})) == doctest::Approx(2.0 * 2.0));
  CHECK(pot.v(a, make_point({1.5})) == doctest::Approx(2.0 * 0.5));
  // Clamped past the grid; table ends at 0 so the tail vanishes.
  CHECK(pot.v(a, make_point({9.0})) == 0.0);
}

TEST_CASE("hard core is beta invariant") {
  for (double beta : {0.25, 1.0, 7.5}) {
    const auto pot = model::PairPotential::tabulated(
        {0.0, 0.5, 1.0}, {model::kInf, model::kInf, 0.0}, beta);
    const Point a = make_point({0.0});
    CHECK(model::mayer_f(pot, a, make_point({0.2})) == -1.0);
  }
}

TEST_CASE("mixture potential uses marks") {
  const auto pot = model::PairPotential::hard_sphere_mixture();
  const Point a = make_point({0.0}, 0.5);
  const Point b = make_point({1.0}, 0.6);  // 1.0 <= 0.5 + 0.6: overlap
  const Point c = make_point({3.0}, 0.6);
  CHECK(std::isinf(pot.v(a, b)));
  CHECK(pot.v(a, c) == 0.0);
  const Point unmarked = make_point({1.0});
  CHECK_THROWS_AS((void)pot.v(a, unmarked), contract_violation);
}

TEST_CASE("energy decomposition and permutation invariance") {
  const auto pot =
      model::PairPotential::tabulated({0.0, 1.0, 3.0}, {2.0, 0.7, 0.0});
  std::vector<Point> cfg;
  // Deterministic scattered points.
  for (int i = 0; i < 6; ++i)
    cfg.push_back(make_point({0.9 * i + 0.13 * ((i * i) % 3)}));

  const double h = model::energy(pot, cfg);
  CHECK(std::isfinite(h));

  // Decomposition: H(cfg + x) = H(cfg) + W(x; cfg).
  const Point x = make_point({2.71});
  std::vector<Point> bigger = cfg;
  bigger.push_back(x);
  const double lhs = model::energy(pot, bigger);
  const double rhs = h + model::interaction_field(pot, x, cfg);
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));

  // Exact permutation invariance (values are sorted before accumulation).
  std::vector<Point> shuffled = {cfg[3], cfg[0], cfg[5], cfg[1], cfg[4], cfg[2]};
  CHECK(model::energy(pot, shuffled) == h);
}

TEST_CASE("energy short-circuits on hard cores") {
  const auto pot = model::PairPotential::hard_sphere(1.0);
  std::vector<Point> cfg{make_point({0.0}), make_point({0.4}),
                         make_point({5.0})};
  CHECK(std::isinf(model::energy(pot, cfg)));
  CHECK(model::energy(pot, std::vector<Point>{}) == 0.0);
  CHECK(model::energy(pot, std::vector<Point>{make_point({0.0})}) == 0.0);
}

TEST_CASE("activity kinds: mass and pointwise values") {
  const auto box = make_box({0.0}, {10.0});
  const auto constant = model::Activity::constant(0.3, box);
  CHECK(constant.mass() == doctest::Approx(3.0));
  CHECK(constant.z(make_point({4.0})) == 0.3);
  CHECK(constant.z(make_point({11.0})) == 0.0);  // outside the domain

  std::vector<model::PiecewiseCell> cells{
      {make_box({0.0}, {2.0}), 1.0},
      {make_box({2.0}, {6.0}), 0.25},
  };
  const auto pw = model::Activity::piecewise(cells, box);
  CHECK(pw.mass() == doctest::Approx(2.0 + 1.0));
  CHECK(pw.z(make_point({1.0})) == 1.0);
  CHECK(pw.z(make_point({3.0})) == 0.25);
  CHECK(pw.z(make_point({8.0})) == 0.0);

  CHECK_THROWS_AS(model::Activity::constant(-1.0, box), contract_violation);
  std::vector<model::PiecewiseCell> overlapping{
      {make_box({0.0}, {3.0}), 1.0},
      {make_box({2.0}, {4.0}), 1.0},
  };
  CHECK_THROWS_AS(model::Activity::piecewise(overlapping, box),
                  contract_violation);
}

TEST_CASE("signed kernels evaluate symmetrically") {
  const auto ker = model::Kernel::tabulated({0.0, 1.0, 2.0}, {-1.0, 0.5, 0.0});
  const Point a = make_point({0.0});
  const Point b = make_point({0.7});
  CHECK(ker.u(a, b) == ker.u(b, a));
  CHECK(ker.u(a, b) < 0.5);
}
