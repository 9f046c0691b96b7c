#include <doctest.h>

#include <cmath>
#include <vector>

#include "mayerkit/combinat.hpp"
#include "mayerkit/model.hpp"
#include "mayerkit/ursell.hpp"

using namespace mayerkit;
using model::make_point;
using model::PairPotential;
using model::Point;

namespace {

std::vector<Point> rods_all_overlap(int n) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i)
    pts.push_back(make_point({0.05 * i}));  // all within sigma = 1 of each other
  return pts;
}

PairPotential smooth_pot() {
  // Finite repulsive table: v(0) = 2, linear down to 0 at distance 1.5.
  return PairPotential::tabulated({0.0, 1.5}, {2.0, 0.0});
}

std::vector<Point> spread_points(int n) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i)
    pts.push_back(make_point({0.37 * i + 0.01 * i * i}));
  return pts;
}

}  // namespace

TEST_CASE("f_matrix lists pair values in pair_index order") {
  const auto pot = PairPotential::hard_sphere(1.0);
  const std::vector<Point> pts{make_point({0.0}), make_point({0.5}),
                               make_point({2.0})};
  const auto fm = ursell::f_matrix(pot, pts);
  REQUIRE(fm.size() == 3);
  CHECK(fm[0] == -1.0);  // (0,1) overlap
  CHECK(fm[1] == 0.0);   // (0,2) distance 2
  CHECK(fm[2] == 0.0);   // (1,2) distance 1.5
}

TEST_CASE("graph_weight multiplies f over edges") {
  const auto pot = smooth_pot();
  const std::vector<Point> pts{make_point({0.0}), make_point({0.4}),
                               make_point({0.9})};
  const auto fm = ursell::f_matrix(pot, pts);

  combinat::Graph empty;
  empty.n = 3;
  CHECK(ursell::graph_weight(pot, empty, pts) == 1.0);

  combinat::Graph path = empty;
  path.set_edge(0, 1);
  path.set_edge(1, 2);
  CHECK(ursell::graph_weight(pot, path, pts) ==
        doctest::Approx(fm[0] * fm[2]).epsilon(1e-14));
}

TEST_CASE("fully overlapping hard cores give (-1)^(n-1) (n-1)!") {
  const auto pot = PairPotential::hard_sphere(1.0);
  double factorial = 1.0;
  for (int n = 2; n <= 6; ++n) {
    factorial *= (n - 1);
    const auto u = ursell::ursell(pot, rods_all_overlap(n));
    const double expect = ((n - 1) % 2 == 0 ? 1.0 : -1.0) * factorial;
    CHECK(u.value == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("hard rod sums with a partial overlap pattern") {
  const auto pot = PairPotential::hard_sphere(1.0);
  // 0 and 1 overlap, 1 and 2 overlap, 0 and 2 do not.
  const std::vector<Point> pts{make_point({0.0}), make_point({0.8}),
                               make_point({1.6})};
  // Connected graphs on 3 vertices: three 2-edge paths and the triangle.
  // Weights: f01 f12 = 1, f01 f02 = 0, f02 f12 = 0, f01 f02 f12 = 0.
  const auto u = ursell::ursell(pot, pts);
  CHECK(u.value == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(u.terms == 4);
  CHECK(ursell::ursell(pot, std::vector<Point>{pts[0]}).value == 1.0);
}

TEST_CASE("k = n sum equals the Boltzmann product along both routes") {
  const auto pot = smooth_pot();
  for (int n = 2; n <= 4; ++n) {
    const auto pts = spread_points(n);
    const auto full = ursell::psi(pot, n, pts);
    CHECK(full.terms ==
          (std::uint64_t(1) << (n * (n - 1) / 2)));
    CHECK(full.value ==
          doctest::Approx(std::exp(-model::energy(pot, pts))).epsilon(1e-12));
    // Independent route: genuinely sum all graph weights.
    ursell::MultirootedSumEvaluator all(n, n);
    CHECK(all.eval(pot, pts) == doctest::Approx(full.value).epsilon(1e-12));
  }
}

TEST_CASE("enumeration and root-peeling recursion agree") {
  const auto pot = smooth_pot();
  for (int n = 2; n <= 5; ++n) {
    const auto pts = spread_points(n);
    for (int k = 1; k <= n; ++k) {
      const double by_enum = ursell::psi(pot, k, pts).value;
      const double by_rec = ursell::psi_by_recursion(pot, k, pts);
      CHECK(by_rec == doctest::Approx(by_enum).epsilon(1e-11));
    }
  }
  // Hard cores too (exact zeros must survive the recursion).
  const auto hard = PairPotential::hard_sphere(1.0);
  const std::vector<Point> pts{make_point({0.0}), make_point({0.8}),
                               make_point({1.6}), make_point({2.1})};
  for (int k = 1; k <= 4; ++k) {
    CHECK(ursell::psi_by_recursion(hard, k, pts) ==
          doctest::Approx(ursell::psi(hard, k, pts).value).epsilon(1e-12));
  }
}

TEST_CASE("connected sum matches the k = 1 multirooted sum") {
  const auto pot = smooth_pot();
  const auto pts = spread_points(4);
  const auto c = ursell::ursell(pot, pts);
  const auto m = ursell::psi(pot, 1, pts);
  CHECK(c.value == doctest::Approx(m.value).epsilon(1e-14));
  CHECK(c.terms == m.terms);
  CHECK(c.terms == 38);
}

TEST_CASE("evaluator over cached masks matches fresh enumeration") {
  const auto pot = smooth_pot();
  const auto pts = spread_points(5);
  ursell::MultirootedSumEvaluator connected(0, 5);
  CHECK(connected.terms() == 728);
  CHECK(connected.eval(pot, pts) ==
        doctest::Approx(ursell::ursell(pot, pts).value).epsilon(1e-12));
  const auto fm = ursell::f_matrix(pot, pts);
  CHECK(connected.eval(fm) == connected.eval(pot, pts));
  ursell::MultirootedSumEvaluator two(2, 4);
  const auto pts4 = spread_points(4);
  CHECK(two.eval(pot, pts4) ==
        doctest::Approx(ursell::psi(pot, 2, pts4).value).epsilon(1e-12));
}

TEST_CASE("rooted tree weights on explicit shapes") {
  const auto pot = PairPotential::hard_sphere(1.0);
  // f(0,1) = f(1,2) = -1, f(0,2) = 0.
  const std::vector<Point> pts{make_point({0.0}), make_point({0.8}),
                               make_point({1.6})};
  combinat::Graph path;
  path.n = 3;
  path.set_edge(0, 1);
  path.set_edge(1, 2);
  // Rooted at 0: |f01| * |f12|, no sibling factors.
  CHECK(ursell::fp_tree_weight(pot, path, 0, pts) == doctest::Approx(1.0));
  // Rooted at 1: children 0 and 2 are siblings, factor (1 + f(0,2)) = 1.
  CHECK(ursell::fp_tree_weight(pot, path, 1, pts) == doctest::Approx(1.0));

  combinat::Graph star;
  star.n = 3;
  star.set_edge(0, 1);
  star.set_edge(0, 2);
  // Rooted at 0: |f01| * |f02| * (1 + f(1,2)) = 1 * 0 * 0 = 0.
  CHECK(ursell::fp_tree_weight(pot, star, 0, pts) == doctest::Approx(0.0));

  // Smooth check of the sibling factor.
  const auto smooth = smooth_pot();
  const std::vector<Point> tri{make_point({0.0}), make_point({0.4}),
                               make_point({0.9})};
  const auto fm = ursell::f_matrix(smooth, tri);
  const double expect = std::abs(fm[0]) * std::abs(fm[1]) * (1.0 + fm[2]);
  CHECK(ursell::fp_tree_weight(smooth, star, 0, tri) ==
        doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("tree sums dominate the connected sum") {
  const auto check_domination = [](const PairPotential& pot,
                                   const std::vector<Point>& pts) {
    const double u = std::abs(ursell::ursell(pot, pts).value);
    double plain = 0.0, pinned = 0.0;
    combinat::TreeRange trees(static_cast<int>(pts.size()), false);
    while (auto t = trees.next()) {
      double w = 1.0;
      const auto fm = ursell::f_matrix(pot, pts);
      for (int j = 1; j < t->graph.n; ++j)
        for (int i = 0; i < j; ++i)
          if (t->graph.has_edge(i, j))
            w *= std::abs(fm[static_cast<std::size_t>(
                combinat::pair_index(i, j))]);
      plain += w;
      pinned += ursell::fp_tree_weight(pot, t->graph, 0, pts);
    }
    CHECK(u <= plain + 1e-12);
    CHECK(u <= pinned + 1e-12);
    CHECK(pinned <= plain + 1e-12);
  };
  check_domination(PairPotential::hard_sphere(1.0), rods_all_overlap(4));
  check_domination(PairPotential::hard_sphere(1.0), rods_all_overlap(5));
  check_domination(smooth_pot(), spread_points(4));
  check_domination(smooth_pot(), spread_points(5));
}
