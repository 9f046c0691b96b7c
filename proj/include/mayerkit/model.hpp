#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mayerkit/errors.hpp"

namespace mayerkit::model {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Point in R^d, d in {1,2,3}, with an optional non-negative mark (used by
// mixture potentials, e.g. a random sphere radius).
struct Point {
  std::array<double, 3> coords{0.0, 0.0, 0.0};
  int dim = 1;
  std::optional<double> mark;
};

Point make_point(std::initializer_list<double> coords,
                 std::optional<double> mark = std::nullopt);
double distance(const Point& a, const Point& b);

// Axis-aligned box, the finite window every integral in v1 runs over.
struct Box {
  std::array<double, 3> lower{0.0, 0.0, 0.0};
  std::array<double, 3> upper{1.0, 1.0, 1.0};
  int dim = 1;

  double volume() const;
  bool contains(const Point& p) const;
  Point center() const;
  double max_side() const;
};

Box make_box(std::initializer_list<double> lower,
             std::initializer_list<double> upper);

// Finite point configuration; order carries no meaning, all energy sums are
// order-independent by construction.
using Configuration = std::vector<Point>;

// ---------------------------------------------------------------------------
// Pair potentials.  Values live in [0, +inf]; +inf encodes a hard core.
// The inverse temperature enters only as a multiplier on the finite part:
// v_eff = beta * v_raw, and a hard core stays a hard core for every beta > 0.
// ---------------------------------------------------------------------------

struct HardSphere {
  double exclusion_radius = 1.0;  // v = +inf iff |x-y| <= exclusion_radius
};

// Marked hard spheres: v = +inf iff |x-y| <= mark(x) + mark(y).
struct HardSphereMixture {};

// Radial table, linear in distance between nodes, clamped to the boundary
// values outside the grid (tables ending at 0 therefore vanish past range).
struct TabulatedRadial {
  std::vector<double> dist;   // strictly increasing, dist[0] >= 0
  std::vector<double> value;  // same length, each in [0, +inf]
};

struct PairCallback {
  std::function<double(const Point&, const Point&)> fn;
  double range = kInf;  // interaction range hint for quadrature
};

class PairPotential {
 public:
  static PairPotential none();  // v identically 0 (ideal gas)
  static PairPotential hard_sphere(double exclusion_radius, double beta = 1.0);
  static PairPotential hard_sphere_mixture(double beta = 1.0);
  static PairPotential tabulated(std::vector<double> dist,
                                 std::vector<double> value, double beta = 1.0);
  static PairPotential tabulated_from_csv(const std::string& path,
                                          double beta = 1.0);
  static PairPotential callback(
      std::function<double(const Point&, const Point&)> fn, double range,
      double beta = 1.0);

  // Effective potential beta*v_raw in [0, +inf].  Symmetric in (x, y): every
  // kind evaluates on the unordered pair (callbacks see a canonical order).
  double v(const Point& x, const Point& y) const;

  double beta() const { return beta_; }
  // Distance beyond which v vanishes; +inf when unknown.
  double range() const;
  bool is_hard_sphere() const;
  double hard_sphere_radius() const;  // contract: is_hard_sphere()

 private:
  PairPotential() = default;
  std::variant<std::monostate, HardSphere, HardSphereMixture, TabulatedRadial,
               PairCallback>
      kind_;
  double beta_ = 1.0;
};

// f = exp(-v) - 1 in [-1, 0]; exactly -1 on a hard core and exactly 0 for
// non-interacting pairs (no NaN for any input the potential admits).
double mayer_f(const PairPotential& pot, const Point& x, const Point& y);

// Sum of v over unordered pairs; H_0 = H_1 = 0; +inf short-circuits.  The
// finite pair values are sorted before accumulation so the result is exactly
// invariant under permutations of cfg.
double energy(const PairPotential& pot, std::span<const Point> cfg);

// W(x; cfg) = sum_j v(x, y_j), +inf short-circuits.
double interaction_field(const PairPotential& pot, const Point& x,
                         std::span<const Point> cfg);

// ---------------------------------------------------------------------------
// Signed pair kernels (test functions for cumulant ops and for conditions
// that accept stable but non-repulsive interactions).  May take the value
// +inf (hard core); consumers that need finiteness check sampled pairs.
// ---------------------------------------------------------------------------

class Kernel {
 public:
  static Kernel tabulated(std::vector<double> dist, std::vector<double> value,
                          double scale = 1.0);
  static Kernel callback(std::function<double(const Point&, const Point&)> fn,
                         double range, double scale = 1.0);
  static Kernel constant(double value);  // u identically `value`

  double u(const Point& x, const Point& y) const;
  double range() const;

 private:
  Kernel() = default;
  std::variant<std::monostate, TabulatedRadial, PairCallback> kind_;
  double scale_ = 1.0;
};

// ---------------------------------------------------------------------------
// Activity z(x) >= 0 on a box domain; lambda_z = z dlambda.
// ---------------------------------------------------------------------------

struct MarkLaw {
  enum class Kind { none, uniform };
  Kind kind = Kind::none;
  double lo = 0.0, hi = 1.0;
};

struct PiecewiseCell {
  Box box;
  double z = 0.0;
};

class Activity {
 public:
  static Activity constant(double z, Box domain, MarkLaw marks = {});
  // Disjoint cells inside the domain; z = 0 outside every cell.
  static Activity piecewise(std::vector<PiecewiseCell> cells, Box domain,
                            MarkLaw marks = {});
  // Caller supplies the density bound (for rejection sampling) and the total
  // mass (v1 keeps the type exact rather than estimating it).
  static Activity callback(std::function<double(const Point&)> fn, double zmax,
                           double mass, Box domain, MarkLaw marks = {});

  double z(const Point& p) const;
  double mass() const;  // integral of z over the domain
  const Box& domain() const { return domain_; }
  const MarkLaw& marks() const { return marks_; }
  bool is_constant() const;
  double constant_z() const;  // contract: is_constant()

  // Internal accessors used by the sampler in quad.
  struct CallbackData {
    std::function<double(const Point&)> fn;
    double zmax = 0.0;
    double mass = 0.0;
  };
  const std::vector<PiecewiseCell>* cells() const;
  const CallbackData* callback_data() const;

 private:
  Activity() = default;
  std::variant<double, std::vector<PiecewiseCell>, CallbackData> kind_{0.0};
  Box domain_;
  MarkLaw marks_;
};

}  // namespace mayerkit::model
