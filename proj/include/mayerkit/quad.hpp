#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "mayerkit/model.hpp"

namespace mayerkit::quad {

// Counter-based stream: output(i) = mix64(key + i*gamma) with a per-stream
// key and odd per-stream gamma derived from (seed, stream).  Identical
// (seed, stream) always reproduces the same sequence; distinct streams are
// statistically independent and safe to hand to parallel workers.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64();
  double next_double();  // uniform in [0, 1)
  double uniform(double lo, double hi);

  // Stateless peek at a fixed counter; used for keyed coins (e.g. lazy edge
  // variables indexed by an unordered pair id).
  double double_at(std::uint64_t counter) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix64(std::uint64_t x);

 private:
  std::uint64_t seed_ = 0, stream_ = 0;
  std::uint64_t key_ = 0, gamma_ = 1, counter_ = 0;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t samples = 0;
};

// Sampling/integration plan carried into every report for reproducibility.
// The same (seed, stream, samples, workers) yields bit-identical estimates.
struct McPlan {
  std::uint64_t seed = 0x5eedf00dULL;
  std::uint64_t stream = 0;
  std::uint64_t samples = 100000;
  int workers = 1;
  double tol = 1e-9;  // relative tolerance for series tail checks

  McPlan with_stream(std::uint64_t s) const {
    McPlan p = *this;
    p.stream = s;
    return p;
  }
  McPlan with_samples(std::uint64_t n) const {
    McPlan p = *this;
    p.samples = n;
    return p;
  }
};

// Streaming mean/variance accumulator with a deterministic pairwise merge.
class Welford {
 public:
  void add(double x);
  void merge(const Welford& other);
  std::uint64_t count() const { return n_; }
  double mean() const { return mean_; }
  // Standard error of the mean (0 when n < 2).
  double std_error() const;

 private:
  std::uint64_t n_ = 0;
  double mean_ = 0.0, m2_ = 0.0;
};

// One point distributed proportional to z(x) dx over the activity's domain,
// with a mark attached when the mark law asks for one.  Piecewise activities
// sample a cell by mass then a uniform point inside it; callback activities
// use rejection against zmax.
model::Point sample_point(const model::Activity& act, RngStream& rng);

// Uniform point in the box.
model::Point sample_uniform(const model::Box& box, RngStream& rng);

// Uniform point in the ball B(center, radius) (dim of `center`).
model::Point sample_in_ball(const model::Point& center, double radius,
                            RngStream& rng);

// Poisson(mu) count via the product method (chunked so e^{-mu} never
// underflows).
std::uint64_t sample_poisson(RngStream& rng, double mu);

// A Poisson point process sample under the activity: N ~ Poisson(mass),
// then N independent points proportional to z.
model::Configuration sample_poisson_configuration(const model::Activity& act,
                                                  RngStream& rng);

// Generic estimator: worker w (0..workers-1) draws from stream plan.stream+w
// and evaluates `value(rng)` for its share of plan.samples; the per-worker
// accumulators are merged in a fixed pairwise tree, so results depend only on
// the plan, not on thread scheduling.
McEstimate mc_estimate(const McPlan& plan,
                       const std::function<double(RngStream&)>& value);

// MC value of the integral over the domain^n of g d(lambda_z)^n, i.e.
// mass^n * E[g(X_1..X_n)] with X_i iid proportional to z.
McEstimate mc_integrate(
    const model::Activity& act, int n,
    const std::function<double(std::span<const model::Point>)>& integrand,
    const McPlan& plan);

// Same against plain Lebesgue measure on box^n.
McEstimate mc_integrate_box(
    const model::Box& box, int n,
    const std::function<double(std::span<const model::Point>)>& integrand,
    const McPlan& plan);

// Same against Lebesgue measure on B(center, radius)^n.
McEstimate mc_integrate_ball(
    const model::Point& center, double radius, int n,
    const std::function<double(std::span<const model::Point>)>& integrand,
    const McPlan& plan);

// Volume of the d-ball of given radius (d in {1,2,3}).
double ball_volume(int dim, double radius);

}  // namespace mayerkit::quad
