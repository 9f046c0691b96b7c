#include "mayerkit/quad.hpp"

#include <cmath>
#include <numbers>
#include <thread>

namespace mayerkit::quad {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t RngStream::mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  key_ = mix64(seed ^ mix64(stream + kGolden));
  gamma_ = mix64(key_ ^ 0xbf58476d1ce4e5b9ULL) | 1ULL;  // odd stride
}

std::uint64_t RngStream::next_u64() {
  return mix64(key_ + (counter_++) * gamma_);
}

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_double();
}

double RngStream::double_at(std::uint64_t counter) const {
  return static_cast<double>(mix64(key_ + counter * gamma_) >> 11) * 0x1.0p-53;
}

void Welford::add(double x) {
  if (std::isnan(x))
    throw contract_violation("mc accumulator: NaN sample value");
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void Welford::merge(const Welford& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double na = static_cast<double>(n_);
  const double nb = static_cast<double>(other.n_);
  const double d = other.mean_ - mean_;
  const double nt = na + nb;
  mean_ += d * (nb / nt);
  m2_ += other.m2_ + d * d * (na * nb / nt);
  n_ += other.n_;
}

double Welford::std_error() const {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  double var = m2_ / (n - 1.0);
  if (var < 0.0) var = 0.0;
  return std::sqrt(var / n);
}

model::Point sample_uniform(const model::Box& box, RngStream& rng) {
  model::Point p;
  p.dim = box.dim;
  for (int k = 0; k < box.dim; ++k) {
    const auto i = static_cast<std::size_t>(k);
    p.coords[i] = rng.uniform(box.lower[i], box.upper[i]);
  }
  return p;
}

namespace {
void attach_mark(const model::MarkLaw& law, model::Point& p, RngStream& rng) {
  if (law.kind == model::MarkLaw::Kind::uniform)
    p.mark = rng.uniform(law.lo, law.hi);
}
}  // namespace

model::Point sample_point(const model::Activity& act, RngStream& rng) {
  model::Point p;
  if (act.is_constant()) {
    p = sample_uniform(act.domain(), rng);
  } else if (const auto* cells = act.cells()) {
    const double total = act.mass();
    if (!(total > 0.0))
      throw contract_violation("sample_point: activity has zero mass");
    double u = rng.next_double() * total;
    std::size_t pick = cells->size() - 1;
    for (std::size_t i = 0; i < cells->size(); ++i) {
      const double w = (*cells)[i].z * (*cells)[i].box.volume();
      if (u < w) {
        pick = i;
        break;
      }
      u -= w;
    }
    p = sample_uniform((*cells)[pick].box, rng);
  } else {
    const auto* cb = act.callback_data();
    // Rejection against the declared bound; draw budget is generous but
    // bounded so a broken callback cannot spin forever.
    bool accepted = false;
    for (int tries = 0; tries < 100000; ++tries) {
      model::Point cand = sample_uniform(act.domain(), rng);
      const double u = rng.next_double();
      if (u * cb->zmax <= act.z(cand)) {
        p = cand;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      throw contract_violation("sample_point: rejection sampling stalled");
  }
  attach_mark(act.marks(), p, rng);
  return p;
}

model::Point sample_in_ball(const model::Point& center, double radius,
                            RngStream& rng) {
  model::Point p;
  p.dim = center.dim;
  if (center.dim == 1) {
    p.coords[0] = center.coords[0] + rng.uniform(-radius, radius);
  } else if (center.dim == 2) {
    const double r = radius * std::sqrt(rng.next_double());
    const double th = rng.uniform(0.0, 2.0 * std::numbers::pi);
    p.coords[0] = center.coords[0] + r * std::cos(th);
    p.coords[1] = center.coords[1] + r * std::sin(th);
  } else {
    const double r = radius * std::cbrt(rng.next_double());
    const double c = rng.uniform(-1.0, 1.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double ph = rng.uniform(0.0, 2.0 * std::numbers::pi);
    p.coords[0] = center.coords[0] + r * s * std::cos(ph);
    p.coords[1] = center.coords[1] + r * s * std::sin(ph);
    p.coords[2] = center.coords[2] + r * c;
  }
  return p;
}

double ball_volume(int dim, double radius) {
  switch (dim) {
    case 1:
      return 2.0 * radius;
    case 2:
      return std::numbers::pi * radius * radius;
    case 3:
      return (4.0 / 3.0) * std::numbers::pi * radius * radius * radius;
    default:
      throw contract_violation("ball_volume: dim must be 1, 2 or 3");
  }
}

std::uint64_t sample_poisson(RngStream& rng, double mu) {
  if (mu < 0.0 || !std::isfinite(mu))
    throw contract_violation("sample_poisson: mu must be finite and >= 0");
  std::uint64_t total = 0;
  // Chunk large means so the product threshold e^{-mu} stays normal.
  while (mu > 500.0) {
    double chunk = 500.0;
    const double limit = std::exp(-chunk);
    double prod = 1.0;
    std::uint64_t k = 0;
    do {
      prod *= rng.next_double();
      ++k;
    } while (prod > limit);
    total += k - 1;
    mu -= chunk;
  }
  const double limit = std::exp(-mu);
  double prod = 1.0;
  std::uint64_t k = 0;
  do {
    prod *= rng.next_double();
    ++k;
  } while (prod > limit);
  return total + k - 1;
}

model::Configuration sample_poisson_configuration(const model::Activity& act,
                                                  RngStream& rng) {
  const std::uint64_t n = sample_poisson(rng, act.mass());
  model::Configuration cfg;
  cfg.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) cfg.push_back(sample_point(act, rng));
  return cfg;
}

McEstimate mc_estimate(const McPlan& plan,
                       const std::function<double(RngStream&)>& value) {
  if (plan.samples == 0) throw contract_violation("mc: samples must be > 0");
  const int w = plan.workers < 1 ? 1 : plan.workers;
  const std::uint64_t base = plan.samples / static_cast<std::uint64_t>(w);
  const std::uint64_t rem = plan.samples % static_cast<std::uint64_t>(w);

  std::vector<Welford> acc(static_cast<std::size_t>(w));
  auto run = [&](int wi) {
    const auto i = static_cast<std::size_t>(wi);
    RngStream rng(plan.seed, plan.stream + static_cast<std::uint64_t>(wi));
    const std::uint64_t mine =
        base + (static_cast<std::uint64_t>(wi) < rem ? 1 : 0);
    for (std::uint64_t s = 0; s < mine; ++s) acc[i].add(value(rng));
  };

  if (w == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int wi = 0; wi < w; ++wi) pool.emplace_back(run, wi);
    for (auto& t : pool) t.join();
  }

  // Fixed-order pairwise tree reduction: independent of thread timing.
  std::vector<Welford> level = std::move(acc);
  while (level.size() > 1) {
    std::vector<Welford> up;
    up.reserve((level.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < level.size(); i += 2) {
      Welford m = level[i];
      m.merge(level[i + 1]);
      up.push_back(m);
    }
    if (level.size() % 2 == 1) up.push_back(level.back());
    level = std::move(up);
  }

  McEstimate e;
  e.mean = level[0].mean();
  e.std_error = level[0].std_error();
  e.samples = level[0].count();
  return e;
}

namespace {
McEstimate scaled(McEstimate e, double scale) {
  e.mean *= scale;
  e.std_error *= std::abs(scale);
  return e;
}
}  // namespace

McEstimate mc_integrate(
    const model::Activity& act, int n,
    const std::function<double(std::span<const model::Point>)>& integrand,
    const McPlan& plan) {
  if (n < 1) throw contract_violation("mc_integrate: n must be >= 1");
  const double mass = act.mass();
  if (!(mass > 0.0)) return McEstimate{0.0, 0.0, plan.samples};
  McEstimate e = mc_estimate(plan, [&](RngStream& rng) {
    std::vector<model::Point> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) p = sample_point(act, rng);
    return integrand(pts);
  });
  return scaled(e, std::pow(mass, n));
}

McEstimate mc_integrate_box(
    const model::Box& box, int n,
    const std::function<double(std::span<const model::Point>)>& integrand,
    const McPlan& plan) {
  if (n < 1) throw contract_violation("mc_integrate_box: n must be >= 1");
  McEstimate e = mc_estimate(plan, [&](RngStream& rng) {
    std::vector<model::Point> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) p = sample_uniform(box, rng);
    return integrand(pts);
  });
  return scaled(e, std::pow(box.volume(), n));
}

McEstimate mc_integrate_ball(
    const model::Point& center, double radius, int n,
    const std::function<double(std::span<const model::Point>)>& integrand,
    const McPlan& plan) {
  if (n < 1) throw contract_violation("mc_integrate_ball: n must be >= 1");
  McEstimate e = mc_estimate(plan, [&](RngStream& rng) {
    std::vector<model::Point> pts(static_cast<std::size_t>(n));
    for (auto& p : pts) p = sample_in_ball(center, radius, rng);
    return integrand(pts);
  });
  return scaled(e, std::pow(ball_volume(center.dim, radius), n));
}

}  // namespace mayerkit::quad
