#include "mayerkit/expansion.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mayerkit/combinat.hpp"
#include "mayerkit/errors.hpp"
#include "mayerkit/oracles.hpp"
#include "mayerkit/ursell.hpp"

namespace mayerkit::expansion {

namespace {

constexpr int kMaxOrder = 7;

// Stream layout within one job (callers separate whole jobs by plan.stream):
// low offsets hold per-order integrals, kAuxStream holds one-off envelope or
// normalization jobs, and oracle density calls grow upward from kCallStream
// so the schedule never wraps into the fixed blocks.
constexpr std::uint64_t kAuxStream = 4096;
constexpr std::uint64_t kCallStream = 8192;
constexpr std::uint64_t kRangeCheckStream = 4097;

bool has_hard_overlap(const PairPotential& pot, std::span<const Point> pts) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      if (std::isinf(pot.v(pts[i], pts[j]))) return true;
  return false;
}

double prod_z(const Activity& act, std::span<const Point> pts) {
  double p = 1.0;
  for (const auto& x : pts) p *= act.z(x);
  return p;
}

// sum_{n > nmax} mass^n / n!
double poisson_tail(double mass, int nmax) {
  double term = 1.0;
  for (int n = 1; n <= nmax; ++n) term *= mass / n;
  double tail = 0.0;
  for (int n = nmax + 1; n <= nmax + 4000; ++n) {
    term *= mass / n;
    tail += term;
    if (n > mass && term < 1e-300) break;
  }
  return tail;
}

int required_poisson_order(double mass, double tol) {
  for (int n = 0; n <= 4000; ++n)
    if (poisson_tail(mass, n) <= tol) return n;
  throw contract_violation("series tail does not reach tolerance " +
                           std::to_string(tol));
}

double max_z(const Activity& act) {
  if (act.is_constant()) return act.constant_z();
  if (const auto* cells = act.cells()) {
    double m = 0.0;
    for (const auto& c : *cells) m = std::max(m, c.z);
    return m;
  }
  return act.callback_data()->zmax;
}

// Fixed-capacity tuple assembled on the caller's stack so integrand lambdas
// stay safe under multi-worker sampling.
struct TupleBuf {
  std::array<Point, 16> slots;
  std::size_t size = 0;

  explicit TupleBuf(std::span<const Point> head) {
    std::copy(head.begin(), head.end(), slots.begin());
    size = head.size();
  }
  std::span<const Point> with_tail(std::span<const Point> tail) {
    std::copy(tail.begin(), tail.end(), slots.begin() + size);
    return {slots.data(), size + tail.size()};
  }
};

void finish_report(ExpansionReport& rep) {
  rep.partial_sum = 0.0;
  double var = 0.0;
  for (const auto& t : rep.orders) {
    rep.partial_sum += t.estimate.mean;
    var += t.estimate.std_error * t.estimate.std_error;
  }
  rep.std_error = std::sqrt(var);
}

// Tail of sum_{n > N} of per-order magnitudes bounded by
// e^{-t(n-1)} * mass * (e^a - 1) / n under an exponential-slack witness.
double witness_tail(double mass, double a, double t, int N) {
  return mass * std::expm1(a) * std::exp(-t * N) /
         ((N + 1) * (-std::expm1(-t)));
}

}  // namespace

ExpansionReport log_partition_expansion(const PairPotential& pot,
                                        const Activity& act, int N,
                                        const quad::McPlan& plan,
                                        std::optional<TailWitness> witness) {
  if (N < 1) throw contract_violation("log_partition_expansion: N < 1");
  if (N > kMaxOrder)
    throw size_limit_error("log_partition_expansion: order above " +
                           std::to_string(kMaxOrder));
  ExpansionReport rep;
  rep.quantity = Quantity::log_xi;
  rep.truncation_order = N;
  rep.orders.push_back({1, {act.mass(), 0.0, 0}});
  for (int n = 2; n <= N; ++n) {
    ursell::MultirootedSumEvaluator ev(0, n);
    auto est = quad::mc_integrate(
        act, n,
        [&](std::span<const Point> pts) { return ev.eval(pot, pts); },
        plan.with_stream(plan.stream + static_cast<std::uint64_t>(n)));
    const double c = 1.0 / oracles::factorial(n);
    rep.orders.push_back({n, {c * est.mean, c * est.std_error, est.samples}});
  }
  finish_report(rep);
  if (witness && witness->t > 0.0)
    rep.tail_bound = witness_tail(act.mass(), witness->a, witness->t, N);
  return rep;
}

quad::McEstimate xi_bruteforce(const PairPotential& pot, const Activity& act,
                               int nmax, const quad::McPlan& plan) {
  if (nmax < 0) throw contract_violation("xi_bruteforce: nmax < 0");
  const double mass = act.mass();
  if (poisson_tail(mass, nmax) > plan.tol)
    throw tail_too_large_error(
        "xi_bruteforce: sum_{n>nmax} mass^n/n! above tol",
        required_poisson_order(mass, plan.tol));
  double value = 1.0, var = 0.0;
  std::uint64_t samples = 0;
  for (int n = 1; n <= nmax; ++n) {
    auto est = quad::mc_integrate(
        act, n,
        [&](std::span<const Point> pts) {
          return std::exp(-model::energy(pot, pts));
        },
        plan.with_stream(plan.stream + static_cast<std::uint64_t>(n)));
    const double c = 1.0 / oracles::factorial(n);
    value += c * est.mean;
    var += c * c * est.std_error * est.std_error;
    samples += est.samples;
  }
  // e^{-H} <= 1, so the dropped orders sum to at most the Poisson tail.
  return {value, std::sqrt(var) + poisson_tail(mass, nmax), samples};
}

BruteForceOracle::BruteForceOracle(const PairPotential& pot,
                                   const Activity& act, int nmax,
                                   const quad::McPlan& plan,
                                   std::uint64_t inner_samples)
    : pot_(pot),
      act_(act),
      nmax_(nmax),
      plan_(plan),
      inner_samples_(inner_samples ? inner_samples : plan.samples),
      xi_(xi_bruteforce(pot, act, nmax,
                        plan.with_stream(plan.stream + kAuxStream))) {}

quad::McEstimate BruteForceOracle::rho(std::span<const Point> pts) const {
  if (pts.empty()) return {1.0, 0.0, 0};
  const int n = static_cast<int>(pts.size());
  if (n > nmax_)
    throw contract_violation("oracle density: tuple larger than nmax");
  const std::uint64_t call_id = calls_++;
  if (has_hard_overlap(pot_, pts)) return {0.0, 0.0, 0};
  const double pz = prod_z(act_, pts);
  if (pz == 0.0) return {0.0, 0.0, 0};

  const int jmax = nmax_ - n;
  const double mass = act_.mass();
  if (poisson_tail(mass, jmax) > plan_.tol)
    throw tail_too_large_error(
        "oracle density: integration tail above tol",
        n + required_poisson_order(mass, plan_.tol));

  double s = std::exp(-model::energy(pot_, pts));
  double var = 0.0;
  std::uint64_t samples = 0;
  for (int j = 1; j <= jmax; ++j) {
    auto est = quad::mc_integrate(
        act_, j,
        [&, pts](std::span<const Point> w) {
          TupleBuf buf(pts);
          return std::exp(-model::energy(pot_, buf.with_tail(w)));
        },
        plan_
            .with_stream(plan_.stream + kCallStream +
                         call_id * static_cast<std::uint64_t>(nmax_ + 1) +
                         static_cast<std::uint64_t>(j))
            .with_samples(inner_samples_));
    const double c = 1.0 / oracles::factorial(j);
    s += c * est.mean;
    var += c * c * est.std_error * est.std_error;
    samples += est.samples;
  }
  const double err_s = std::sqrt(var) + poisson_tail(mass, jmax);
  const double xi = xi_.mean;
  const double err =
      pz * (err_s / xi + std::abs(s) * xi_.std_error / (xi * xi));
  return {pz * s / xi, err, samples};
}

quad::McEstimate rho_bruteforce(const PairPotential& pot, const Activity& act,
                                std::span<const Point> pts, int nmax,
                                const quad::McPlan& plan) {
  BruteForceOracle oracle(pot, act, nmax, plan);
  return oracle.rho(pts);
}

namespace {

// Shared shape of the correlation / truncated-correlation expansions: order
// 0 is exact, order m integrates the (k, k+m) kernel over m extra points.
ExpansionReport rooted_expansion(const PairPotential& pot, const Activity& act,
                                 std::span<const Point> pts, int N,
                                 const quad::McPlan& plan, bool truncated) {
  const int k = static_cast<int>(pts.size());
  if (k < 1) throw contract_violation("rooted expansion: empty root tuple");
  if (N < 0) throw contract_violation("rooted expansion: N < 0");
  if (k + N > kMaxOrder)
    throw size_limit_error("rooted expansion: k + N above " +
                           std::to_string(kMaxOrder));
  ExpansionReport rep;
  rep.quantity = truncated ? Quantity::rho_truncated : Quantity::rho;
  rep.truncation_order = N;

  // Every multirooted graph keeps the full product over root pairs, so a
  // hard-core overlap among the roots kills the whole series.
  if (!truncated && has_hard_overlap(pot, pts)) {
    for (int m = 0; m <= N; ++m) rep.orders.push_back({m, {0.0, 0.0, 0}});
    finish_report(rep);
    return rep;
  }

  const double pz = prod_z(act, pts);
  const double order0 = truncated ? ursell::ursell(pot, pts).value
                                  : ursell::psi(pot, k, pts).value;
  rep.orders.push_back({0, {pz * order0, 0.0, 0}});

  for (int m = 1; m <= N; ++m) {
    ursell::MultirootedSumEvaluator ev(truncated ? 0 : k, k + m);
    auto est = quad::mc_integrate(
        act, m,
        [&, pts](std::span<const Point> y) {
          TupleBuf buf(pts);
          return ev.eval(pot, buf.with_tail(y));
        },
        plan.with_stream(plan.stream + static_cast<std::uint64_t>(m)));
    const double c = pz / oracles::factorial(m);
    rep.orders.push_back({m, {c * est.mean, c * est.std_error, est.samples}});
  }
  finish_report(rep);
  return rep;
}

}  // namespace

ExpansionReport correlation_expansion(const PairPotential& pot,
                                      const Activity& act,
                                      std::span<const Point> pts, int N,
                                      const quad::McPlan& plan) {
  return rooted_expansion(pot, act, pts, N, plan, /*truncated=*/false);
}

ExpansionReport truncated_expansion(const PairPotential& pot,
                                    const Activity& act,
                                    std::span<const Point> pts, int N,
                                    const quad::McPlan& plan) {
  return rooted_expansion(pot, act, pts, N, plan, /*truncated=*/true);
}

double truncated_from_correlations(const RhoTable& rho, int n) {
  if (n < 1) throw contract_violation("truncated_from_correlations: n < 1");
  if (n > 12)
    throw size_limit_error("truncated_from_correlations: n above 12");
  const std::uint32_t full = (1u << n) - 1u;
  for (std::uint32_t mask = 1; mask <= full; ++mask)
    if (!rho.count(mask))
      throw contract_violation(
          "truncated_from_correlations: missing sub-tuple entry");

  std::vector<double> rho_t(static_cast<std::size_t>(full) + 1, 0.0);
  std::vector<std::uint32_t> order;
  order.reserve(full);
  for (std::uint32_t mask = 1; mask <= full; ++mask) order.push_back(mask);
  std::stable_sort(order.begin(), order.end(),
                   [](std::uint32_t a, std::uint32_t b) {
                     return std::popcount(a) < std::popcount(b);
                   });
  for (std::uint32_t mask : order) {
    const int c = std::popcount(mask);
    if (c == 1) {
      rho_t[mask] = rho.at(mask);
      continue;
    }
    std::vector<int> elems;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) elems.push_back(i);
    double correction = 0.0;
    combinat::PartitionRange parts(c);
    while (auto part = parts.next()) {
      if (part->block_count() == 1) continue;
      double prod = 1.0;
      for (const auto& block : part->blocks()) {
        std::uint32_t sub = 0;
        for (int e : block) sub |= 1u << elems[static_cast<std::size_t>(e)];
        prod *= rho_t[sub];
      }
      correction += prod;
    }
    rho_t[mask] = rho.at(mask) - correction;
  }
  return rho_t[full];
}

ExpansionReport log_laplace_expansion(
    const PairPotential& pot, const Activity& act,
    const std::function<double(const Point&)>& h, int N,
    const quad::McPlan& plan, std::optional<TailWitness> witness) {
  if (N < 1) throw contract_violation("log_laplace_expansion: N < 1");
  if (N > kMaxOrder)
    throw size_limit_error("log_laplace_expansion: order above " +
                           std::to_string(kMaxOrder));
  const double t = witness ? witness->t : 0.0;
  quad::RngStream probe(plan.seed, plan.stream + kRangeCheckStream);
  double min_h = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 256; ++i) {
    const double hv = h(quad::sample_point(act, probe));
    if (!(hv >= -t - 1e-12))
      throw contract_violation(
          "log_laplace_expansion: h(x) < -t at a sampled point");
    min_h = std::min(min_h, hv);
  }
  ExpansionReport rep;
  rep.quantity = Quantity::log_laplace;
  rep.truncation_order = N;
  for (int n = 1; n <= N; ++n) {
    ursell::MultirootedSumEvaluator ev(0, n);
    auto est = quad::mc_integrate(
        act, n,
        [&](std::span<const Point> y) {
          double hs = 0.0;
          for (const auto& p : y) hs += h(p);
          const double g = std::expm1(-hs);
          if (g == 0.0) return 0.0;
          return g * ev.eval(pot, y);
        },
        plan.with_stream(plan.stream + static_cast<std::uint64_t>(n)));
    const double c = 1.0 / oracles::factorial(n);
    rep.orders.push_back({n, {c * est.mean, c * est.std_error, est.samples}});
  }
  finish_report(rep);
  if (witness && witness->t > 0.0) {
    // |e^{-sum h} - 1| <= 2 e^{t_h n} with t_h the sampled lower envelope of
    // -h; only the residual slack t - t_h still decays the tail.
    const double t_h = std::max(0.0, -min_h);
    const double rate = witness->t - t_h;
    if (rate > 0.0)
      rep.tail_bound =
          2.0 * std::exp(t_h) * witness_tail(act.mass(), witness->a, rate, N);
  }
  return rep;
}

quad::McEstimate janossy_from_correlations(const PairPotential& pot,
                                           const Activity& act,
                                           const model::Box& region,
                                           std::span<const Point> pts,
                                           int nmax,
                                           const quad::McPlan& plan) {
  if (!act.is_constant())
    throw unsupported_error(
        "janossy_from_correlations: constant activity only");
  for (const auto& p : pts)
    if (!region.contains(p))
      throw contract_violation(
          "janossy_from_correlations: point outside region");
  const int k = static_cast<int>(pts.size());
  if (k > nmax)
    throw contract_violation(
        "janossy_from_correlations: tuple larger than nmax");

  const double z = act.constant_z();
  const double vol = region.volume();
  const double mass = act.mass();
  const int mmax = nmax - k;

  // m-tail: |int_{region^m} rho_{k+m}| <= vol^m z^{k+m} via rho <= prod z.
  const double zk = std::pow(z, k);
  if (zk * poisson_tail(z * vol, mmax) > plan.tol) {
    int m = mmax;
    while (m <= 4000 && zk * poisson_tail(z * vol, m) > plan.tol) ++m;
    throw tail_too_large_error("janossy_from_correlations: m-tail above tol",
                               k + m);
  }

  if (has_hard_overlap(pot, pts)) return {0.0, 0.0, 0};

  const auto xi =
      xi_bruteforce(pot, act, nmax, plan.with_stream(plan.stream + kAuxStream));

  double value = 0.0, var = 0.0, tail_err = 0.0;
  std::uint64_t samples = 0;
  for (int m = 0; m <= mmax; ++m) {
    const int jmax = nmax - k - m;
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    const double row = std::pow(z, k + m) * std::pow(vol, m) /
                       (oracles::factorial(m) * xi.mean);
    for (int j = 0; j <= jmax; ++j) {
      const double coeff =
          sign * row * std::pow(mass, j) / oracles::factorial(j);
      if (m == 0 && j == 0) {
        value += coeff * std::exp(-model::energy(pot, pts));
        continue;
      }
      auto est = quad::mc_estimate(
          plan.with_stream(plan.stream + 1 +
                           static_cast<std::uint64_t>(m) *
                               static_cast<std::uint64_t>(nmax + 1) +
                           static_cast<std::uint64_t>(j)),
          [&, pts](quad::RngStream& rng) {
            TupleBuf buf(pts);
            for (int i = 0; i < m; ++i)
              buf.slots[buf.size++] = quad::sample_uniform(region, rng);
            for (int i = 0; i < j; ++i)
              buf.slots[buf.size++] = quad::sample_point(act, rng);
            return std::exp(-model::energy(
                pot, std::span<const Point>(buf.slots.data(), buf.size)));
          });
      value += coeff * est.mean;
      var += coeff * coeff * est.std_error * est.std_error;
      samples += est.samples;
    }
    // j-tail of this row, bounded by e^{-H} <= 1.
    tail_err += std::abs(row) * poisson_tail(mass, jmax);
  }
  const double err =
      std::sqrt(var) + std::abs(value) * xi.std_error / xi.mean + tail_err;
  return {value, err, samples};
}

quad::McEstimate ks_apply(const PairPotential& pot, const Activity& act,
                          const RhoFn& rho, const Point& x0,
                          std::span<const Point> pts, int kmax,
                          const quad::McPlan& plan) {
  if (kmax < 0) throw contract_violation("ks_apply: kmax < 0");
  const int n = static_cast<int>(pts.size());
  const model::Box& box = act.domain();
  const double vol = box.volume();
  const double zm = max_z(act);

  // Envelope b1 >= int |f(x0, .)| over the box, taken 3 sigma above its MC
  // estimate, feeds the k-tail bound via rho_{n+k} <= zm^{n+k}.
  auto b1 = quad::mc_integrate_box(
      box, 1,
      [&](std::span<const Point> y) {
        return std::abs(model::mayer_f(pot, x0, y[0]));
      },
      plan.with_stream(plan.stream + kAuxStream));
  const double b1_hi = b1.mean + 3.0 * b1.std_error;
  const auto k_tail = [&](int kc) {
    double term = std::pow(zm, n), tail = 0.0;
    for (int k = 1; k <= kc; ++k) term *= zm * b1_hi / k;
    for (int k = kc + 1; k <= kc + 2000; ++k) {
      term *= zm * b1_hi / k;
      tail += term;
      if (k > zm * b1_hi && term < 1e-300) break;
    }
    return tail;
  };
  const double tail = k_tail(kmax);
  if (tail > plan.tol) {
    int k = kmax;
    while (k <= 2000 && k_tail(k) > plan.tol) ++k;
    throw tail_too_large_error("ks_apply: k-tail above tol", k);
  }

  double pref = act.z(x0);
  for (const auto& x : pts) pref *= 1.0 + model::mayer_f(pot, x0, x);
  if (pref == 0.0) return {0.0, 0.0, 0};

  quad::McEstimate base = n == 0 ? quad::McEstimate{1.0, 0.0, 0} : rho(pts);
  double bracket = base.mean;
  double table_err = base.std_error;
  double mc_var = 0.0;
  std::uint64_t samples = 0;

  // Table-driven terms run on one worker so density calls happen in a fixed
  // order regardless of plan.workers.
  std::vector<Point> buf(pts.begin(), pts.end());
  for (int k = 1; k <= kmax; ++k) {
    quad::RngStream rng(plan.seed, plan.stream + static_cast<std::uint64_t>(k));
    quad::Welford value_acc, err_acc;
    buf.resize(static_cast<std::size_t>(n + k));
    for (std::uint64_t s = 0; s < plan.samples; ++s) {
      double w = 1.0;
      for (int i = 0; i < k; ++i) {
        buf[static_cast<std::size_t>(n + i)] = quad::sample_uniform(box, rng);
        w *= model::mayer_f(pot, x0, buf[static_cast<std::size_t>(n + i)]);
      }
      if (w == 0.0) {
        value_acc.add(0.0);
        err_acc.add(0.0);
        continue;
      }
      const auto r = rho(buf);
      value_acc.add(w * r.mean);
      err_acc.add(std::abs(w) * r.std_error);
    }
    const double c = std::pow(vol, k) / oracles::factorial(k);
    bracket += c * value_acc.mean();
    mc_var += c * c * value_acc.std_error() * value_acc.std_error();
    table_err += c * err_acc.mean();
    samples += value_acc.count();
  }
  const double err = std::sqrt(mc_var) + table_err + tail;
  return {pref * bracket, std::abs(pref) * err, samples};
}

ExpansionReport picard_iterate(const PairPotential& pot, const Activity& act,
                               std::span<const Point> pts, int N,
                               const quad::McPlan& plan) {
  const int k = static_cast<int>(pts.size());
  if (k < 1) throw contract_violation("picard_iterate: empty root tuple");
  if (N < 0) throw contract_violation("picard_iterate: N < 0");
  ExpansionReport rep;
  rep.quantity = Quantity::rho;
  rep.truncation_order = N;
  if (k > N) {
    finish_report(rep);
    return rep;
  }
  if (N > kMaxOrder)
    throw size_limit_error("picard_iterate: N above " +
                           std::to_string(kMaxOrder));

  const double pz = prod_z(act, pts);
  rep.orders.push_back(
      {0, {pz * ursell::psi_by_recursion(pot, k, pts), 0.0, 0}});
  for (int m = 1; m <= N - k; ++m) {
    auto est = quad::mc_integrate(
        act, m,
        [&, pts](std::span<const Point> y) {
          TupleBuf buf(pts);
          return ursell::psi_by_recursion(pot, k, buf.with_tail(y));
        },
        plan.with_stream(plan.stream + static_cast<std::uint64_t>(m)));
    const double c = pz / oracles::factorial(m);
    rep.orders.push_back({m, {c * est.mean, c * est.std_error, est.samples}});
  }
  finish_report(rep);
  return rep;
}

}  // namespace mayerkit::expansion
