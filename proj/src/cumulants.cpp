#include "mayerkit/cumulants.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "mayerkit/combinat.hpp"
#include "mayerkit/errors.hpp"
#include "mayerkit/oracles.hpp"

namespace mayerkit::cumulants {

namespace {

constexpr int kMaxM = 4;
constexpr std::uint64_t kProbeStream = 0xF1DEull;

void check_m(int m) {
  if (m < 1) throw contract_violation("pair cumulants: m < 1");
  if (m > kMaxM)
    throw size_limit_error("pair cumulants: m above " + std::to_string(kMaxM));
}

// Sampled finiteness probe; the integrands cannot throw from worker threads.
void probe_kernel(const Kernel& u, const Activity& act,
                  const quad::McPlan& plan) {
  quad::RngStream rng(plan.seed, plan.stream + kProbeStream);
  for (int i = 0; i < 512; ++i) {
    const auto x = quad::sample_point(act, rng);
    const auto y = quad::sample_point(act, rng);
    if (!std::isfinite(u.u(x, y)))
      throw contract_violation(
          "pair cumulants: kernel not finite at a sampled pair");
  }
}

// Multigraphs with the same pair-multiplicity vector integrate identically;
// collapsing classes turns the per-sample sum over assignments into a sum
// over multisets.
struct EdgePower {
  int i = 0, j = 0, mult = 1;
};

struct WeightClass {
  std::vector<EdgePower> edges;
  double count = 0.0;
};

std::vector<WeightClass> weight_classes(int n, int m,
                                        combinat::MultigraphMode mode) {
  std::map<std::vector<int>, double> by_mult;
  combinat::MultigraphRange range(n, m, mode);
  while (auto g = range.next()) {
    std::vector<int> mult(static_cast<std::size_t>(n * (n - 1) / 2), 0);
    for (int a : g->assignment) ++mult[static_cast<std::size_t>(a)];
    by_mult[mult] += 1.0;
  }
  std::vector<WeightClass> out;
  out.reserve(by_mult.size());
  for (const auto& [mult, count] : by_mult) {
    WeightClass wc;
    wc.count = count;
    for (std::size_t idx = 0; idx < mult.size(); ++idx)
      if (mult[idx] > 0) {
        const auto [i, j] = combinat::pair_from_index(static_cast<int>(idx));
        wc.edges.push_back({i, j, mult[idx]});
      }
    out.push_back(std::move(wc));
  }
  return out;
}

CumulantReport multigraph_report(const Kernel& u, const Activity& act, int m,
                                 const quad::McPlan& plan, bool connected) {
  check_m(m);
  probe_kernel(u, act, plan);
  CumulantReport rep;
  rep.m = m;
  rep.form = Form::multigraph;
  rep.connected = connected;
  const int nmax = connected ? m + 1 : 2 * m;
  double var = 0.0;
  for (int n = 2; n <= nmax; ++n) {
    const auto classes =
        weight_classes(n, m,
                       connected ? combinat::MultigraphMode::connected
                                 : combinat::MultigraphMode::spanning);
    auto est = quad::mc_integrate(
        act, n,
        [&classes, &u](std::span<const model::Point> x) {
          double sum = 0.0;
          for (const auto& wc : classes) {
            double w = wc.count;
            for (const auto& e : wc.edges) {
              const double uv = u.u(x[static_cast<std::size_t>(e.i)],
                                    x[static_cast<std::size_t>(e.j)]);
              if (uv == 0.0) {
                w = 0.0;
                break;
              }
              for (int p = 0; p < e.mult; ++p) w *= uv;
            }
            sum += w;
          }
          return sum;
        },
        plan.with_stream(plan.stream + static_cast<std::uint64_t>(n)));
    const double c = 1.0 / oracles::factorial(n);
    rep.per_n.push_back({n, {c * est.mean, c * est.std_error, est.samples}});
    rep.value += c * est.mean;
    var += c * c * est.std_error * est.std_error;
  }
  rep.std_error = std::sqrt(var);
  return rep;
}

}  // namespace

CumulantReport moment_multigraph(const Kernel& u, const Activity& act, int m,
                                 const quad::McPlan& plan) {
  return multigraph_report(u, act, m, plan, /*connected=*/false);
}

CumulantReport cumulant_multigraph(const Kernel& u, const Activity& act, int m,
                                   const quad::McPlan& plan) {
  return multigraph_report(u, act, m, plan, /*connected=*/true);
}

CumulantReport cumulant_partition_pairs(const Kernel& u, const Activity& act,
                                        int m, const quad::McPlan& plan) {
  check_m(m);
  probe_kernel(u, act, plan);
  CumulantReport rep;
  rep.m = m;
  rep.form = Form::partition_pairs;
  rep.connected = true;

  // Slot-pair lists grouped by block count.
  std::vector<std::vector<std::vector<std::pair<int, int>>>> by_n(
      static_cast<std::size_t>(m) + 2);
  combinat::NonflatConnectedPairRange sigmas(m);
  while (auto sigma = sigmas.next()) {
    std::vector<std::pair<int, int>> slots;
    slots.reserve(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a)
      slots.emplace_back(sigma->block_of[static_cast<std::size_t>(2 * a)],
                         sigma->block_of[static_cast<std::size_t>(2 * a + 1)]);
    by_n[static_cast<std::size_t>(sigma->block_count())].push_back(
        std::move(slots));
  }

  double var = 0.0;
  for (int n = 2; n <= m + 1; ++n) {
    const auto& group = by_n[static_cast<std::size_t>(n)];
    if (group.empty()) continue;
    std::vector<std::vector<int>> perms;
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    do {
      perms.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    const double inv_fact = 1.0 / oracles::factorial(n);

    auto est = quad::mc_integrate(
        act, n,
        [&group, &perms, &u, inv_fact](std::span<const model::Point> x) {
          double sum = 0.0;
          for (const auto& slots : group)
            for (const auto& lab : perms) {
              double w = 1.0;
              for (const auto& [b1, b2] : slots) {
                w *= u.u(x[static_cast<std::size_t>(
                             lab[static_cast<std::size_t>(b1)])],
                         x[static_cast<std::size_t>(
                             lab[static_cast<std::size_t>(b2)])]);
                if (w == 0.0) break;
              }
              sum += w;
            }
          return sum * inv_fact;
        },
        plan.with_stream(plan.stream + static_cast<std::uint64_t>(n)));
    rep.per_n.push_back({n, est});
    rep.value += est.mean;
    var += est.std_error * est.std_error;
  }
  rep.std_error = std::sqrt(var);
  return rep;
}

EmpiricalCumulants empirical_cumulants(const Kernel& u, const Activity& act,
                                       int m, const quad::McPlan& plan) {
  check_m(m);
  if (plan.samples < 1000)
    throw contract_violation("empirical_cumulants: needs at least 1000 trials");
  probe_kernel(u, act, plan);

  const std::uint64_t trials = plan.samples;
  std::vector<double> xs(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    quad::RngStream rng(plan.seed, plan.stream + t);
    const auto cfg = quad::sample_poisson_configuration(act, rng);
    double x = 0.0;
    for (std::size_t i = 0; i < cfg.size(); ++i)
      for (std::size_t j = i + 1; j < cfg.size(); ++j)
        x += 2.0 * u.u(cfg[i], cfg[j]);
    if (!std::isfinite(x))
      throw contract_violation(
          "empirical_cumulants: infinite pair sum in a sampled configuration");
    xs[t] = x;
  }

  const double nd = static_cast<double>(trials);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= nd;

  // Centered power sums; delete-1 updates stay numerically tame because the
  // global center is subtracted first.
  double s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (double x : xs) {
    const double y = x - mean;
    s2 += y * y;
    s3 += y * y * y;
    s4 += y * y * y * y;
  }

  // k-statistics from centered sums over N values.
  const auto kstats = [m](double mu, double s2v, double s3v, double s4v,
                          double n) {
    std::vector<double> k;
    k.push_back(mu);
    if (m >= 2) k.push_back(s2v / (n - 1.0));
    if (m >= 3) k.push_back(n * s3v / ((n - 1.0) * (n - 2.0)));
    if (m >= 4)
      k.push_back((n * (n + 1.0) * s4v - 3.0 * (n - 1.0) * s2v * s2v) /
                  ((n - 1.0) * (n - 2.0) * (n - 3.0)));
    return k;
  };

  EmpiricalCumulants out;
  out.trials = trials;
  out.k = kstats(mean, s2, s3, s4, nd);

  // Delete-1 jackknife through the centered-sum update identities.
  std::vector<std::vector<double>> loo(static_cast<std::size_t>(m));
  for (auto& v : loo) v.reserve(trials);
  const double np = nd - 1.0;
  for (double x : xs) {
    const double d = x - mean;
    const double mu_shift = -d / np;  // new center relative to the old one
    const double s2i = s2 - d * d - d * d / np;
    const double s3i = s3 - d * d * d - 3.0 * mu_shift * (s2 - d * d) +
                       3.0 * mu_shift * mu_shift * (-d) -
                       np * std::pow(mu_shift, 3);
    const double s4i = s4 - d * d * d * d - 4.0 * mu_shift * (s3 - d * d * d) +
                       6.0 * mu_shift * mu_shift * (s2 - d * d) -
                       4.0 * std::pow(mu_shift, 3) * (-d) +
                       np * std::pow(mu_shift, 4);
    const auto ki = kstats(mean + mu_shift, s2i, s3i, s4i, np);
    for (int r = 0; r < m; ++r)
      loo[static_cast<std::size_t>(r)].push_back(ki[static_cast<std::size_t>(r)]);
  }
  out.std_error.resize(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) {
    const auto& v = loo[static_cast<std::size_t>(r)];
    double lm = 0.0;
    for (double q : v) lm += q;
    lm /= nd;
    double ss = 0.0;
    for (double q : v) ss += (q - lm) * (q - lm);
    out.std_error[static_cast<std::size_t>(r)] = std::sqrt(np / nd * ss);
  }
  return out;
}

}  // namespace mayerkit::cumulants
