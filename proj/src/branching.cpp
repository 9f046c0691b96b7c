#include "mayerkit/branching.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mayerkit/converge.hpp"
#include "mayerkit/errors.hpp"

namespace mayerkit::branching {

namespace {

constexpr std::uint64_t kGenerationCap = 10000;
constexpr std::uint64_t kPopulationCap = 1000000;

// Kahan-compensated accumulator for the long Borel sums.
struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

BranchingSpec from_model(const PairPotential& pot, const Activity& act,
                         const quad::McPlan& plan) {
  if (!act.is_constant())
    throw unsupported_error("branching spec: constant activity only");
  const Point x0 = act.domain().center();
  const auto v1 = converge::packing_integrals(pot, x0, 1, plan)[0];
  BranchingSpec spec;
  spec.z = act.constant_z();
  spec.b = v1.mean;
  spec.mu = spec.z * spec.b;
  return spec;
}

double extinction_fixed_point(double mu) {
  if (mu < 0.0) throw contract_violation("extinction_fixed_point: mu < 0");
  if (mu <= 1.0) return 1.0;
  double p = 0.0;
  for (int it = 0; it < 1000000; ++it) {
    const double next = std::exp(mu * (p - 1.0));
    if (next < p - 1e-15)
      throw contract_violation("extinction_fixed_point: iterates not monotone");
    if (std::abs(next - p) <= 1e-15) return next;
    p = next;
  }
  return p;
}

quad::McEstimate extinction_probability(const BranchingSpec& spec,
                                        ExtinctionMethod method,
                                        const quad::McPlan& plan) {
  if (method == ExtinctionMethod::fixed_point)
    return {extinction_fixed_point(spec.mu), 0.0, 0};
  const double mu = spec.mu;
  return quad::mc_estimate(plan, [mu](quad::RngStream& rng) {
    std::uint64_t pop = 1;
    for (std::uint64_t gen = 0; gen < kGenerationCap; ++gen) {
      pop = quad::sample_poisson(rng, mu * static_cast<double>(pop));
      if (pop == 0) return 1.0;
      if (pop > kPopulationCap) return 0.0;
    }
    return 0.0;
  });
}

double borel_pmf(double mu, std::uint64_t n) {
  if (mu < 0.0) throw contract_violation("borel_pmf: mu < 0");
  if (n < 1) throw contract_violation("borel_pmf: n < 1");
  if (n == 1) return std::exp(-mu);
  if (mu == 0.0) return 0.0;
  const double nd = static_cast<double>(n);
  if (n <= 50) {
    double v = std::exp(-mu * nd);
    for (std::uint64_t k = 2; k <= n; ++k)
      v *= mu * nd / static_cast<double>(k);
    return v;
  }
  return std::exp((nd - 1.0) * std::log(mu * nd) - mu * nd -
                  std::lgamma(nd + 1.0));
}

double borel_total_mass(double mu) {
  if (mu < 0.0 || mu > 1.0)
    throw contract_violation("borel_total_mass: mu outside [0, 1]");
  Kahan acc;
  if (mu < 1.0) {
    // P(n+1)/P(n) = mu e^{-mu} (1+1/n)^{n-1} < r = mu e^{1-mu}, so the
    // remainder past n is below P(n) r / (1 - r).
    const double r = mu * std::exp(1.0 - mu);
    for (std::uint64_t n = 1; n <= 100000000ull; ++n) {
      const double p = borel_pmf(mu, n);
      acc.add(p);
      if (p * r / (1.0 - r) < 1e-13) return acc.sum;
    }
    throw contract_violation("borel_total_mass: ratio tail did not close");
  }
  // mu = 1: P(n) = n^{-3/2} (2 pi)^{-1/2} e^{-theta(n)} with theta the
  // Stirling correction; sum directly to N, then the expansion
  // e^{-theta} = 1 - 1/(12n) + 1/(288 n^2) + 1/(360 n^3) + O(n^-4) turns the
  // remainder into Hurwitz zeta tails handled by Euler-Maclaurin.
  const std::uint64_t big_n = 10000000;
  for (std::uint64_t n = 1; n <= big_n; ++n) acc.add(borel_pmf(1.0, n));
  const double a = static_cast<double>(big_n) + 1.0;
  const auto zeta_tail = [a](double s) {
    return std::pow(a, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(a, -s) +
           s * std::pow(a, -s - 1.0) / 12.0 -
           s * (s + 1.0) * (s + 2.0) * std::pow(a, -s - 3.0) / 720.0;
  };
  const double tail =
      (zeta_tail(1.5) - zeta_tail(2.5) / 12.0 + zeta_tail(3.5) / 288.0 +
       zeta_tail(4.5) / 360.0) /
      std::sqrt(2.0 * M_PI);
  return acc.sum + tail;
}

std::vector<double> borel_cdf_table(double mu, std::uint64_t nmax) {
  if (nmax < 1) throw contract_violation("borel_cdf_table: nmax < 1");
  std::vector<double> cdf(nmax);
  Kahan acc;
  for (std::uint64_t n = 1; n <= nmax; ++n) {
    acc.add(borel_pmf(mu, n));
    cdf[n - 1] = std::min(acc.sum, 1.0);
  }
  return cdf;
}

ProgenyGf total_progeny_gf(double mu, int N) {
  if (mu < 0.0) throw contract_violation("total_progeny_gf: mu < 0");
  if (N < 2) throw contract_violation("total_progeny_gf: N < 2");
  ProgenyGf out;
  out.terms = N;
  Kahan acc;
  double prev = 0.0, last = 0.0;
  for (int n = 1; n <= N; ++n) {
    const double nd = static_cast<double>(n);
    const double term =
        n == 1 ? 1.0
               : std::exp((nd - 1.0) * std::log(mu * nd) -
                          std::lgamma(nd + 1.0));
    acc.add(term);
    prev = last;
    last = term;
  }
  out.value = acc.sum;
  out.diverged = mu > 0.0 && last >= prev;
  return out;
}

std::uint64_t sample_gw_progeny(quad::RngStream& rng, double mu,
                                std::uint64_t cap) {
  std::uint64_t total = 1, pending = 1;
  while (pending > 0) {
    if (total >= cap) return cap;
    const std::uint64_t children =
        quad::sample_poisson(rng, mu * static_cast<double>(pending));
    total += children;
    pending = children;
  }
  return std::min(total, cap);
}

RcmClusterReport rcm_cluster(const PairPotential& pot, const Activity& act,
                             const Point& q, std::uint64_t trials,
                             std::uint64_t cap, const quad::McPlan& plan) {
  if (trials < 1) throw contract_violation("rcm_cluster: trials < 1");
  if (cap < 1) throw contract_violation("rcm_cluster: cap < 1");
  const model::Box& box = act.domain();
  if (!box.contains(q))
    throw contract_violation("rcm_cluster: q outside the domain");
  double min_side = std::numeric_limits<double>::infinity();
  for (int d = 0; d < box.dim; ++d)
    min_side = std::min(min_side, box.upper[static_cast<std::size_t>(d)] -
                                      box.lower[static_cast<std::size_t>(d)]);
  if (std::isfinite(pot.range()) && min_side < 20.0 * pot.range())
    throw contract_violation(
        "rcm_cluster: domain side below 20 interaction ranges");

  RcmClusterReport rep;
  rep.cap = cap;
  rep.sizes.reserve(trials);
  std::uint64_t hits = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    quad::RngStream cloud(plan.seed, plan.stream + 2 * trial);
    const quad::RngStream coins(plan.seed, plan.stream + 2 * trial + 1);
    const auto cfg = quad::sample_poisson_configuration(act, cloud);

    // Vertex 0 is q; cloud points are 1..N.  Unordered pair (a < b) takes
    // the keyed coin at id b(b-1)/2 + a.
    const std::size_t npts = cfg.size();
    std::vector<char> visited(npts + 1, 0);
    std::vector<std::size_t> frontier{0};
    visited[0] = 1;
    std::uint64_t size = 1;
    const auto point_at = [&](std::size_t v) -> const Point& {
      return v == 0 ? q : cfg[v - 1];
    };
    while (!frontier.empty() && size < cap) {
      std::vector<std::size_t> next;
      for (std::size_t u : frontier) {
        for (std::size_t v = 1; v <= npts && size < cap; ++v) {
          if (visited[v]) continue;
          const std::size_t a = std::min(u, v), b = std::max(u, v);
          const std::uint64_t pair_id = b * (b - 1) / 2 + a;
          const double p =
              std::abs(model::mayer_f(pot, point_at(u), point_at(v)));
          if (coins.double_at(pair_id) < p) {
            visited[v] = 1;
            next.push_back(v);
            ++size;
          }
        }
        if (size >= cap) break;
      }
      frontier = std::move(next);
    }
    if (size >= cap) {
      size = cap;
      ++hits;
    }
    rep.sizes.push_back(size);
  }
  rep.cap_fraction =
      static_cast<double>(hits) / static_cast<double>(trials);
  return rep;
}

}  // namespace mayerkit::branching
