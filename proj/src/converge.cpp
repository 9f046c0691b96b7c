#include "mayerkit/converge.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mayerkit/errors.hpp"
#include "mayerkit/oracles.hpp"

namespace mayerkit::converge {

namespace {

constexpr double kGridLo = 0.01;
constexpr double kGridHi = 10.0;
constexpr int kGridPoints = 200;

void require_constant(const Activity& act, const char* who) {
  if (!act.is_constant())
    throw unsupported_error(std::string(who) + ": constant activity only");
}

// Plain-Lebesgue integral of |f(x0, .)|; closed form for hard spheres,
// ball-restricted MC otherwise (f vanishes beyond the range).
quad::McEstimate pinned_f_mass(const PairPotential& pot, const Point& x0,
                               const quad::McPlan& plan) {
  if (pot.is_hard_sphere())
    return {quad::ball_volume(x0.dim, pot.hard_sphere_radius()), 0.0, 0};
  const double r = pot.range();
  if (!std::isfinite(r))
    throw unsupported_error("pinned integrals need a finite-range potential");
  return quad::mc_integrate_ball(
      x0, r, 1,
      [&](std::span<const Point> y) {
        return std::abs(model::mayer_f(pot, x0, y[0]));
      },
      plan);
}

// Maximizes margin(a) over the log grid, then golden-section refinement on
// the bracketing interval.
template <typename MarginFn>
double best_a(const MarginFn& margin) {
  const double step = std::log(kGridHi / kGridLo) / (kGridPoints - 1);
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < kGridPoints; ++i) {
    const double a = kGridLo * std::exp(step * i);
    const double m = margin(a);
    if (m > best_val) {
      best_val = m;
      best = i;
    }
  }
  double lo = kGridLo * std::exp(step * std::max(0, best - 1));
  double hi = kGridLo * std::exp(step * std::min(kGridPoints - 1, best + 1));
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = margin(x1), f2 = margin(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = margin(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = margin(x1);
    }
  }
  return 0.5 * (lo + hi);
}

struct FpData {
  std::vector<quad::McEstimate> v;  // V_1..V_kmax
  bool complete = false;            // sum saturates the packing order
  std::uint64_t samples = 0;
};

FpData fp_data(const PairPotential& pot, const Point& x0, int kmax,
               const quad::McPlan& plan) {
  FpData d;
  if (kmax <= 0) kmax = packing_kmax(x0.dim);
  d.v = packing_integrals(pot, x0, kmax, plan);
  d.complete = pot.is_hard_sphere() && kmax >= packing_kmax(x0.dim);
  for (const auto& e : d.v) d.samples += e.samples;
  return d;
}

// lhs of the pinned-cluster condition at activity z; incomplete sums get the
// k-tail added via V_k <= V_1^k.
double fp_lhs(const FpData& d, double z, double a, double t) {
  double lhs = 0.0;
  const double x = z * std::exp(a + t);
  double coeff = 1.0;
  for (std::size_t k = 1; k <= d.v.size(); ++k) {
    coeff *= x / static_cast<double>(k);
    lhs += coeff * d.v[k - 1].mean;
  }
  if (!d.complete) {
    const double v1 = d.v[0].mean + 3.0 * d.v[0].std_error;
    double term = 1.0;
    for (std::size_t k = 1; k <= d.v.size(); ++k)
      term *= x * v1 / static_cast<double>(k);
    for (std::size_t k = d.v.size() + 1; k <= d.v.size() + 500; ++k) {
      term *= x * v1 / static_cast<double>(k);
      lhs += term;
      if (static_cast<double>(k) > x * v1 && term < 1e-300) break;
    }
  }
  return lhs;
}

ConvergenceCertificate make_cert(Condition c, double a, double t, double lhs,
                                 double rhs, int kmax,
                                 const quad::McPlan& plan,
                                 std::uint64_t samples) {
  ConvergenceCertificate cert;
  cert.condition = c;
  cert.a = a;
  cert.t = t;
  cert.lhs = lhs;
  cert.rhs = rhs;
  cert.margin = rhs - lhs;
  cert.satisfied = lhs <= rhs;
  cert.kmax_used = kmax;
  cert.seed = plan.seed;
  cert.samples = samples;
  return cert;
}

}  // namespace

int packing_kmax(int dim) {
  switch (dim) {
    case 1:
      return 2;
    case 2:
      return 5;
    case 3:
      return 12;
    default:
      throw contract_violation("packing_kmax: dim outside 1..3");
  }
}

ConvergenceCertificate check_kpu(const PairPotential& pot, const Activity& act,
                                 double a, double t, const quad::McPlan& plan) {
  require_constant(act, "check_kpu");
  if (a <= 0.0) throw contract_violation("check_kpu: a <= 0");
  const Point x0 = act.domain().center();
  const auto b = pinned_f_mass(pot, x0, plan);
  const double lhs = std::exp(t + a) * act.constant_z() * b.mean;
  return make_cert(Condition::kpu, a, t, lhs, a, 1, plan, b.samples);
}

std::vector<quad::McEstimate> packing_integrals(const PairPotential& pot,
                                                const Point& x0, int kmax,
                                                const quad::McPlan& plan) {
  if (kmax < 1) throw contract_violation("packing_integrals: kmax < 1");
  const double r = pot.range();
  if (!std::isfinite(r))
    throw unsupported_error("pinned integrals need a finite-range potential");
  std::vector<quad::McEstimate> out;
  for (int k = 1; k <= kmax; ++k) {
    if (k == 1) {
      out.push_back(pinned_f_mass(
          pot, x0, plan.with_stream(plan.stream + static_cast<std::uint64_t>(k))));
      continue;
    }
    out.push_back(quad::mc_integrate_ball(
        x0, r, k,
        [&](std::span<const Point> y) {
          double w = 1.0;
          for (const auto& p : y) {
            w *= std::abs(model::mayer_f(pot, x0, p));
            if (w == 0.0) return 0.0;
          }
          for (std::size_t i = 0; i < y.size(); ++i)
            for (std::size_t j = i + 1; j < y.size(); ++j) {
              w *= 1.0 + model::mayer_f(pot, y[i], y[j]);
              if (w == 0.0) return 0.0;
            }
          return w;
        },
        plan.with_stream(plan.stream + static_cast<std::uint64_t>(k))));
  }
  return out;
}

ConvergenceCertificate check_fp(const PairPotential& pot, const Activity& act,
                                double a, double t, int kmax,
                                const quad::McPlan& plan) {
  require_constant(act, "check_fp");
  if (a <= 0.0) throw contract_violation("check_fp: a <= 0");
  const Point x0 = act.domain().center();
  const auto d = fp_data(pot, x0, kmax, plan);
  const double lhs = fp_lhs(d, act.constant_z(), a, t);
  return make_cert(Condition::fp, a, t, lhs, std::expm1(a),
                   static_cast<int>(d.v.size()), plan, d.samples);
}

ConvergenceCertificate check_py(const model::Kernel& u, const Activity& act,
                                const std::function<double(const Point&)>& B,
                                double a, const quad::McPlan& plan) {
  require_constant(act, "check_py");
  if (a <= 0.0) throw contract_violation("check_py: a <= 0");
  const Point x0 = act.domain().center();
  auto est = quad::mc_integrate(
      act, 1,
      [&](std::span<const Point> y) {
        const double uu = std::abs(u.u(x0, y[0]));
        const double g = std::isinf(uu) ? 1.0 : -std::expm1(-uu);
        return g * std::exp(B(y[0]) + a);
      },
      plan);
  return make_cert(Condition::py, a, 0.0, est.mean, a, 0, plan, est.samples);
}

ConvergenceCertificate optimize_witness(const PairPotential& pot,
                                        const Activity& act, Condition cond,
                                        double t, int kmax,
                                        const quad::McPlan& plan) {
  require_constant(act, "optimize_witness");
  const Point x0 = act.domain().center();
  const double z = act.constant_z();
  if (cond == Condition::kpu) {
    const auto b = pinned_f_mass(pot, x0, plan);
    const auto margin = [&](double a) {
      return a - std::exp(t + a) * z * b.mean;
    };
    const double a = best_a(margin);
    return make_cert(Condition::kpu, a, t, std::exp(t + a) * z * b.mean, a, 1,
                     plan, b.samples);
  }
  if (cond == Condition::fp) {
    const auto d = fp_data(pot, x0, kmax, plan);
    const auto margin = [&](double a) {
      return std::expm1(a) - fp_lhs(d, z, a, t);
    };
    const double a = best_a(margin);
    return make_cert(Condition::fp, a, t, fp_lhs(d, z, a, t), std::expm1(a),
                     static_cast<int>(d.v.size()), plan, d.samples);
  }
  throw unsupported_error("optimize_witness: witness search covers kpu and fp");
}

double critical_activity(const PairPotential& pot, int dim, Condition cond,
                         double t, int kmax, const quad::McPlan& plan) {
  if (dim < 1 || dim > 3)
    throw contract_violation("critical_activity: dim outside 1..3");
  Point x0;
  x0.dim = dim;

  std::function<double(double)> max_margin;
  if (cond == Condition::kpu) {
    const auto b = pinned_f_mass(pot, x0, plan);
    max_margin = [&, b](double z) {
      const auto margin = [&](double a) {
        return a - std::exp(t + a) * z * b.mean;
      };
      return margin(best_a(margin));
    };
  } else if (cond == Condition::fp) {
    const auto d = fp_data(pot, x0, kmax, plan);
    max_margin = [&, d](double z) {
      const auto margin = [&](double a) {
        return std::expm1(a) - fp_lhs(d, z, a, t);
      };
      return margin(best_a(margin));
    };
  } else {
    throw unsupported_error("critical_activity: covers kpu and fp");
  }

  double lo = 0.0, hi = 1e-6;
  int guard = 0;
  while (max_margin(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++guard > 200)
      throw contract_violation("critical_activity: no finite threshold found");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (max_margin(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TreeGf tree_gf(const PairPotential& pot, const Activity& act,
               TreeVariant variant, const quad::McPlan& plan, int max_iter) {
  require_constant(act, "tree_gf");
  const Point x0 = act.domain().center();
  const double z = act.constant_z();
  const double ceiling = 1e6 * std::max(z, 1e-300);

  std::function<double(double)> step;
  if (variant == TreeVariant::plain) {
    const auto b = pinned_f_mass(pot, x0, plan);
    step = [z, b](double s) { return z * std::exp(b.mean * s); };
  } else {
    const auto d = fp_data(pot, x0, 0, plan);
    step = [z, d](double s) {
      double sum = 1.0, sk = 1.0;
      for (std::size_t k = 1; k <= d.v.size(); ++k) {
        sk *= s / static_cast<double>(k);
        sum += sk * d.v[k - 1].mean;
      }
      return z * sum;
    };
  }

  TreeGf out;
  double s = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const double next = step(s);
    if (!(next >= s - 1e-12 * std::abs(s)))
      throw contract_violation("tree_gf: iterates not monotone");
    out.iterations = it;
    if (next > ceiling) {
      out.value = next;
      out.diverged = true;
      return out;
    }
    if (std::abs(next - s) <= 1e-13 * std::max(1.0, std::abs(next))) {
      out.value = next;
      return out;
    }
    s = next;
  }
  out.value = s;
  return out;
}

std::vector<double> tree_series(const PairPotential& pot, const Activity& act,
                                int N, const quad::McPlan& plan) {
  require_constant(act, "tree_series");
  if (N < 1) throw contract_violation("tree_series: N < 1");
  const Point x0 = act.domain().center();
  const double z = act.constant_z();
  const auto d = fp_data(pot, x0, 0, plan);
  const int kp = static_cast<int>(d.v.size());

  std::vector<double> t(static_cast<std::size_t>(N) + 1, 0.0);
  t[1] = z;
  // comp[k][s] = sum over compositions of s into k parts of prod t_parts,
  // rebuilt as each t_n becomes available.
  for (int n = 2; n <= N; ++n) {
    const int s = n - 1;
    std::vector<std::vector<double>> comp(
        static_cast<std::size_t>(kp) + 1,
        std::vector<double>(static_cast<std::size_t>(s) + 1, 0.0));
    for (int i = 1; i <= s; ++i) comp[1][static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)];
    for (int k = 2; k <= kp; ++k)
      for (int m = k; m <= s; ++m) {
        double acc = 0.0;
        for (int i = 1; i <= m - k + 1; ++i)
          acc += t[static_cast<std::size_t>(i)] *
                 comp[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m - i)];
        comp[static_cast<std::size_t>(k)][static_cast<std::size_t>(m)] = acc;
      }
    double sum = 0.0;
    for (int k = 1; k <= std::min(kp, s); ++k)
      sum += d.v[static_cast<std::size_t>(k - 1)].mean /
             oracles::factorial(k) *
             comp[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
    t[static_cast<std::size_t>(n)] = z * sum;
  }
  t.erase(t.begin());
  return t;
}

double forest_picard(const PairPotential& pot, const Activity& act, int k,
                     int N, const quad::McPlan& plan) {
  if (k < 1) throw contract_violation("forest_picard: k < 1");
  if (N < k) return 0.0;
  const auto t = tree_series(pot, act, N, plan);
  // conv[j][s] = sum over (n_1..n_j), n_i >= 1, sum = s, of prod t_{n_i}.
  std::vector<std::vector<double>> conv(
      static_cast<std::size_t>(k) + 1,
      std::vector<double>(static_cast<std::size_t>(N) + 1, 0.0));
  conv[0][0] = 1.0;
  for (int j = 1; j <= k; ++j)
    for (int s = j; s <= N; ++s) {
      double acc = 0.0;
      for (int i = 1; i <= s - j + 1; ++i)
        acc += t[static_cast<std::size_t>(i - 1)] *
               conv[static_cast<std::size_t>(j - 1)][static_cast<std::size_t>(s - i)];
      conv[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = acc;
    }
  double out = 0.0;
  for (int s = k; s <= N; ++s)
    out += conv[static_cast<std::size_t>(k)][static_cast<std::size_t>(s)];
  return out;
}

double cumulant_bound(const ConvergenceCertificate& cert, double mass,
                      int ell) {
  if (ell < 1) throw contract_violation("cumulant_bound: ell < 1");
  if (!(cert.satisfied && cert.t > 0.0))
    throw unsupported_error(
        "cumulant_bound: needs a satisfied certificate with t > 0");
  return oracles::factorial(ell) / std::pow(cert.t, ell) * mass;
}

}  // namespace mayerkit::converge
