#include "mayerkit/oracles.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "mayerkit/combinat.hpp"

namespace mayerkit::oracles {

double tonks_config_integral(int n, double sigma, double L) {
  if (n < 0) throw contract_violation("tonks: n must be >= 0");
  if (n == 0) return 1.0;
  const double free_len = L - (n - 1) * sigma;
  if (free_len <= 0.0) return 0.0;
  return std::pow(free_len, n);
}

double tonks_log_xi(double z, double sigma, double L) {
  if (z < 0.0 || sigma <= 0.0 || L <= 0.0)
    throw contract_violation("tonks: need z >= 0, sigma > 0, L > 0");
  double xi = 1.0;
  double zn_over_nfact = 1.0;
  for (int n = 1;; ++n) {
    zn_over_nfact *= z / n;
    const double term = zn_over_nfact * tonks_config_integral(n, sigma, L);
    if (term == 0.0) break;  // free length exhausted, all later terms vanish
    xi += term;
  }
  return std::log(xi);
}

double square_overlap_integral(double L, double r) {
  if (r < 0.0 || r > L)
    throw contract_violation("square_overlap_integral: need 0 <= r <= L");
  return std::numbers::pi * r * r * L * L - (8.0 / 3.0) * r * r * r * L +
         0.5 * r * r * r * r;
}

double segment_overlap_integral(double L, double s) {
  if (s < 0.0 || s > L)
    throw contract_violation("segment_overlap_integral: need 0 <= s <= L");
  return 2.0 * s * L - s * s;
}

double factorial(int n) {
  if (n < 0) throw contract_violation("factorial: n must be >= 0");
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double b = 1.0;
  for (int i = 0; i < k; ++i) b = b * (n - i) / (i + 1);
  return b;
}

double stirling2(int n, int k) {
  if (n < 0 || k < 0) throw contract_violation("stirling2: negative argument");
  if (n == 0 && k == 0) return 1.0;
  if (n == 0 || k == 0 || k > n) return 0.0;
  // S(n, k) = k S(n-1, k) + S(n-1, k-1).
  std::vector<double> row(static_cast<std::size_t>(k) + 1, 0.0);
  row[0] = 1.0;  // S(0, 0)
  for (int i = 1; i <= n; ++i) {
    for (int j = std::min(i, k); j >= 1; --j)
      row[static_cast<std::size_t>(j)] =
          j * row[static_cast<std::size_t>(j)] +
          row[static_cast<std::size_t>(j - 1)];
    row[0] = 0.0;
  }
  return row[static_cast<std::size_t>(k)];
}

std::uint64_t bell_number(int s) {
  if (s < 0) throw contract_violation("bell_number: s must be >= 0");
  if (s > 20) throw size_limit_error("bell_number: s > 20 overflows");
  // Bell triangle.
  std::vector<std::uint64_t> row{1};
  for (int i = 1; i <= s; ++i) {
    std::vector<std::uint64_t> next;
    next.reserve(row.size() + 1);
    next.push_back(row.back());
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    row = std::move(next);
  }
  return row.front();
}

double poisson_moment(double lambda, int j) {
  if (j < 0) throw contract_violation("poisson_moment: j must be >= 0");
  double m = 0.0;
  double lk = 1.0;
  for (int k = 0; k <= j; ++k) {
    if (k > 0) lk *= lambda;
    m += stirling2(j, k) * lk;
  }
  return m;
}

std::vector<double> moments_from_cumulants(const std::vector<double>& kappa) {
  const int n = static_cast<int>(kappa.size());
  std::vector<double> m(kappa.size(), 0.0);
  for (int j = 1; j <= n; ++j) {
    double total = 0.0;
    combinat::PartitionRange parts(j);
    while (auto p = parts.next()) {
      double prod = 1.0;
      for (const auto& blk : p->blocks())
        prod *= kappa[blk.size() - 1];
      total += prod;
    }
    m[static_cast<std::size_t>(j - 1)] = total;
  }
  return m;
}

std::vector<double> cumulants_from_moments(const std::vector<double>& moments) {
  const int n = static_cast<int>(moments.size());
  std::vector<double> k(moments.size(), 0.0);
  for (int i = 1; i <= n; ++i) {
    double acc = moments[static_cast<std::size_t>(i - 1)];
    for (int j = 1; j < i; ++j)
      acc -= binomial(i - 1, j - 1) * k[static_cast<std::size_t>(j - 1)] *
             moments[static_cast<std::size_t>(i - j - 1)];
    k[static_cast<std::size_t>(i - 1)] = acc;
  }
  return k;
}

std::vector<double> pair_count_cumulants(double lambda, int m) {
  if (m < 1 || m > 6)
    throw contract_violation("pair_count_cumulants: need 1 <= m <= 6");
  // X = N^2 - N, so X^j expands into Poisson moments of order up to 2j.
  std::vector<double> xm(static_cast<std::size_t>(m), 0.0);
  for (int j = 1; j <= m; ++j) {
    double s = 0.0;
    for (int i = 0; i <= j; ++i) {
      const double sign = ((j - i) % 2 == 0) ? 1.0 : -1.0;
      s += sign * binomial(j, i) * poisson_moment(lambda, j + i);
    }
    xm[static_cast<std::size_t>(j - 1)] = s;
  }
  return cumulants_from_moments(xm);
}

std::vector<double> complete_bell(const std::vector<double>& a) {
  const int n = static_cast<int>(a.size());
  std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
  b[0] = 1.0;
  // B_{k+1} = sum_{j=0}^{k} C(k, j) A_{j+1} B_{k-j}.
  for (int k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int j = 0; j <= k; ++j)
      acc += binomial(k, j) * a[static_cast<std::size_t>(j)] *
             b[static_cast<std::size_t>(k - j)];
    b[static_cast<std::size_t>(k) + 1] = acc;
  }
  return b;
}

double gamma_p(double s, double x) {
  if (s <= 0.0 || x < 0.0)
    throw contract_violation("gamma_p: need s > 0, x >= 0");
  if (x == 0.0) return 0.0;
  const double log_prefix = s * std::log(x) - x - std::lgamma(s);
  if (x < s + 1.0) {
    // Series: P(s,x) = x^s e^{-x} / Gamma(s) * sum x^k / (s (s+1) ... (s+k)).
    double term = 1.0 / s;
    double sum = term;
    for (int k = 1; k < 500; ++k) {
      term *= x / (s + k);
      sum += term;
      if (term < sum * 1e-16) break;
    }
    return std::exp(log_prefix) * sum;
  }
  // Continued fraction for Q(s,x) (Lentz).
  double b = x + 1.0 - s;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return 1.0 - std::exp(log_prefix) * h;
}

}  // namespace mayerkit::oracles
