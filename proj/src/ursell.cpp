#include "mayerkit/ursell.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

namespace mayerkit::ursell {

namespace {

constexpr std::uint64_t kKahanThreshold = 10000;

// Compensated accumulator engaged for long graph sums.
struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double x) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

int check_tuple(std::span<const Point> pts, const char* what) {
  if (pts.empty()) throw contract_violation(std::string(what) + ": empty tuple");
  if (pts.size() > 16)
    throw contract_violation(std::string(what) + ": tuple too large");
  return static_cast<int>(pts.size());
}

double masked_product(const std::vector<double>& fm, std::uint64_t mask) {
  double w = 1.0;
  while (mask != 0) {
    const int b = std::countr_zero(mask);
    mask &= mask - 1;
    w *= fm[static_cast<std::size_t>(b)];
    if (w == 0.0 && mask != 0) return 0.0;
  }
  return w;
}

}  // namespace

std::vector<double> f_matrix(const PairPotential& pot,
                             std::span<const Point> pts) {
  const int n = static_cast<int>(pts.size());
  std::vector<double> fm(static_cast<std::size_t>(n * (n - 1) / 2));
  for (int j = 1; j < n; ++j)
    for (int i = 0; i < j; ++i)
      fm[static_cast<std::size_t>(combinat::pair_index(i, j))] =
          model::mayer_f(pot, pts[static_cast<std::size_t>(i)],
                         pts[static_cast<std::size_t>(j)]);
  return fm;
}

double graph_weight(const PairPotential& pot, const combinat::Graph& g,
                    std::span<const Point> pts) {
  if (static_cast<int>(pts.size()) != g.n)
    throw contract_violation("graph_weight: tuple size != graph order");
  double w = 1.0;
  for (int j = 1; j < g.n && w != 0.0; ++j)
    for (int i = 0; i < j; ++i)
      if (g.has_edge(i, j))
        w *= model::mayer_f(pot, pts[static_cast<std::size_t>(i)],
                            pts[static_cast<std::size_t>(j)]);
  return w;
}

WeightedSum ursell(const PairPotential& pot, std::span<const Point> pts) {
  const int n = check_tuple(pts, "ursell");
  WeightedSum out;
  out.n = n;
  out.k = 1;
  if (n == 1) {
    out.value = 1.0;
    out.terms = 1;
    return out;
  }
  MultirootedSumEvaluator ev(1, n);
  out.value = ev.eval(pot, pts);
  out.terms = ev.terms();
  return out;
}

WeightedSum psi(const PairPotential& pot, int k, std::span<const Point> pts) {
  const int n = check_tuple(pts, "psi");
  if (k < 1 || k > n) throw contract_violation("psi: need 1 <= k <= n");
  WeightedSum out;
  out.n = n;
  out.k = k;
  if (k == n) {
    // All graphs: sum of products of f over edge subsets factorizes into
    // prod_{i<j} (1 + f) = e^{-H}.
    double w = 1.0;
    const auto fm = f_matrix(pot, pts);
    for (double f : fm) w *= 1.0 + f;
    out.value = w;
    out.terms = 1ULL << (n * (n - 1) / 2);
    return out;
  }
  MultirootedSumEvaluator ev(k, n);
  out.value = ev.eval(pot, pts);
  out.terms = ev.terms();
  return out;
}

double fp_tree_weight(const PairPotential& pot, const combinat::Graph& tree,
                      int root, std::span<const Point> pts) {
  const int n = static_cast<int>(pts.size());
  if (tree.n != n)
    throw contract_violation("fp_tree_weight: tuple size != tree order");
  if (root < 0 || root >= n)
    throw contract_violation("fp_tree_weight: root out of range");
  if (!combinat::is_tree(tree))
    throw contract_violation("fp_tree_weight: graph is not a tree");

  const auto adj = combinat::adjacency(tree);
  const auto fm = f_matrix(pot, pts);
  auto f = [&](int i, int j) {
    return fm[static_cast<std::size_t>(
        i < j ? combinat::pair_index(i, j) : combinat::pair_index(j, i))];
  };

  // Root orientation by BFS; children of v are its neighbours away from the
  // root.
  std::vector<int> order{root}, parent(static_cast<std::size_t>(n), -1);
  order.reserve(static_cast<std::size_t>(n));
  for (std::size_t h = 0; h < order.size(); ++h) {
    const int v = order[h];
    std::uint32_t nb = adj[static_cast<std::size_t>(v)];
    while (nb != 0) {
      const int u = std::countr_zero(nb);
      nb &= nb - 1;
      if (u == parent[static_cast<std::size_t>(v)] || u == root) continue;
      if (parent[static_cast<std::size_t>(u)] == -1 && u != root) {
        parent[static_cast<std::size_t>(u)] = v;
        order.push_back(u);
      }
    }
  }

  double w = 1.0;
  for (int v : order) {
    std::vector<int> children;
    std::uint32_t nb = adj[static_cast<std::size_t>(v)];
    while (nb != 0) {
      const int u = std::countr_zero(nb);
      nb &= nb - 1;
      if (parent[static_cast<std::size_t>(u)] == v) children.push_back(u);
    }
    for (std::size_t a = 0; a < children.size(); ++a) {
      w *= std::abs(f(v, children[a]));
      for (std::size_t b = a + 1; b < children.size(); ++b)
        w *= 1.0 + f(children[a], children[b]);
    }
    if (w == 0.0) return 0.0;
  }
  return w;
}

namespace {

struct RecState {
  const std::vector<double>* fm;
  std::unordered_map<std::uint64_t, double> memo;
};

double psi_rec(RecState& st, std::uint32_t I, std::uint32_t J) {
  if (I == 0) return J == 0 ? 1.0 : 0.0;
  const std::uint64_t key =
      (static_cast<std::uint64_t>(I) << 32) | static_cast<std::uint64_t>(J);
  if (auto it = st.memo.find(key); it != st.memo.end()) return it->second;

  const int iota = std::countr_zero(I);
  const std::uint32_t Iprime = I & (I - 1);
  const std::uint32_t Jprime = J & ~(1u << iota);
  auto f = [&](int i, int j) {
    return (*st.fm)[static_cast<std::size_t>(
        i < j ? combinat::pair_index(i, j) : combinat::pair_index(j, i))];
  };

  double prefix = 1.0;
  for (std::uint32_t m = Iprime; m != 0; m &= m - 1)
    prefix *= 1.0 + f(iota, std::countr_zero(m));

  double total = 0.0;
  if (prefix != 0.0) {
    const std::uint32_t free = J & ~I;
    // All subsets L of the non-root vertices; the smallest root adopts L.
    for (std::uint32_t L = free;; L = (L - 1) & free) {
      double w = 1.0;
      for (std::uint32_t m = L; m != 0 && w != 0.0; m &= m - 1)
        w *= f(iota, std::countr_zero(m));
      if (w != 0.0) total += w * psi_rec(st, Iprime | L, Jprime);
      if (L == 0) break;
    }
    total *= prefix;
  }
  st.memo.emplace(key, total);
  return total;
}

}  // namespace

double psi_by_recursion(const PairPotential& pot, std::uint32_t root_mask,
                        std::uint32_t vertex_mask, std::span<const Point> pts) {
  check_tuple(pts, "psi_by_recursion");
  if ((root_mask & ~vertex_mask) != 0)
    throw contract_violation("psi_by_recursion: roots must lie in the vertex set");
  if (vertex_mask >= (1u << pts.size()))
    throw contract_violation("psi_by_recursion: vertex mask out of range");
  const auto fm = f_matrix(pot, pts);
  RecState st{&fm, {}};
  return psi_rec(st, root_mask, vertex_mask);
}

double psi_by_recursion(const PairPotential& pot, int k,
                        std::span<const Point> pts) {
  const int n = check_tuple(pts, "psi_by_recursion");
  if (k < 1 || k > n)
    throw contract_violation("psi_by_recursion: need 1 <= k <= n");
  const std::uint32_t roots = (1u << k) - 1;
  const std::uint32_t all =
      n == 32 ? ~0u : ((1u << n) - 1);
  return psi_by_recursion(pot, roots, all, pts);
}

MultirootedSumEvaluator::MultirootedSumEvaluator(int k, int n, bool force)
    : k_(k), n_(n) {
  if (n < 1 || k < 0 || k > n)
    throw contract_violation("multirooted evaluator: bad (k, n)");
  if (n == 1) {
    masks_.push_back(0);
    return;
  }
  combinat::MultirootedGraphRange range(k == 0 ? 1 : k, n, force);
  while (auto g = range.next())
    masks_.push_back(static_cast<std::uint32_t>(g->edges.to_ullong()));
}

double MultirootedSumEvaluator::eval(const PairPotential& pot,
                                     std::span<const Point> pts) const {
  if (static_cast<int>(pts.size()) != n_)
    throw contract_violation("multirooted evaluator: tuple size mismatch");
  return eval(f_matrix(pot, pts));
}

double MultirootedSumEvaluator::eval(const std::vector<double>& fm) const {
  if (masks_.size() > kKahanThreshold) {
    Kahan acc;
    for (std::uint32_t mask : masks_) acc.add(masked_product(fm, mask));
    return acc.sum;
  }
  double s = 0.0;
  for (std::uint32_t mask : masks_) s += masked_product(fm, mask);
  return s;
}

}  // namespace mayerkit::ursell
