#include "mayerkit/combinat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

namespace mayerkit::combinat {

std::pair<int, int> pair_from_index(int idx) {
  int j = 1;
  while (pair_index(0, j + 1) <= idx) ++j;
  return {idx - pair_index(0, j), j};
}

std::vector<std::uint32_t> adjacency(const Graph& g) {
  std::vector<std::uint32_t> adj(static_cast<std::size_t>(g.n), 0);
  for (int j = 1; j < g.n; ++j) {
    for (int i = 0; i < j; ++i) {
      if (g.edges.test(static_cast<std::size_t>(pair_index(i, j)))) {
        adj[static_cast<std::size_t>(i)] |= 1u << j;
        adj[static_cast<std::size_t>(j)] |= 1u << i;
      }
    }
  }
  return adj;
}

namespace {
// Vertices reachable from `seed_mask` in g.
std::uint32_t reach(const Graph& g, std::uint32_t seed_mask) {
  const auto adj = adjacency(g);
  std::uint32_t seen = seed_mask;
  std::uint32_t frontier = seed_mask;
  while (frontier != 0) {
    std::uint32_t next = 0;
    std::uint32_t f = frontier;
    while (f != 0) {
      const int v = std::countr_zero(f);
      f &= f - 1;
      next |= adj[static_cast<std::size_t>(v)];
    }
    frontier = next & ~seen;
    seen |= next;
  }
  return seen;
}
}  // namespace

bool is_connected(const Graph& g) {
  if (g.n == 1) return true;
  const std::uint32_t all = (g.n == 32) ? ~0u : ((1u << g.n) - 1);
  return reach(g, 1u) == all;
}

bool is_multirooted(const Graph& g, int k) {
  if (k >= g.n) return true;
  const std::uint32_t roots = (1u << k) - 1;
  const std::uint32_t all = (1u << g.n) - 1;
  return reach(g, roots) == all;
}

bool is_tree(const Graph& g) {
  return g.edge_count() == g.n - 1 && is_connected(g);
}

// --- GraphRange --------------------------------------------------------------

namespace {
std::uint64_t graph_space(int n) {
  const int bits = n * (n - 1) / 2;
  return bits >= 64 ? 0 : (1ULL << bits);
}

void check_vertex_cap(int n, int cap, bool force, const char* what) {
  if (n < 1 || n > kMaxVertices)
    throw contract_violation(std::string(what) + ": n out of range");
  const int hard_cap = 11;  // counter must fit 64 bits
  if (n > (force ? hard_cap : cap))
    throw size_limit_error(std::string(what) + ": n = " + std::to_string(n) +
                           " exceeds the cap of " + std::to_string(cap) +
                           (force ? " (force cap " + std::to_string(hard_cap) +
                                        ")"
                                  : "; pass force to opt in"));
}
}  // namespace

GraphRange::GraphRange(int n, bool force) : n_(n) {
  check_vertex_cap(n, 8, force, "all_graphs");
  begin_ = cur_ = 0;
  end_ = graph_space(n);
}

GraphRange::GraphRange(int n, std::uint64_t begin, std::uint64_t end,
                       bool force)
    : n_(n) {
  check_vertex_cap(n, 8, force, "all_graphs");
  const std::uint64_t total = graph_space(n);
  if (begin > end || end > total)
    throw contract_violation("graph range: bad [begin, end)");
  begin_ = cur_ = begin;
  end_ = end;
}

std::optional<Graph> GraphRange::next() {
  if (cur_ >= end_) return std::nullopt;
  Graph g;
  g.n = n_;
  g.edges = EdgeBits(cur_++);
  return g;
}

ConnectedGraphRange::ConnectedGraphRange(int n, bool force)
    : base_((check_vertex_cap(n, 7, force, "connected_graphs"), n),
            /*force=*/true) {}

std::optional<Graph> ConnectedGraphRange::next() {
  while (auto g = base_.next()) {
    if (is_connected(*g)) return g;
  }
  return std::nullopt;
}

MultirootedGraphRange::MultirootedGraphRange(int k, int n, bool force)
    : k_(k),
      base_((check_vertex_cap(n, 7, force, "multirooted_graphs"), n),
            /*force=*/true) {
  if (k < 1 || k > n)
    throw contract_violation("multirooted_graphs: need 1 <= k <= n");
}

std::optional<Graph> MultirootedGraphRange::next() {
  while (auto g = base_.next()) {
    if (is_multirooted(*g, k_)) return g;
  }
  return std::nullopt;
}

// --- TreeRange ---------------------------------------------------------------

Graph tree_from_pruefer(int n, const std::vector<int>& seq) {
  Graph g;
  g.n = n;
  if (n == 1) return g;
  std::vector<int> degree(static_cast<std::size_t>(n), 1);
  for (int v : seq) ++degree[static_cast<std::size_t>(v)];
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  for (int v : seq) {
    int leaf = -1;
    for (int u = 0; u < n; ++u) {
      if (degree[static_cast<std::size_t>(u)] == 1 &&
          !used[static_cast<std::size_t>(u)]) {
        leaf = u;
        break;
      }
    }
    g.set_edge(leaf, v);
    used[static_cast<std::size_t>(leaf)] = true;
    --degree[static_cast<std::size_t>(v)];
  }
  int a = -1, b = -1;
  for (int u = 0; u < n; ++u) {
    if (!used[static_cast<std::size_t>(u)] &&
        degree[static_cast<std::size_t>(u)] == 1) {
      (a < 0 ? a : b) = u;
    }
  }
  g.set_edge(a, b);
  return g;
}

TreeRange::TreeRange(int n, bool rooted, bool force) : n_(n), rooted_(rooted) {
  if (n < 1 || n > kMaxVertices)
    throw contract_violation("trees: n out of range");
  const int cap = 9;
  if (n > cap && !force)
    throw size_limit_error("trees: n = " + std::to_string(n) +
                           " exceeds the cap of " + std::to_string(cap) +
                           "; pass force to opt in");
  if (n >= 2) pruefer_.assign(static_cast<std::size_t>(n - 2), 0);
  current_ = tree_from_pruefer(n_, pruefer_);
  next_root_ = 0;
}

bool TreeRange::advance_tree() {
  // Odometer over base-n digits; empty sequence (n <= 2) has one state.
  for (int i = static_cast<int>(pruefer_.size()) - 1; i >= 0; --i) {
    const auto u = static_cast<std::size_t>(i);
    if (pruefer_[u] + 1 < n_) {
      ++pruefer_[u];
      std::fill(pruefer_.begin() + i + 1, pruefer_.end(), 0);
      current_ = tree_from_pruefer(n_, pruefer_);
      return true;
    }
  }
  return false;
}

std::optional<TreeItem> TreeRange::next() {
  if (done_) return std::nullopt;
  TreeItem item;
  item.graph = current_;
  if (rooted_) {
    item.root = next_root_++;
    if (next_root_ >= n_) {
      next_root_ = 0;
      if (!advance_tree()) done_ = true;
    }
  } else {
    item.root = -1;
    if (!advance_tree()) done_ = true;
  }
  return item;
}

// --- Multigraph --------------------------------------------------------------

int Multigraph::multiplicity(int i, int j) const {
  const int idx = i < j ? pair_index(i, j) : pair_index(j, i);
  int c = 0;
  for (int a : assignment) c += (a == idx);
  return c;
}

bool Multigraph::spanning() const {
  std::uint32_t covered = 0;
  for (int a : assignment) {
    const auto [i, j] = pair_from_index(a);
    covered |= (1u << i) | (1u << j);
  }
  return covered == (1u << n) - 1;
}

bool Multigraph::connected() const {
  Graph g;
  g.n = n;
  for (int a : assignment) g.edges.set(static_cast<std::size_t>(a));
  return is_connected(g);
}

MultigraphRange::MultigraphRange(int n, int m, MultigraphMode mode, bool force)
    : n_(n), m_(m), pairs_(n * (n - 1) / 2), mode_(mode) {
  if (m < 1) throw contract_violation("multigraphs: m must be >= 1");
  if (n < 2 || n > 2 * m)
    throw contract_violation("multigraphs: need 2 <= n <= 2m");
  const double space = std::pow(static_cast<double>(pairs_), m);
  if (space > 1e8 && !force)
    throw size_limit_error(
        "multigraphs: assignment space C(n,2)^m exceeds 1e8; pass force");
  digits_.assign(static_cast<std::size_t>(m), 0);
}

bool MultigraphRange::advance() {
  for (int i = m_ - 1; i >= 0; --i) {
    const auto u = static_cast<std::size_t>(i);
    if (digits_[u] + 1 < pairs_) {
      ++digits_[u];
      std::fill(digits_.begin() + i + 1, digits_.end(), 0);
      return true;
    }
  }
  return false;
}

std::optional<Multigraph> MultigraphRange::next() {
  while (!done_) {
    if (!first_) {
      if (!advance()) {
        done_ = true;
        break;
      }
    }
    first_ = false;
    Multigraph g;
    g.n = n_;
    g.m = m_;
    g.assignment = digits_;
    const bool keep = (mode_ == MultigraphMode::spanning)
                          ? g.spanning()
                          : g.connected();
    if (keep) return g;
  }
  return std::nullopt;
}

// --- SetPartition ------------------------------------------------------------

int SetPartition::block_count() const {
  return block_of.empty()
             ? 0
             : 1 + *std::max_element(block_of.begin(), block_of.end());
}

std::vector<std::vector<int>> SetPartition::blocks() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(block_count()));
  for (int i = 0; i < s; ++i)
    out[static_cast<std::size_t>(block_of[static_cast<std::size_t>(i)])]
        .push_back(i);
  return out;
}

PartitionRange::PartitionRange(int s, bool force) : s_(s) {
  if (s < 1) throw contract_violation("partitions: s must be >= 1");
  if (s > 12 && !force)
    throw size_limit_error("partitions: s = " + std::to_string(s) +
                           " exceeds the cap of 12; pass force to opt in");
  if (s > 16) throw size_limit_error("partitions: s > 16 unsupported");
  rgs_.assign(static_cast<std::size_t>(s), 0);
}

bool PartitionRange::advance() {
  // Restricted growth strings: a[0] = 0, a[i] <= 1 + max(a[0..i-1]).
  for (int i = s_ - 1; i >= 1; --i) {
    const auto u = static_cast<std::size_t>(i);
    int prefix_max = 0;
    for (int j = 0; j < i; ++j)
      prefix_max = std::max(prefix_max, rgs_[static_cast<std::size_t>(j)]);
    if (rgs_[u] <= prefix_max) {
      ++rgs_[u];
      std::fill(rgs_.begin() + i + 1, rgs_.end(), 0);
      return true;
    }
  }
  return false;
}

std::optional<SetPartition> PartitionRange::next() {
  if (done_) return std::nullopt;
  if (!first_) {
    if (!advance()) {
      done_ = true;
      return std::nullopt;
    }
  }
  first_ = false;
  SetPartition p;
  p.s = s_;
  p.block_of = rgs_;
  return p;
}

SetPartition pair_partition(int m) {
  SetPartition p;
  p.s = 2 * m;
  p.block_of.resize(static_cast<std::size_t>(2 * m));
  for (int a = 0; a < m; ++a) {
    p.block_of[static_cast<std::size_t>(2 * a)] = a;
    p.block_of[static_cast<std::size_t>(2 * a + 1)] = a;
  }
  return p;
}

bool pair_non_flat(const SetPartition& pi, const SetPartition& sigma) {
  if (pi.s != sigma.s) throw contract_violation("partition pair: size mismatch");
  // pi ^ sigma = singletons: no sigma block may contain two elements of one
  // pi block.
  for (const auto& blk : pi.blocks()) {
    for (std::size_t i = 0; i < blk.size(); ++i) {
      for (std::size_t j = i + 1; j < blk.size(); ++j) {
        if (sigma.block_of[static_cast<std::size_t>(blk[i])] ==
            sigma.block_of[static_cast<std::size_t>(blk[j])])
          return false;
      }
    }
  }
  return true;
}

bool pair_connected(const SetPartition& pi, const SetPartition& sigma) {
  if (pi.s != sigma.s) throw contract_violation("partition pair: size mismatch");
  // Union-find over ground elements merging along both partitions.
  std::vector<int> parent(static_cast<std::size_t>(pi.s));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) {
      parent[static_cast<std::size_t>(x)] =
          parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
      x = parent[static_cast<std::size_t>(x)];
    }
    return x;
  };
  auto unite = [&](int a, int b) {
    parent[static_cast<std::size_t>(find(a))] = find(b);
  };
  for (const auto& part : {pi, sigma}) {
    for (const auto& blk : part.blocks())
      for (std::size_t i = 1; i < blk.size(); ++i) unite(blk[0], blk[i]);
  }
  const int root = find(0);
  for (int i = 1; i < pi.s; ++i)
    if (find(i) != root) return false;
  return true;
}

PartitionPair multigraph_to_partition_pair(const Multigraph& g) {
  if (!g.spanning())
    throw contract_violation("multigraph_to_partition_pair: not spanning");
  PartitionPair pp;
  pp.pi = pair_partition(g.m);
  pp.sigma.s = 2 * g.m;
  pp.sigma.block_of.assign(static_cast<std::size_t>(2 * g.m), -1);
  // Element 2a holds the smaller endpoint of edge a, element 2a+1 the larger;
  // sigma blocks collect the elements carrying the same vertex, numbered by
  // first appearance to stay canonical.
  std::vector<int> block_of_vertex(static_cast<std::size_t>(g.n), -1);
  int next_block = 0;
  for (int a = 0; a < g.m; ++a) {
    const auto [i, j] = pair_from_index(g.assignment[static_cast<std::size_t>(a)]);
    for (int which = 0; which < 2; ++which) {
      const int v = which == 0 ? i : j;
      auto& b = block_of_vertex[static_cast<std::size_t>(v)];
      if (b < 0) b = next_block++;
      pp.sigma.block_of[static_cast<std::size_t>(2 * a + which)] = b;
    }
  }
  pp.non_flat = pair_non_flat(pp.pi, pp.sigma);
  pp.connected = pair_connected(pp.pi, pp.sigma);
  return pp;
}

NonflatConnectedPairRange::NonflatConnectedPairRange(int m, bool force)
    : m_((m < 1 || (m > 5 && !force))
             ? throw size_limit_error(
                   "nonflat_connected_pairs: need 1 <= m <= 5 (force to opt in)")
             : m),
      base_(2 * m, force) {}

std::optional<SetPartition> NonflatConnectedPairRange::next() {
  const SetPartition pi = pair_partition(m_);
  while (auto sigma = base_.next()) {
    if (pair_non_flat(pi, *sigma) && pair_connected(pi, *sigma)) return sigma;
  }
  return std::nullopt;
}

}  // namespace mayerkit::combinat
