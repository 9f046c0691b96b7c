#pragma once

#include <bitset>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "mayerkit/errors.hpp"

namespace mayerkit::combinat {

inline constexpr int kMaxVertices = 16;
inline constexpr int kMaxEdgeBits = kMaxVertices * (kMaxVertices - 1) / 2;

// Unordered pair {i, j}, 0 <= i < j, maps to bit j*(j-1)/2 + i.  Pairs are
// therefore ordered (0,1), (0,2), (1,2), (0,3), ...
constexpr int pair_index(int i, int j) { return j * (j - 1) / 2 + i; }
std::pair<int, int> pair_from_index(int idx);

using EdgeBits = std::bitset<kMaxEdgeBits>;

// Simple undirected graph on vertices {0, ..., n-1}.
struct Graph {
  int n = 1;
  EdgeBits edges;

  bool has_edge(int i, int j) const {
    return i < j ? edges.test(static_cast<std::size_t>(pair_index(i, j)))
                 : edges.test(static_cast<std::size_t>(pair_index(j, i)));
  }
  void set_edge(int i, int j) {
    edges.set(static_cast<std::size_t>(i < j ? pair_index(i, j)
                                             : pair_index(j, i)));
  }
  int edge_count() const { return static_cast<int>(edges.count()); }
};

// Adjacency bitmask per vertex (vertex j set in adjacency[i] iff {i,j} edge).
std::vector<std::uint32_t> adjacency(const Graph& g);
bool is_connected(const Graph& g);
// Every vertex outside the root set {0..k-1} has a path into it.
bool is_multirooted(const Graph& g, int k);
bool is_tree(const Graph& g);

// ---------------------------------------------------------------------------
// Enumerators.  Each range hands out items one at a time via next() and
// throws size_limit_error when the request is outside the supported window
// (force = true opts in where feasible).  Iteration order is frozen:
// graphs ascend in edge-bitset order read as an integer.
// ---------------------------------------------------------------------------

class GraphRange {
 public:
  explicit GraphRange(int n, bool force = false);
  // Sub-range [begin, end) of the bitset counter, for splitting a filtration
  // across workers.
  GraphRange(int n, std::uint64_t begin, std::uint64_t end, bool force = false);
  std::optional<Graph> next();
  std::uint64_t total() const { return end_ - begin_; }

 private:
  int n_;
  std::uint64_t cur_, end_, begin_;
};

class ConnectedGraphRange {
 public:
  explicit ConnectedGraphRange(int n, bool force = false);
  std::optional<Graph> next();

 private:
  GraphRange base_;
};

// Graphs where every non-root vertex is connected to the root set {0..k-1}.
// k = 1 gives connected graphs; k = n gives all graphs.
class MultirootedGraphRange {
 public:
  MultirootedGraphRange(int k, int n, bool force = false);
  std::optional<Graph> next();

 private:
  int k_;
  GraphRange base_;
};

struct TreeItem {
  Graph graph;
  int root = -1;  // set in rooted mode, else -1
};

// Labelled trees on n vertices via Pruefer sequences (lexicographic order of
// the sequence).  Rooted mode pairs every tree with each root 0..n-1.
class TreeRange {
 public:
  TreeRange(int n, bool rooted, bool force = false);
  std::optional<TreeItem> next();

 private:
  int n_;
  bool rooted_;
  bool done_ = false;
  int next_root_ = 0;
  std::vector<int> pruefer_;
  Graph current_;
  bool advance_tree();
};

Graph tree_from_pruefer(int n, const std::vector<int>& seq);

// Multigraph on {0..n-1} with m labelled edges: an assignment list mapping
// each label a (1-based in reports, 0-based in code) to an unordered pair.
struct Multigraph {
  int n = 2;
  int m = 1;
  std::vector<int> assignment;  // pair_index per label, size m

  int multiplicity(int i, int j) const;
  bool spanning() const;   // every vertex covered by some edge
  bool connected() const;  // one component on all n vertices
};

enum class MultigraphMode { spanning, connected };

// Lexicographic over assignment lists (label 0 most significant).
class MultigraphRange {
 public:
  MultigraphRange(int n, int m, MultigraphMode mode, bool force = false);
  std::optional<Multigraph> next();

 private:
  int n_, m_, pairs_;
  MultigraphMode mode_;
  bool done_ = false;
  std::vector<int> digits_;
  bool first_ = true;
  bool advance();
};

// Set partition of {0..s-1} in canonical form: block_of[i] is the index of
// i's block, blocks numbered by first appearance (restricted growth string).
struct SetPartition {
  int s = 0;
  std::vector<int> block_of;

  int block_count() const;
  std::vector<std::vector<int>> blocks() const;
};

// All partitions of {0..s-1}, restricted-growth-string order.
class PartitionRange {
 public:
  explicit PartitionRange(int s, bool force = false);
  std::optional<SetPartition> next();

 private:
  int s_;
  bool done_ = false, first_ = true;
  std::vector<int> rgs_;
  bool advance();
};

// The pair partition {{0,1},{2,3},...} of {0..2m-1}.
SetPartition pair_partition(int m);

struct PartitionPair {
  SetPartition pi;     // always pair_partition(m)
  SetPartition sigma;
  bool non_flat = false;   // no sigma block holds both elements of a pi block
  bool connected = false;  // join of pi and sigma is a single block
};

// Dedouble a spanning multigraph: element (v, a) for each label a and each
// endpoint v of edge a, listed label-major with endpoints ascending, so pi
// is exactly the pair partition; sigma groups elements sharing a vertex.
PartitionPair multigraph_to_partition_pair(const Multigraph& g);

bool pair_non_flat(const SetPartition& pi, const SetPartition& sigma);
bool pair_connected(const SetPartition& pi, const SetPartition& sigma);

// Partitions sigma of {0..2m-1} such that (pair_partition(m), sigma) is
// non-flat and connected.
class NonflatConnectedPairRange {
 public:
  explicit NonflatConnectedPairRange(int m, bool force = false);
  std::optional<SetPartition> next();

 private:
  int m_;
  PartitionRange base_;
};

// Drains a range, counting items.
template <typename Range>
std::uint64_t count_range(Range&& r) {
  std::uint64_t c = 0;
  while (r.next().has_value()) ++c;
  return c;
}

}  // namespace mayerkit::combinat
