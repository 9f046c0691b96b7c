#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mayerkit/combinat.hpp"
#include "mayerkit/model.hpp"

namespace mayerkit::ursell {

using model::PairPotential;
using model::Point;

struct WeightedSum {
  double value = 0.0;
  std::uint64_t terms = 0;
  int n = 0;
  int k = 0;  // root count for multirooted sums (k = 1 for the connected sum)
};

// Pairwise f values for a tuple, indexed by pair_index.
std::vector<double> f_matrix(const PairPotential& pot,
                             std::span<const Point> pts);

// Product of f over the edges of g at the given points.
double graph_weight(const PairPotential& pot, const combinat::Graph& g,
                    std::span<const Point> pts);

// Sum of graph weights over all connected graphs on the tuple (1 for a
// single point).  Compensated summation once the term count passes 1e4.
WeightedSum ursell(const PairPotential& pot, std::span<const Point> pts);

// Sum over graphs whose non-root vertices all reach the roots {0..k-1}.
// k = n short-circuits to the product formula prod_{i<j} (1 + f) = e^{-H}.
WeightedSum psi(const PairPotential& pot, int k, std::span<const Point> pts);

// Weight of a rooted tree where each vertex multiplies |f| to its children
// and (1 + f) over sibling pairs among its children.
double fp_tree_weight(const PairPotential& pot, const combinat::Graph& tree,
                      int root, std::span<const Point> pts);

// Multirooted sum evaluated by peeling off the smallest root: with I the
// root set, iota = min I, I' = I \ {iota}, J' = J \ {iota},
//   psi(I, J) = prod_{i in I'} (1 + f(x_iota, x_i))
//               * sum_{L subset of J \ I} prod_{l in L} f(x_iota, x_l)
//                 * psi(I' u L, J'),
// with psi({}, {}) = 1 and psi({}, J) = 0 for J nonempty.  Index sets are
// bitmasks over positions in pts.  Agrees with psi() by enumeration.
double psi_by_recursion(const PairPotential& pot, std::uint32_t root_mask,
                        std::uint32_t vertex_mask, std::span<const Point> pts);

// Convenience: roots = first k positions, vertices = all of pts.
double psi_by_recursion(const PairPotential& pot, int k,
                        std::span<const Point> pts);

// Reusable edge-mask list for one (k, n) family so Monte Carlo loops do not
// re-filter the graph space per sample.  k = 0 means connected graphs.
class MultirootedSumEvaluator {
 public:
  MultirootedSumEvaluator(int k, int n, bool force = false);
  double eval(const PairPotential& pot, std::span<const Point> pts) const;
  double eval(const std::vector<double>& fm) const;
  std::uint64_t terms() const { return masks_.size(); }

 private:
  int k_, n_;
  std::vector<std::uint32_t> masks_;
};

}  // namespace mayerkit::ursell
