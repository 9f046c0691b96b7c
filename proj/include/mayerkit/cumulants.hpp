#pragma once

#include <cstdint>
#include <vector>

#include "mayerkit/model.hpp"
#include "mayerkit/quad.hpp"

namespace mayerkit::cumulants {

using model::Activity;
using model::Kernel;

// Moments/cumulants of pair statistics of a Poisson process: the multigraph
// forms address Y = sum_{i<j} u(x_i, x_j), the partition-pair form addresses
// X = sum_{i != j} u(x_i, x_j) = 2Y.  Per-n jobs run on stream
// plan.stream + n, so the two cumulant routes see identical sample points.
enum class Form { multigraph, partition_pairs };

struct NTerm {
  int n = 0;
  quad::McEstimate estimate;
};

struct CumulantReport {
  int m = 1;
  Form form = Form::multigraph;
  bool connected = false;  // cumulant (connected sums) vs raw moment
  std::vector<NTerm> per_n;
  double value = 0.0;
  double std_error = 0.0;  // per-n streams are disjoint: quadrature sum
};

// E[Y^m] = sum_{n=2}^{2m} (1/n!) int sum over spanning multigraphs of
// prod u^{multiplicity} dlambda_z^n.
CumulantReport moment_multigraph(const Kernel& u, const Activity& act, int m,
                                 const quad::McPlan& plan);

// Cumulant of Y: connected spanning multigraphs only (empty past n = m+1).
CumulantReport cumulant_multigraph(const Kernel& u, const Activity& act, int m,
                                   const quad::McPlan& plan);

// Cumulant of X via non-flat partition pairs: per n, the kernel averages
// prod_a u(x_{L(block(2a))}, x_{L(block(2a+1))}) over the n! block
// labelings L and over the admissible sigma with n blocks.
CumulantReport cumulant_partition_pairs(const Kernel& u, const Activity& act,
                                        int m, const quad::McPlan& plan);

// Sampled cumulants of X over plan.samples Poisson configurations (at least
// 1000): k-statistics plus delete-1 jackknife errors.  Kernel values must be
// finite; sampled pairs are probed first.
struct EmpiricalCumulants {
  std::vector<double> k;          // k_1..k_m
  std::vector<double> std_error;  // jackknife
  std::uint64_t trials = 0;
};

EmpiricalCumulants empirical_cumulants(const Kernel& u, const Activity& act,
                                       int m, const quad::McPlan& plan);

}  // namespace mayerkit::cumulants
