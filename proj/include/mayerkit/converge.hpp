#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mayerkit/model.hpp"
#include "mayerkit/quad.hpp"

namespace mayerkit::converge {

using model::Activity;
using model::PairPotential;
using model::Point;

// Sufficient conditions with an exponential slack parameter t; a satisfied
// certificate at t > 0 is a TailWitness for the expansion module.
enum class Condition { kpu, fp, py };

struct ConvergenceCertificate {
  Condition condition = Condition::kpu;
  double a = 0.0, t = 0.0;
  double lhs = 0.0, rhs = 0.0;
  double margin = 0.0;  // rhs - lhs; satisfied iff >= 0
  bool satisfied = false;
  int kmax_used = 0;
  std::uint64_t seed = 0, samples = 0;
};

// Hard-core saturation order for the pinned-cluster integrals: points inside
// B(x0, r) with pairwise distances >= r number at most 2 / 5 / 12 in
// dimension 1 / 2 / 3, so V_k = 0 beyond that.
int packing_kmax(int dim);

// e^{t+a} * integral of |f(x0, .)| dlambda_z <= a, with x0 ranging over the
// whole space (infinite-volume convention: hard spheres use the closed-form
// ball volume, finite-range potentials integrate over B(x0, range)).
// Constant activity only.
ConvergenceCertificate check_kpu(const PairPotential& pot, const Activity& act,
                                 double a, double t, const quad::McPlan& plan);

// V_k = int over B(x0, range)^k of prod_j |f(x0,y_j)| prod_{i<j} (1+f(y_i,y_j))
// d(plain Lebesgue)^k, for k = 1..kmax.  Stream plan.stream + k per order.
std::vector<quad::McEstimate> packing_integrals(const PairPotential& pot,
                                                const Point& x0, int kmax,
                                                const quad::McPlan& plan);

// sum_{k=1..kmax} (e^{tk}/k!) (z e^a)^k V_k <= e^a - 1.  kmax <= 0 picks the
// packing default.  When the sum is not exactly complete (soft potential or
// kmax below the packing order), the k-tail is added to the left side via
// V_k <= V_1^k, so the certificate stays one-sided.  Constant activity only.
ConvergenceCertificate check_fp(const PairPotential& pot, const Activity& act,
                                double a, double t, int kmax,
                                const quad::McPlan& plan);

// mass * E[(1 - e^{-|u(x0, Y)|}) e^{B(Y) + a}] <= a at the domain center,
// for signed kernels u (no slack parameter).  Constant activity only.
ConvergenceCertificate check_py(const model::Kernel& u, const Activity& act,
                                const std::function<double(const Point&)>& B,
                                double a, const quad::McPlan& plan);

// Best-margin a on a log grid over [0.01, 10] plus golden-section
// refinement; the packing integrals are estimated once and reused.
ConvergenceCertificate optimize_witness(const PairPotential& pot,
                                        const Activity& act, Condition cond,
                                        double t, int kmax,
                                        const quad::McPlan& plan);

// Largest z (by bisection) at which the optimized condition still holds.
// The packing integrals do not depend on z, so they are estimated once.
double critical_activity(const PairPotential& pot, int dim, Condition cond,
                         double t, int kmax, const quad::McPlan& plan);

// Fixed points of the tree generating maps, iterated from 0 with
// monotonicity checked.  plain: T <- z e^{b T} with b = int |f(x0,.)|;
// fp: T <- z (1 + sum_k V_k T^k / k!).  diverged is set when the iterates
// cross the 1e6 * z ceiling.
enum class TreeVariant { plain, fp };

struct TreeGf {
  double value = 0.0;
  bool diverged = false;
  int iterations = 0;
};

TreeGf tree_gf(const PairPotential& pot, const Activity& act,
               TreeVariant variant, const quad::McPlan& plan,
               int max_iter = 100000);

// Coefficients t_1..t_N of the single-rooted tree series:
// t_1 = z, t_n = z sum_k (V_k/k!) sum_{n_1+..+n_k = n-1} prod t_{n_i}.
std::vector<double> tree_series(const PairPotential& pot, const Activity& act,
                                int N, const quad::McPlan& plan);

// k-rooted forest partial sum: sum over n_1..n_k >= 1 with total <= N of
// prod t_{n_i} (so the order-N truncation counts total tree size).
double forest_picard(const PairPotential& pot, const Activity& act, int k,
                     int N, const quad::McPlan& plan);

// ell-th order bound ell! / t^ell * mass from a satisfied t > 0 certificate.
double cumulant_bound(const ConvergenceCertificate& cert, double mass,
                      int ell);

}  // namespace mayerkit::converge
