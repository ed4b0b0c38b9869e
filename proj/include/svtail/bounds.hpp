#pragma once

#include "svtail/sphere.hpp"
#include "svtail/types.hpp"

#include <string>
#include <vector>

namespace svtail {

/// Small-ball probability of N_C(0, sigma2): exact CDF value 1 - e^(-eps^2/sigma2)
/// and the linearized bound eps^2/sigma2 that dominates it.
struct SmallBallBound {
  double exact = 0.0;
  double bound = 0.0;
};
SmallBallBound complex_small_ball(double eps, double sigma2);

/// Lower-tail bound for a Bernoulli-thinned nonnegative sum: probability that
/// sum b_i <= n^(delta-1) * t * a is at most
/// 1 - (1-t)^2 * a / (a + (n^(1-delta) - 1) * max a_i),  a = sum a_i.
double paley_zygmund_sparse_bound(const RealVector& a_vec, double t, double delta, int n);

/// Small-ball bound for one sparse row against a fixed vector x:
/// P[|R.x| <= eps] <= 1 - (1-t)^2 |x|^2 / (|x|^2 + (n^(1-delta)-1) sup|x_i|^2)
///                    + eps^2 / (n^(delta-1) t |x|^2).
double dot_small_ball_bound(const Vector& x, double eps, double t, double delta, int n);

/// Chernoff tail for the count of no-cancellation rows: the count falls at or
/// below `threshold` with probability at most `prob`.
struct RowBoundTail {
  double threshold = 0.0;
  double prob = 1.0;
};
RowBoundTail row_bound_tail(int j_size, int m, double delta, int n);

/// log of  n * exp(-(1/(40 e^(c2))) * s * n^delta) * (3/sqrt(d1))^(2a) * (n e/a)^a
/// with step size s = 1 + floor((d2 - 57 sqrt(d1)) b / 8). K enters only the
/// precondition 57 sqrt(d1) + 320 e^(c2) K^2 d1 < d2.
double hc_step_bound(double n, double delta, double a, double b, double d1, double d2, double c2,
                     double K);

/// The constant-selection code runs in extended precision: the d-recursion
/// and the chronological constants live at scales (1e-140 and below for
/// small delta) that underflow IEEE double.
using Wide = long double;

/// Level sequences of the compressible-case union: a_k = n^(k delta/2) for
/// k < m, a_m = c2 n^(1-delta), b_1 = 1, b_k = a_(k-1), with the d-recursion
/// d1_(k-1) = d1_k + d2_k run backward from d1_m = eps1 + eps2 and
/// d2_1 = 1 - d1_1 forced at the top.
struct HcSchedule {
  int m = 0;
  std::vector<Wide> a, b, d1, d2;  // entry k-1 holds level k
};

/// Largest m with (m-1) * delta/2 < 1 - delta.
int hc_partition_count(double delta);

/// The constraint floor each d2_k must clear.
Wide hc_d2_requirement(Wide d1, double c2, double K);

/// Builds the schedule with minimal slack factor 2 over the d2 constraint;
/// throws with the first violated constraint when eps1 + eps2 is not small
/// enough for the recursion to survive all m levels.
HcSchedule build_hc_schedule(double n, double delta, double c2, double K, Wide eps1, Wide eps2);

/// The chronological choices: c2 and t first, then eps2 (schedule
/// feasibility), delta', eps1, and c1, each by log-space bisection against
/// the worst-case (large-n) form of its inequality.
struct McConstants {
  Wide c1 = 0;
  Wide c2 = 1;
  Wide eps1 = 0;
  Wide eps2 = 0;
  Wide t = 0;            // (1-t)^2 = 0.5
  Wide delta_prime = 0;
  double K = 0;
  double delta = 0;
};
McConstants choose_mc_constants(double K, double delta, double n_min, double c2 = 1.0);

/// One selection inequality evaluated at dimension n. lhs/rhs are the face
/// values (often both rounding to 1); `margin` is lhs - rhs computed in
/// difference form, which stays meaningful at the 1e-140 scales the
/// constants live at, and `holds` is decided from it.
struct InequalityCheck {
  std::string id;
  Wide lhs = 0;
  Wide rhs = 0;
  Wide margin = 0;
  bool holds = false;
};

/// Evaluates every selection inequality at dimension n (n may be +infinity
/// for the limit form) plus the assembled per-n log of the product bound.
std::vector<InequalityCheck> verify_mc_constants(const McConstants& c, double n);

/// Pigeonhole witness for incompressible vectors: at least lambda0 * n
/// coordinates carry |eta_i|^2 >= 1/(lambda1 * n), with lambda1 = 2/eps1 and
/// lambda0 = eps1 * c1 / 2.
struct IncompWitness {
  double lambda0 = 0.0;
  double lambda1 = 0.0;
};
IncompWitness incompressible_witness(const ClassificationParams& params);

/// The four tail-bound shapes: dense Ginibre (eps n and eps^2 n^2), the
/// sparse real specialization e^(-c n^delta) + C eps n^((2-delta)/2), and the
/// sparse complex bound e^(-c n^delta) + C eps^2 n^(2-delta). c and C are
/// caller-supplied; the theorems leave them unnamed.
struct TheoremTails {
  double ginibre_real = 0.0;
  double ginibre_complex = 0.0;
  double ru_specialized = 0.0;
  double main = 0.0;
};
TheoremTails theorem_tail_bounds(double eps, double n, double delta, double c, double C);

}  // namespace svtail
