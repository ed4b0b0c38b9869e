#pragma once

#include "svtail/bounds.hpp"
#include "svtail/ensemble.hpp"
#include "svtail/sphere.hpp"
#include "svtail/spectral.hpp"
#include "svtail/stats.hpp"
#include "svtail/types.hpp"

#include <cstdint>
#include <vector>

namespace svtail {

/// Empirical lower-tail curve of the least singular value. Raw counts are
/// reported (no monotone regularization); intervals are exact binomial at
/// 95%. One matrix is sampled per trial and its sigma_min reused across the
/// whole grid.
struct TailCurve {
  std::vector<double> eps_grid;
  std::uint64_t trials = 0;
  std::vector<std::uint64_t> successes;
  std::vector<double> p_hat;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  double fitted_exponent = 0.0;
  double fit_r2 = 0.0;
  double fitted_floor = 0.0;
  double fitted_scale = 0.0;
  bool fit_valid = false;
  std::vector<std::size_t> fit_points;   // grid indices used by the fit
  std::vector<std::size_t> zero_points;  // grid indices with zero successes
  std::uint64_t solver_fallbacks = 0;
};

TailCurve estimate_tail_curve(const EnsembleSpec& spec, const std::vector<double>& eps_grid,
                              std::uint64_t trials, std::uint64_t master_seed, int jobs = 1,
                              double solver_tol = 1e-9);

/// Exceedance frequencies of |A|_op >= K n^(delta/2) over a K-grid, plus the
/// per-trial check |A|_op <= |Re A|_op + |Im A|_op + tol.
struct NormConcentration {
  std::vector<double> k_grid;
  std::uint64_t trials = 0;
  std::vector<std::uint64_t> exceed;
  std::vector<double> freq;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  std::uint64_t split_holds = 0;
  double median_scaled_norm = 0.0;  // median of |A|_op / n^(delta/2)
};

NormConcentration norm_concentration(const EnsembleSpec& spec, const std::vector<double>& k_grid,
                                     std::uint64_t trials, std::uint64_t master_seed,
                                     int jobs = 1, double tol = 1e-8);

/// |I_y(J)|: rows whose only nonzero entry across supp(y) sits in J and has
/// modulus >= 1. Exact set arithmetic on exact zeros; J must index supp(y).
int count_row_bound_set(const Matrix& A, const Vector& y, const std::vector<int>& J);

struct RowBoundExperiment {
  std::uint64_t trials = 0;
  int j_size = 0;
  int support_size = 0;
  double mean_count = 0.0;
  double se_mean = 0.0;
  double expected_mean = 0.0;  // n e^(-1) |J| p (1-p)^(m-1)
  double threshold = 0.0;
  double chernoff_bound = 0.0;
  std::uint64_t below_threshold = 0;
  double freq_below = 0.0;
  Interval ci_below;
  std::vector<int> counts;
};

RowBoundExperiment run_row_bound_experiment(const EnsembleSpec& spec, int j_size,
                                            int support_size, std::uint64_t trials,
                                            std::uint64_t master_seed, int jobs = 1);

/// Lower-tail frequencies of |<Y1, eta>| < t for per-trial incompressible
/// eta and a fresh sparse column Y1, with a tail-exponent fit in t.
struct IncompTailExperiment {
  std::vector<double> t_grid;
  std::uint64_t trials = 0;
  std::vector<std::uint64_t> successes;
  std::vector<double> freq;
  std::vector<double> ci_lo;
  std::vector<double> ci_hi;
  PowerLawFit t_fit;
};

IncompTailExperiment incompressible_tail_experiment(const ClassificationParams& params, int n,
                                                    double delta,
                                                    const std::vector<double>& t_grid,
                                                    std::uint64_t trials,
                                                    std::uint64_t master_seed, int jobs = 1);

/// Companion fit across an n-grid at fixed t: slope of log freq against
/// log n (the dimension prefactor).
LineFit incompressible_prefactor_fit(const ClassificationParams& params,
                                     const std::vector<int>& n_grid, double delta, double t,
                                     std::uint64_t trials, std::uint64_t master_seed,
                                     int jobs = 1);

/// Per-trial verification of the column-distance reduction: the SVD
/// minimizer x satisfies |x_i| dist(Y_i, W_i) <= sigma_n for every i, and
/// dist(Y_1, W_1) equals |<Y_1, eta_1>| against the kernel vector of B when
/// B has full rank.
struct DistanceReport {
  std::uint64_t trials = 0;
  std::uint64_t fullrank_trials = 0;
  std::uint64_t rank_deficient_trials = 0;
  std::uint64_t coord_checks = 0;
  double max_identity_gap = 0.0;      // worst |dist - |<Y1,eta>||
  double max_coord_violation = 0.0;   // worst max(0, |x_i| dist_i - sigma_n)
};

DistanceReport distance_reduction_check(const EnsembleSpec& spec, std::uint64_t trials,
                                        std::uint64_t master_seed, double tol = 1e-8,
                                        int jobs = 1);

/// One shifted-perturbation trial: M the corner-zeroed t*Id, x the explicit
/// witness. bound_value is C lambda^2 n^(3/2) / t with the Markov-calibrated
/// C; hs_chain_value is the per-sample product (lambda^2/t) |A_block|_HS
/// |a_col| / |x|.
struct ShiftTrialResult {
  double sigma_min = 0.0;
  bool corner_was_zero = false;
  double bound_value = 0.0;
  double witness_ratio = 0.0;
  double hs_chain_value = 0.0;
  double tid_sigma_min = 0.0;  // sigma_min(t Id + lambda A), the unshifted comparison
};

/// C' chosen so the two Markov events jointly fail with probability at most
/// 0.01 * P[a_nn = 0]; the bound constant is C'^2.
double shift_calibrated_constant(const EnsembleSpec& spec);

ShiftTrialResult shift_counterexample_trial(int n, double t, double lambda,
                                            const EnsembleSpec& spec, const SeedPath& seed,
                                            double solver_tol = 1e-9);

struct ShiftExperiment {
  std::uint64_t trials = 0;
  std::uint64_t corner_zero = 0;
  std::uint64_t bound_held_given_zero = 0;
  double calibrated_C = 0.0;
  double conditional_bound_rate = 0.0;
  Interval corner_zero_ci;
  double median_conditional_sigma = 0.0;
  double median_tid_sigma = 0.0;
  std::vector<ShiftTrialResult> results;
};

ShiftExperiment run_shift_experiment(int n, double t, double lambda, const EnsembleSpec& spec,
                                     std::uint64_t trials, std::uint64_t master_seed,
                                     int jobs = 1);

/// Coupled Monte Carlo check of the zero-out monotonicity: for pairs with
/// |y_i| <= |x_i| coordinatewise, P[|Ax| <= t] must not exceed
/// P[|Ay| <= t] by more than 3 pooled standard errors anywhere on a
/// per-pair quantile t-grid.
struct ZeroOutCheck {
  std::uint64_t pairs = 0;
  std::uint64_t matrices_per_pair = 0;
  std::uint64_t comparisons = 0;
  std::uint64_t violations = 0;
  double worst_z = 0.0;  // largest (p_x - p_y)/se seen
};

ZeroOutCheck zero_out_monotonicity_check(const EnsembleSpec& spec, std::uint64_t pairs,
                                         std::uint64_t matrices_per_pair,
                                         std::uint64_t master_seed, int jobs = 1);

/// Fuzz run of the net pipeline over V-members; counts certificate
/// violations (there must be none) and tracks the extremal margins.
struct NetCheckReport {
  std::uint64_t samples = 0;
  std::uint64_t violations = 0;
  double max_dist_over_sqrt_d1 = 0.0;  // worst dist / sqrt(d1), must stay <= 3
  double min_band_margin = 0.0;        // worst band_mass_x3 - (d2 - 57 sqrt(d1))
  int max_support = 0;
};

NetCheckReport run_net_check(int n, int a, double b, double d1, double d2, std::uint64_t samples,
                             std::uint64_t master_seed, int jobs = 1);

}  // namespace svtail
