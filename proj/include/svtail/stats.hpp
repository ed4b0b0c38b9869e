#pragma once

#include <cstdint>
#include <vector>

namespace svtail {

/// Regularized incomplete beta I_x(a,b), by the Lentz continued fraction.
double regularized_beta(double a, double b, double x);

/// Inverse of I_x(a,b) in x, by bisection (monotone, robust at the scales
/// binomial tails produce).
double regularized_beta_inv(double a, double b, double p);

/// Regularized upper incomplete gamma Q(a,x) (series / continued fraction).
double regularized_gamma_q(double a, double x);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Exact (Clopper-Pearson) two-sided binomial confidence interval for k
/// successes out of n trials.
Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence = 0.95);

/// Chi-squared goodness-of-fit p-value from the statistic and degrees of
/// freedom.
double chi_squared_pvalue(double statistic, int dof);

/// Weighted least-squares line y = intercept + slope * x.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w);

/// Tail-exponent estimate for Monte Carlo exceedance curves.
///
/// Fits the additive model  p(eps) = floor + scale * eps^exponent  by
/// profiling the exponent against a weighted linear solve for (floor,
/// scale), with binomial inverse-variance weights. Grid points with fewer
/// than `min_successes` successes carry no tail information and points with
/// p_hat above `p_cap` are outside the lower-tail regime; both are excluded.
/// The floor absorbs the eps-independent mass (e.g. all-zero-row events)
/// that otherwise flattens a log-log fit; with floor ~ 0 this reduces to
/// plain weighted log-log regression.
struct PowerLawFit {
  double exponent = 0.0;
  double floor = 0.0;
  double scale = 0.0;
  double r2 = 0.0;
  std::vector<std::size_t> used;  // indices of the fitted grid points
  bool valid = false;
};
PowerLawFit fit_tail_power_law(const std::vector<double>& eps,
                               const std::vector<std::uint64_t>& successes,
                               std::uint64_t trials, std::uint64_t min_successes = 10,
                               double p_cap = 0.25);

}  // namespace svtail
