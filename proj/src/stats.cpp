#include "svtail/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace svtail {

namespace {

// Continued fraction for the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("regularized_beta: a,b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double regularized_beta_inv(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (regularized_beta(a, b, mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double regularized_gamma_q(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("regularized_gamma_q: a must be > 0");
  if (x <= 0.0) return 1.0;

  if (x < a + 1.0) {
    // Lower series, then complement.
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int it = 0; it < 1000; ++it) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    const double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    return 1.0 - p;
  }

  // Upper continued fraction (modified Lentz).
  constexpr double kTiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

Interval clopper_pearson(std::uint64_t k, std::uint64_t n, double confidence) {
  if (n == 0) throw std::invalid_argument("clopper_pearson: n must be > 0");
  if (k > n) throw std::invalid_argument("clopper_pearson: k must be <= n");
  const double alpha = 1.0 - confidence;
  Interval ci;
  const auto kd = static_cast<double>(k);
  const auto nd = static_cast<double>(n);
  ci.lo = (k == 0) ? 0.0 : regularized_beta_inv(kd, nd - kd + 1.0, alpha / 2.0);
  ci.hi = (k == n) ? 1.0 : regularized_beta_inv(kd + 1.0, nd - kd, 1.0 - alpha / 2.0);
  return ci;
}

double chi_squared_pvalue(double statistic, int dof) {
  if (dof < 1) throw std::invalid_argument("chi_squared_pvalue: dof must be >= 1");
  if (statistic <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w) {
  if (x.size() != y.size() || x.size() != w.size() || x.size() < 2)
    throw std::invalid_argument("weighted_line_fit: need >= 2 points of equal length");
  double sw = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double xb = sx / sw, yb = sy / sw;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += w[i] * (x[i] - xb) * (x[i] - xb);
    sxy += w[i] * (x[i] - xb) * (y[i] - yb);
    syy += w[i] * (y[i] - yb) * (y[i] - yb);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = yb - fit.slope * xb;
  fit.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

namespace {

struct ProfileEval {
  double sse = std::numeric_limits<double>::infinity();
  double floor = 0.0;
  double scale = 0.0;
};

// Weighted least squares of p ~ floor + scale * eps^beta for fixed beta,
// with the floor clamped at zero (pure power laws must stay pure).
ProfileEval eval_beta(double beta, const std::vector<double>& e, const std::vector<double>& p,
                      const std::vector<double>& w) {
  double s_w = 0.0, s_u = 0.0, s_p = 0.0, s_uu = 0.0, s_up = 0.0;
  std::vector<double> u(e.size());
  for (std::size_t i = 0; i < e.size(); ++i) {
    u[i] = std::pow(e[i], beta);
    s_w += w[i];
    s_u += w[i] * u[i];
    s_p += w[i] * p[i];
    s_uu += w[i] * u[i] * u[i];
    s_up += w[i] * u[i] * p[i];
  }
  const double det = s_w * s_uu - s_u * s_u;
  ProfileEval out;
  if (det <= 0.0) return out;
  out.floor = (s_p * s_uu - s_u * s_up) / det;
  out.scale = (s_w * s_up - s_u * s_p) / det;
  if (out.floor < 0.0) {
    out.floor = 0.0;
    out.scale = s_uu > 0.0 ? s_up / s_uu : 0.0;
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double r = p[i] - (out.floor + out.scale * u[i]);
    sse += w[i] * r * r;
  }
  out.sse = sse;
  return out;
}

}  // namespace

PowerLawFit fit_tail_power_law(const std::vector<double>& eps,
                               const std::vector<std::uint64_t>& successes,
                               std::uint64_t trials, std::uint64_t min_successes, double p_cap) {
  if (eps.size() != successes.size())
    throw std::invalid_argument("fit_tail_power_law: grid/successes length mismatch");
  if (trials == 0) throw std::invalid_argument("fit_tail_power_law: trials must be > 0");

  PowerLawFit fit;
  std::vector<double> e, p, w;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double ph = static_cast<double>(successes[i]) / static_cast<double>(trials);
    if (successes[i] < min_successes || ph > p_cap) continue;
    e.push_back(eps[i]);
    p.push_back(ph);
    w.push_back(static_cast<double>(trials) / (ph * (1.0 - ph)));
    fit.used.push_back(i);
  }
  if (e.size() < 3) {
    fit.used.clear();
    return fit;  // not enough tail points; fit.valid stays false
  }

  // Coarse scan then golden-section refinement of the profiled SSE.
  constexpr double kBetaLo = 0.05, kBetaHi = 4.0;
  double best_beta = kBetaLo;
  double best_sse = std::numeric_limits<double>::infinity();
  constexpr int kScan = 80;
  for (int i = 0; i <= kScan; ++i) {
    const double beta = kBetaLo + (kBetaHi - kBetaLo) * i / kScan;
    const double sse = eval_beta(beta, e, p, w).sse;
    if (sse < best_sse) {
      best_sse = sse;
      best_beta = beta;
    }
  }
  const double step = (kBetaHi - kBetaLo) / kScan;
  double lo = std::max(kBetaLo, best_beta - step);
  double hi = std::min(kBetaHi, best_beta + step);
  constexpr double kInvPhi = 0.6180339887498949;
  for (int it = 0; it < 120; ++it) {
    const double m1 = hi - kInvPhi * (hi - lo);
    const double m2 = lo + kInvPhi * (hi - lo);
    if (eval_beta(m1, e, p, w).sse < eval_beta(m2, e, p, w).sse)
      hi = m2;
    else
      lo = m1;
  }
  fit.exponent = 0.5 * (lo + hi);
  const auto ev = eval_beta(fit.exponent, e, p, w);
  fit.floor = ev.floor;
  fit.scale = ev.scale;

  double sw = 0.0, pb = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sw += w[i];
    pb += w[i] * p[i];
  }
  pb /= sw;
  double sst = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sst += w[i] * (p[i] - pb) * (p[i] - pb);
  fit.r2 = sst > 0.0 ? 1.0 - ev.sse / sst : 1.0;
  fit.valid = true;
  return fit;
}

}  // namespace svtail
