#include "svtail/bounds.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace svtail {

SmallBallBound complex_small_ball(double eps, double sigma2) {
  if (!(sigma2 > 0.0)) throw std::invalid_argument("complex_small_ball: sigma2 must be > 0");
  if (!(eps >= 0.0)) throw std::invalid_argument("complex_small_ball: eps must be >= 0");
  const double u = eps * eps / sigma2;
  return {-std::expm1(-u), u};
}

double paley_zygmund_sparse_bound(const RealVector& a_vec, double t, double delta, int n) {
  if (a_vec.size() == 0) throw std::invalid_argument("paley_zygmund_sparse_bound: empty a_vec");
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("paley_zygmund_sparse_bound: t must lie in [0,1]");
  double a = 0.0, mx = 0.0;
  for (Eigen::Index i = 0; i < a_vec.size(); ++i) {
    const double v = a_vec(i);
    if (v < 0.0) throw std::invalid_argument("paley_zygmund_sparse_bound: a_vec must be >= 0");
    a += v;
    mx = std::max(mx, v);
  }
  if (a == 0.0) throw std::invalid_argument("paley_zygmund_sparse_bound: a_vec must not be all zero");
  const double spread = std::pow(static_cast<double>(n), 1.0 - delta) - 1.0;
  return 1.0 - (1.0 - t) * (1.0 - t) * a / (a + spread * mx);
}

double dot_small_ball_bound(const Vector& x, double eps, double t, double delta, int n) {
  if (!(t > 0.0 && t < 1.0))
    throw std::invalid_argument("dot_small_ball_bound: t must lie in (0,1)");
  const double nx2 = x.squaredNorm();
  if (!(nx2 > 0.0)) throw std::invalid_argument("dot_small_ball_bound: x must be nonzero");
  double sup = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) sup = std::max(sup, std::norm(x(i)));
  const double nd = static_cast<double>(n);
  const double spread = std::pow(nd, 1.0 - delta) - 1.0;
  const double pz = 1.0 - (1.0 - t) * (1.0 - t) * nx2 / (nx2 + spread * sup);
  return pz + eps * eps / (std::pow(nd, delta - 1.0) * t * nx2);
}

RowBoundTail row_bound_tail(int j_size, int m, double delta, int n) {
  if (j_size < 1) throw std::invalid_argument("row_bound_tail: j_size must be >= 1");
  if (m < 1) throw std::invalid_argument("row_bound_tail: m must be >= 1");
  const double nd = static_cast<double>(n);
  const double p = std::pow(nd, delta - 1.0);
  const double base = j_size * std::pow(nd, delta) * std::pow(1.0 - p, m - 1);
  return {(3.0 / 20.0) * base, std::exp(-(3.0 / 80.0) * base)};
}

double hc_step_bound(double n, double delta, double a, double b, double d1, double d2, double c2,
                     double K) {
  if (!(a >= 1.0)) throw std::invalid_argument("hc_step_bound: a must be >= 1");
  if (a > c2 * std::pow(n, 1.0 - delta) * (1.0 + 1e-12))
    throw std::invalid_argument("hc_step_bound: requires a <= c2 * n^(1-delta)");
  const double req = 57.0 * std::sqrt(d1) + 320.0 * std::exp(c2) * K * K * d1;
  if (!(req > 0.0 && req < d2 && d2 < 1.0))
    throw std::invalid_argument(
        "hc_step_bound: requires 0 < 57 sqrt(d1) + 320 e^(c2) K^2 d1 < d2 < 1");
  const double s = 1.0 + std::floor((d2 - 57.0 * std::sqrt(d1)) * b / 8.0);
  return std::log(n) - s * std::pow(n, delta) / (40.0 * std::exp(c2)) +
         2.0 * a * std::log(3.0 / std::sqrt(d1)) + a * (1.0 + std::log(n / a));
}

int hc_partition_count(double delta) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("hc_partition_count: delta must lie in (0,1)");
  int m = 1;
  while (static_cast<double>(m) * delta / 2.0 < 1.0 - delta) ++m;
  return m;
}

Wide hc_d2_requirement(Wide d1, double c2, double K) {
  return 57.0L * sqrtl(d1) + 320.0L * expl(static_cast<Wide>(c2)) * static_cast<Wide>(K) *
                                 static_cast<Wide>(K) * d1;
}

HcSchedule build_hc_schedule(double n, double delta, double c2, double K, Wide eps1, Wide eps2) {
  if (!(n >= 2.0)) throw std::invalid_argument("build_hc_schedule: n must be >= 2");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("build_hc_schedule: delta must lie in (0,1)");
  if (!(c2 > 0.0) || !(K > 0.0))
    throw std::invalid_argument("build_hc_schedule: c2 and K must be > 0");
  if (!(eps1 > 0.0L) || !(eps2 > 0.0L) || !(eps1 + eps2 < 1.0L))
    throw std::invalid_argument("build_hc_schedule: requires 0 < eps1, eps2 and eps1 + eps2 < 1");

  HcSchedule sch;
  sch.m = hc_partition_count(delta);
  const int m = sch.m;
  sch.a.resize(m);
  sch.b.resize(m);
  sch.d1.resize(m);
  sch.d2.resize(m);

  const Wide nw = static_cast<Wide>(n);
  for (int k = 1; k < m; ++k) sch.a[k - 1] = powl(nw, static_cast<Wide>(k) * delta / 2.0L);
  sch.a[m - 1] = static_cast<Wide>(c2) * powl(nw, 1.0L - static_cast<Wide>(delta));
  sch.b[0] = 1.0L;
  for (int k = 2; k <= m; ++k) sch.b[k - 1] = sch.a[k - 2];

  auto fail = [](int level, const std::string& what) {
    std::ostringstream os;
    os << "build_hc_schedule infeasible: " << what << " at level " << level
       << " (eps1 + eps2 is not small enough)";
    throw std::runtime_error(os.str());
  };

  sch.d1[m - 1] = eps1 + eps2;
  for (int k = m; k >= 2; --k) {
    const Wide d1k = sch.d1[k - 1];
    if (!(d1k > 0.0L)) fail(k, "d1 underflowed to zero");
    sch.d2[k - 1] = 2.0L * hc_d2_requirement(d1k, c2, K);
    if (!(sch.d2[k - 1] > 0.0L)) fail(k, "d2 underflowed to zero");
    sch.d1[k - 2] = d1k + sch.d2[k - 1];
  }
  if (!(sch.d1[0] < 1.0L)) fail(1, "d1_1 >= 1");
  sch.d2[0] = 1.0L - sch.d1[0];

  for (int k = 1; k <= m; ++k) {
    if (!(sch.d1[k - 1] > 0.0L && sch.d1[k - 1] < 1.0L)) fail(k, "d1 outside (0,1)");
    // d2_1 = 1 - d1_1 can round to 1 when d1_1 is below extended-precision
    // resolution; that is still a valid chain.
    if (!(sch.d2[k - 1] > 0.0L && sch.d2[k - 1] <= 1.0L)) fail(k, "d2 outside (0,1]");
    if (!(sch.d2[k - 1] > hc_d2_requirement(sch.d1[k - 1], c2, K)))
      fail(k, "d2 <= 57 sqrt(d1) + 320 e^(c2) K^2 d1");
  }
  return sch;
}

namespace {

// D(n) = 1 + 4/c2 - 4/(c2 n^(1-delta)); n = +inf gives the limit form.
Wide denom_d(const McConstants& c, double n) {
  const Wide four_over_c2 = 4.0L / c.c2;
  if (std::isinf(n)) return 1.0L + four_over_c2;
  return 1.0L + four_over_c2 -
         four_over_c2 / powl(static_cast<Wide>(n), 1.0L - static_cast<Wide>(c.delta));
}

Wide entropy(Wide x) { return x * (1.0L - logl(x)); }  // x (1 - ln x)

// Difference forms of the selection inequalities (lhs - rhs); these stay
// accurate when both sides round to 1.
Wide margin_step3(const McConstants& c, Wide q) {
  const Wide s = entropy(c.delta_prime) / (1.0L - c.delta_prime);
  return expm1l(s) * (1.0L - 0.4L * q) - 0.1L * q;
}

Wide margin_step4(const McConstants& c, Wide q, Wide denom) {
  const Wide core = c.eps2 - 57.0L * sqrtl(c.eps1);
  const Wide kterm = 16.0L * static_cast<Wide>(c.K) * static_cast<Wide>(c.K) * c.eps1 /
                     (c.t * core * c.delta_prime);
  return 0.4L * q - 0.5L * core / denom + kterm;
}

Wide margin_step5a(const McConstants& c, Wide q) {
  const Wide lhs = 2.0L * c.c1 * logl(3.0L / sqrtl(c.eps1));
  const Wide rhs = (1.0L - c.delta_prime) * (log1pl(-0.2L * q) - log1pl(-0.3L * q));
  return lhs - rhs;
}

Wide margin_step5b(const McConstants& c, Wide q) {
  const Wide u = entropy(c.c1) / (1.0L - c.delta_prime);
  return expm1l(u) * (1.0L - 0.2L * q) - 0.1L * q;
}

Wide product_log_rate(const McConstants& c, Wide denom) {
  const Wide core = c.eps2 - 57.0L * sqrtl(c.eps1);
  const Wide kterm = 16.0L * static_cast<Wide>(c.K) * static_cast<Wide>(c.K) * c.eps1 /
                     (c.t * core * c.delta_prime);
  const Wide r_mc = -0.5L * core / denom + kterm;  // P_mc = 1 + r_mc
  return 2.0L * c.c1 * logl(3.0L / sqrtl(c.eps1)) + entropy(c.c1) + entropy(c.delta_prime) +
         (1.0L - c.delta_prime) * log1pl(r_mc);
}

// Largest x in (0, hi] with pred(x) true, assuming pred is monotone
// (true for small x); bisection on log10(x) to ~1e-6 relative.
Wide log_bisect_threshold(Wide hi, const std::function<bool(Wide)>& pred) {
  Wide lg_lo = -4900.0L;  // representable floor for extended precision
  Wide lg_hi = log10l(hi);
  if (pred(hi)) return hi;
  if (!pred(powl(10.0L, lg_lo))) return 0.0L;
  for (int it = 0; it < 200; ++it) {
    const Wide mid = 0.5L * (lg_lo + lg_hi);
    if (pred(powl(10.0L, mid)))
      lg_lo = mid;
    else
      lg_hi = mid;
    if (lg_hi - lg_lo < 1e-6L) break;
  }
  return powl(10.0L, lg_lo);
}

}  // namespace

McConstants choose_mc_constants(double K, double delta, double n_min, double c2) {
  if (!(K > 0.0)) throw std::invalid_argument("choose_mc_constants: K must be > 0");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("choose_mc_constants: delta must lie in (0,1)");
  if (!(c2 > 0.0)) throw std::invalid_argument("choose_mc_constants: c2 must be > 0");
  if (!(std::pow(n_min, 1.0 - delta) >= 2.0))
    throw std::invalid_argument("choose_mc_constants: n_min too small (need n^(1-delta) >= 2)");

  McConstants c;
  c.K = K;
  c.delta = delta;

  // Step 1: c2 and t with (1-t)^2 = 0.5.
  c.c2 = static_cast<Wide>(c2);
  c.t = 1.0L - sqrtl(0.5L);

  // Step 2: eps2 via schedule feasibility for any eps1 < eps2.
  const auto schedule_ok = [&](Wide sum) {
    try {
      build_hc_schedule(n_min, delta, c2, K, sum * 0.5L, sum * 0.5L);
      return true;
    } catch (const std::runtime_error&) {
      return false;
    }
  };
  const Wide sum_max = log_bisect_threshold(0.25L, schedule_ok);
  if (sum_max == 0.0L)
    throw std::runtime_error(
        "choose_mc_constants: step 2 infeasible; the d-recursion underflows extended precision "
        "for every representable eps1 + eps2 at this delta");
  c.eps2 = sum_max / 4.0L;  // eps1 < eps2 keeps eps1 + eps2 <= sum_max / 2

  // Worst case of every remaining inequality is the n -> infinity limit.
  const Wide q_inf = c.eps2 / denom_d(c, std::numeric_limits<double>::infinity());

  // Step 3: delta'.
  {
    McConstants probe = c;
    const Wide hi = log_bisect_threshold(0.45L, [&](Wide dp) {
      probe.delta_prime = dp;
      return margin_step3(probe, q_inf) < 0.0L;
    });
    if (hi == 0.0L) throw std::runtime_error("choose_mc_constants: step 3 infeasible");
    c.delta_prime = hi / 2.0L;
  }

  // Step 4: eps1.
  {
    McConstants probe = c;
    const Wide cap = std::min(c.eps2 / 2.0L, powl(c.eps2 / 57.0L, 2.0L) * 0.25L);
    const Wide hi = log_bisect_threshold(cap, [&](Wide e1) {
      probe.eps1 = e1;
      return margin_step4(probe, q_inf, denom_d(probe, std::numeric_limits<double>::infinity())) <
             0.0L;
    });
    if (hi == 0.0L) throw std::runtime_error("choose_mc_constants: step 4 infeasible");
    c.eps1 = hi / 4.0L;
  }

  // Step 5: c1 against both closing inequalities.
  {
    McConstants probe = c;
    const Wide hi_a = log_bisect_threshold(0.45L, [&](Wide c1) {
      probe.c1 = c1;
      return margin_step5a(probe, q_inf) < 0.0L;
    });
    const Wide hi_b = log_bisect_threshold(0.45L, [&](Wide c1) {
      probe.c1 = c1;
      return margin_step5b(probe, q_inf) < 0.0L;
    });
    if (hi_a == 0.0L || hi_b == 0.0L)
      throw std::runtime_error("choose_mc_constants: step 5 infeasible");
    c.c1 = std::min(hi_a, hi_b) / 2.0L;
  }

  // Confirm at n_min and in the limit; report the first failing step.
  for (const double n : {n_min, std::numeric_limits<double>::infinity()}) {
    for (const auto& chk : verify_mc_constants(c, n)) {
      if (!chk.holds)
        throw std::runtime_error("choose_mc_constants: selection failed verification at " +
                                 chk.id);
    }
  }
  return c;
}

std::vector<InequalityCheck> verify_mc_constants(const McConstants& c, double n) {
  std::vector<InequalityCheck> out;
  const Wide denom = denom_d(c, n);
  const Wide q = c.eps2 / denom;

  {
    InequalityCheck k;
    k.id = "step1-t";
    k.lhs = (1.0L - c.t) * (1.0L - c.t);
    k.rhs = 0.5L;
    k.margin = k.lhs - k.rhs;
    k.holds = fabsl(k.margin) <= 1e-12L;
    out.push_back(k);
  }
  {
    InequalityCheck k;
    k.id = "step2-schedule";
    try {
      const double n_sched = std::isinf(n) ? 1e8 : n;
      const HcSchedule sch =
          build_hc_schedule(n_sched, c.delta, static_cast<double>(c.c2), c.K, c.eps1, c.eps2);
      k.lhs = sch.d2[0];
      k.rhs = hc_d2_requirement(sch.d1[0], static_cast<double>(c.c2), c.K);
      k.margin = k.rhs - k.lhs;  // want rhs < lhs
      k.holds = k.lhs > k.rhs;
    } catch (const std::runtime_error&) {
      k.lhs = k.rhs = k.margin = std::numeric_limits<Wide>::quiet_NaN();
      k.holds = false;
    }
    out.push_back(k);
  }
  {
    InequalityCheck k;
    k.id = "step3";
    const Wide s = entropy(c.delta_prime) / (1.0L - c.delta_prime);
    k.lhs = expl(s) * (1.0L - 0.4L * q);
    k.rhs = 1.0L - 0.3L * q;
    k.margin = margin_step3(c, q);
    k.holds = k.margin < 0.0L;
    out.push_back(k);
  }
  {
    InequalityCheck k;
    k.id = "step4";
    const Wide core = c.eps2 - 57.0L * sqrtl(c.eps1);
    k.lhs = 1.0L - 0.5L * core / denom +
            16.0L * static_cast<Wide>(c.K) * static_cast<Wide>(c.K) * c.eps1 /
                (c.t * core * c.delta_prime);
    k.rhs = 1.0L - 0.4L * q;
    k.margin = margin_step4(c, q, denom);
    k.holds = core > 0.0L && k.margin < 0.0L;
    out.push_back(k);
  }
  {
    InequalityCheck k;
    k.id = "step5a";
    k.lhs = 2.0L * c.c1 * logl(3.0L / sqrtl(c.eps1)) + (1.0L - c.delta_prime) * log1pl(-0.3L * q);
    k.rhs = (1.0L - c.delta_prime) * log1pl(-0.2L * q);
    k.margin = margin_step5a(c, q);
    k.holds = k.margin < 0.0L;
    out.push_back(k);
  }
  {
    InequalityCheck k;
    k.id = "step5b";
    const Wide u = entropy(c.c1) / (1.0L - c.delta_prime);
    k.lhs = expl(u) * (1.0L - 0.2L * q);
    k.rhs = 1.0L - 0.1L * q;
    k.margin = margin_step5b(c, q);
    k.holds = k.margin < 0.0L;
    out.push_back(k);
  }
  {
    InequalityCheck k;
    k.id = "product";
    k.lhs = product_log_rate(c, denom);  // per-n log; needs to be < 0
    k.rhs = 0.0L;
    k.margin = k.lhs;
    k.holds = k.margin < 0.0L;
    out.push_back(k);
  }
  return out;
}

IncompWitness incompressible_witness(const ClassificationParams& params) {
  if (!(params.eps1 > 0.0 && params.c1 > 0.0))
    throw std::invalid_argument("incompressible_witness: requires c1, eps1 > 0");
  return {params.eps1 * params.c1 / 2.0, 2.0 / params.eps1};
}

TheoremTails theorem_tail_bounds(double eps, double n, double delta, double c, double C) {
  if (!(c > 0.0 && C > 0.0))
    throw std::invalid_argument("theorem_tail_bounds: c and C must be > 0");
  TheoremTails out;
  const double exp_term = std::exp(-c * std::pow(n, delta));
  out.ginibre_real = eps * n;
  out.ginibre_complex = eps * eps * n * n;
  out.ru_specialized = exp_term + C * eps * std::pow(n, (2.0 - delta) / 2.0);
  out.main = exp_term + C * eps * eps * std::pow(n, 2.0 - delta);
  return out;
}

}  // namespace svtail
