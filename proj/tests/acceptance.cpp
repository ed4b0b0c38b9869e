// Acceptance suite: every release-gating check, one per line, each verdict
// computed at its stated tolerance. Run with no arguments for the full
// suite or with a criterion number to run one check.

#include "svtail/bounds.hpp"
#include "svtail/ensemble.hpp"
#include "svtail/experiments.hpp"
#include "svtail/rng.hpp"
#include "svtail/sphere.hpp"
#include "svtail/spectral.hpp"
#include "svtail/stats.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

using namespace svtail;

namespace {

constexpr std::uint64_t kSeed = 20240613ull;

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  return g;
}

// --- criterion bodies -------------------------------------------------------

bool exponent_dichotomy(std::ostream& log) {
  const auto grid = log_grid(1e-3, 1e-1, 25);
  EnsembleSpec complex_spec{100, 0.5, Field::Complex};
  EnsembleSpec real_spec{100, 0.5, Field::Real};
  const TailCurve cc = estimate_tail_curve(complex_spec, grid, 10000, kSeed);
  const TailCurve cr = estimate_tail_curve(real_spec, grid, 10000, kSeed + 1);
  log << "complex exponent " << cc.fitted_exponent << " (r2 " << cc.fit_r2 << "), real exponent "
      << cr.fitted_exponent << " (r2 " << cr.fit_r2 << ")";
  return cc.fit_valid && cr.fit_valid && cc.fitted_exponent >= 1.7 && cc.fitted_exponent <= 2.3 &&
         cr.fitted_exponent >= 0.8 && cr.fitted_exponent <= 1.3 &&
         cc.fitted_exponent - cr.fitted_exponent >= 0.5;
}

bool one_dim_oracle(std::ostream& log) {
  EnsembleSpec spec{1, 0.5, Field::Complex};
  const auto grid = log_grid(0.02, 1.0, 18);
  const TailCurve curve = estimate_tail_curve(spec, grid, 100000, kSeed);
  int covered = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double exact = 1.0 - std::exp(-grid[i] * grid[i]);
    if (curve.ci_lo[i] <= exact && exact <= curve.ci_hi[i]) ++covered;
  }
  log << covered << "/" << grid.size() << " grid points cover 1 - exp(-eps^2)";
  return covered == static_cast<int>(grid.size());
}

bool small_ball_lemma(std::ostream& log) {
  const double sigma2 = 1.0;
  const int trials = 1000000;
  CounterRng rng(SeedPath{kSeed, 0, "accept/smallball"});
  std::vector<double> moduli(trials);
  for (int t = 0; t < trials; ++t) moduli[t] = std::abs(rng.next_complex_gaussian());
  std::sort(moduli.begin(), moduli.end());

  const auto grid = log_grid(std::sqrt(0.2), std::sqrt(3.0), 20);
  int dominated = 0, covered = 0;
  for (const double eps : grid) {
    const auto k = static_cast<std::uint64_t>(
        std::upper_bound(moduli.begin(), moduli.end(), eps) - moduli.begin());
    const double p_hat = static_cast<double>(k) / trials;
    const SmallBallBound sb = complex_small_ball(eps, sigma2);
    if (p_hat <= sb.bound) ++dominated;
    const Interval ci = clopper_pearson(k, trials);
    if (ci.lo <= sb.exact && sb.exact <= ci.hi) ++covered;
  }
  log << "dominated " << dominated << "/20, exact CDF covered " << covered << "/20";
  return dominated == 20 && covered == 20;
}

bool net_certificates(std::ostream& log) {
  struct Family {
    int n, a;
    double b, d1, d2;
  };
  const std::vector<Family> families = {{64, 16, 2.0, 5e-5, 0.50},
                                        {64, 32, 4.0, 1e-5, 0.70},
                                        {48, 12, 1.5, 3e-5, 0.45},
                                        {32, 8, 0.8, 2e-5, 0.60},
                                        {64, 20, 3.0, 7e-5, 0.52}};
  std::uint64_t samples = 0, violations = 0;
  double worst_dist = 0.0, worst_margin = 1e300;
  for (std::size_t f = 0; f < families.size(); ++f) {
    const auto& fam = families[f];
    const NetCheckReport rep =
        run_net_check(fam.n, fam.a, fam.b, fam.d1, fam.d2, 2000, kSeed + f);
    samples += rep.samples;
    violations += rep.violations;
    worst_dist = std::max(worst_dist, rep.max_dist_over_sqrt_d1);
    worst_margin = std::min(worst_margin, rep.min_band_margin);
  }
  log << violations << "/" << samples << " violations; worst dist/sqrt(d1) " << worst_dist
      << ", worst band margin " << worst_margin;
  return samples == 10000 && violations == 0;
}

bool zero_out_monotonicity(std::ostream& log) {
  EnsembleSpec spec{8, 0.5, Field::Complex};
  const ZeroOutCheck chk = zero_out_monotonicity_check(spec, 1000, 10000, kSeed);
  log << chk.violations << "/" << chk.comparisons << " grid comparisons above 3 pooled se (worst z "
      << chk.worst_z << ")";
  return chk.violations == 0;
}

bool row_bound_lemma(std::ostream& log) {
  EnsembleSpec spec{64, 0.5, Field::Complex};
  struct Cfg {
    int j, m;
  };
  const std::vector<Cfg> cfgs = {{1, 1}, {2, 2}, {2, 4}, {4, 8}};
  bool ok = true;
  for (std::size_t i = 0; i < cfgs.size(); ++i) {
    const RowBoundExperiment ex =
        run_row_bound_experiment(spec, cfgs[i].j, cfgs[i].m, 10000, kSeed + i);
    const bool mean_ok = std::abs(ex.mean_count - ex.expected_mean) <= 3.0 * ex.se_mean;
    const double se_below =
        std::sqrt(std::max(ex.freq_below * (1.0 - ex.freq_below) / 10000.0, 1e-12));
    const bool tail_ok = ex.freq_below <= ex.chernoff_bound + 3.0 * se_below;
    ok = ok && mean_ok && tail_ok;
    log << "(|J|=" << cfgs[i].j << ",m=" << cfgs[i].m << ": mean " << ex.mean_count << " vs "
        << ex.expected_mean << (mean_ok ? " ok" : " FAIL") << ", tail " << ex.freq_below
        << " <= " << ex.chernoff_bound << (tail_ok ? " ok" : " FAIL") << ") ";
  }
  return ok;
}

bool anticoncentration_lemmas(std::ostream& log) {
  bool ok = true;
  // Bernoulli-thinned sums against the variance bound.
  {
    const int n = 16;
    const double delta = 0.5, p = std::pow(n, delta - 1.0);
    std::vector<RealVector> shapes;
    shapes.push_back(RealVector::Ones(n));
    RealVector decay(n);
    for (int i = 0; i < n; ++i) decay(i) = 1.0 / (1.0 + i);
    shapes.push_back(decay);
    RealVector spiky = RealVector::Constant(n, 0.05);
    spiky(0) = 1.0;
    shapes.push_back(spiky);
    CounterRng rng(SeedPath{kSeed, 1, "accept/pz"});
    for (const auto& a_vec : shapes) {
      const double a = a_vec.sum();
      for (const double t : {0.2, 0.5, 0.8}) {
        const int trials = 100000;
        int hits = 0;
        for (int tr = 0; tr < trials; ++tr) {
          double s = 0.0;
          for (int i = 0; i < n; ++i)
            if (rng.next_bernoulli(p)) s += a_vec(i);
          if (s <= p * t * a) ++hits;
        }
        const double freq = static_cast<double>(hits) / trials;
        const double bound = paley_zygmund_sparse_bound(a_vec, t, delta, n);
        const double se = std::sqrt(std::max(freq * (1.0 - freq) / trials, 1e-12));
        if (freq > bound + 3.0 * se) {
          ok = false;
          log << "[thinned-sum t=" << t << " freq " << freq << " > " << bound << "] ";
        }
      }
    }
  }
  // Sparse row dot products against the combined bound.
  {
    const int n = 32;
    const double delta = 0.5, p = std::pow(n, delta - 1.0);
    const double t = 1.0 - std::sqrt(0.5);
    CounterRng setup(SeedPath{kSeed, 2, "accept/dotshape"});
    std::vector<Vector> shapes;
    shapes.push_back(Vector::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0)));
    Vector g(n);
    for (int i = 0; i < n; ++i) g(i) = setup.next_complex_gaussian();
    shapes.push_back(g / g.norm());
    Vector spike = Vector::Constant(n, Complex(0.05, 0.0));
    spike(0) = 1.0;
    shapes.push_back(spike / spike.norm());
    CounterRng rng(SeedPath{kSeed, 3, "accept/dot"});
    for (const auto& x : shapes) {
      for (const double eps : {0.05, 0.1, 0.2}) {
        const int trials = 100000;
        int hits = 0;
        for (int tr = 0; tr < trials; ++tr) {
          Complex dot = 0.0;
          for (int i = 0; i < n; ++i) {
            const bool keep = rng.next_bernoulli(p);
            const Complex gg = rng.next_complex_gaussian();
            if (keep) dot += gg * x(i);
          }
          if (std::abs(dot) <= eps) ++hits;
        }
        const double freq = static_cast<double>(hits) / trials;
        const double bound = dot_small_ball_bound(x, eps, t, delta, n);
        const double se = std::sqrt(std::max(freq * (1.0 - freq) / trials, 1e-12));
        if (freq > bound + 3.0 * se) {
          ok = false;
          log << "[row-dot eps=" << eps << " freq " << freq << " > " << bound << "] ";
        }
      }
    }
  }
  if (ok) log << "all analytic bounds dominate their sampled frequencies (3 se slack, 1e5 trials)";
  return ok;
}

bool constant_selection(std::ostream& log) {
  bool ok = true;
  for (const double delta : {0.3, 0.5, 0.7}) {
    const McConstants mc = choose_mc_constants(6.0, delta, 1000.0);
    int checked = 0;
    bool all = true;
    for (double n = 1000.0; n <= 1e8; n *= 2.0) {
      for (const auto& chk : verify_mc_constants(mc, n)) {
        all = all && chk.holds;
        ++checked;
      }
    }
    for (const auto& chk : verify_mc_constants(mc, std::numeric_limits<double>::infinity()))
      all = all && chk.holds;
    ok = ok && all;
    log << "delta=" << delta << ": " << (all ? "holds" : "FAILS") << " over " << checked
        << " checks (log10 eps2 ~ " << static_cast<double>(log10l(mc.eps2)) << ") ";
  }
  return ok;
}

bool schedule_invariants(std::ostream& log) {
  bool ok = true;
  for (int i = 1; i <= 9; ++i) {
    const double delta = 0.1 * i;
    // Independent hand computation of the level count.
    int m_ref = 1;
    while (m_ref * delta / 2.0 < 1.0 - delta) ++m_ref;
    if (hc_partition_count(delta) != m_ref) {
      ok = false;
      log << "[delta=" << delta << ": m mismatch] ";
      continue;
    }

    if (i == 1) {
      // 18 levels: the constraint d2 > 57 sqrt(d1) forces
      // d1_{k+1} < (d1_k / 57)^2, so from d1_1 < 1 the chain drops below
      // every positive extended-precision value by level 11. Construction
      // must refuse rather than return a broken schedule.
      long double bound = 1.0L;
      int level = 1;
      while (bound > 0.0L && level < m_ref) {
        bound = (bound / 57.0L) * (bound / 57.0L);
        ++level;
      }
      bool refused = false;
      try {
        build_hc_schedule(1000.0, delta, 1.0, 6.0, 1e-2000L, 1e-2000L);
      } catch (const std::runtime_error&) {
        refused = true;
      }
      ok = ok && refused && bound == 0.0L;
      log << "[delta=0.1: m=18 verified; d-chain provably underflows by level " << level
          << (refused ? ", correctly reported infeasible] " : ", NOT reported] ");
      continue;
    }

    McConstants mc;
    try {
      mc = choose_mc_constants(6.0, delta, 1000.0);
    } catch (const std::runtime_error& e) {
      ok = false;
      log << "[delta=" << delta << ": selection failed: " << e.what() << "] ";
      continue;
    }
    const HcSchedule sch = build_hc_schedule(1000.0, delta, 1.0, 6.0, mc.eps1, mc.eps2);
    bool inv = sch.m == m_ref;
    inv = inv && (sch.m - 1) * delta / 2.0 < 1.0 - delta && sch.m * delta / 2.0 >= 1.0 - delta;
    inv = inv && sch.b[0] == 1.0L;
    for (int k = 2; k <= sch.m; ++k) inv = inv && sch.b[k - 1] == sch.a[k - 2];
    inv = inv && fabsl(sch.a[sch.m - 1] - powl(1000.0L, 1.0L - static_cast<long double>(delta))) <=
                     1e-12L * sch.a[sch.m - 1];
    inv = inv && fabsl(sch.d1[0] + sch.d2[0] - 1.0L) <= 1e-18L;
    inv = inv && sch.d1[sch.m - 1] == mc.eps1 + mc.eps2;
    for (int k = 1; k < sch.m; ++k) inv = inv && sch.d1[k - 1] == sch.d1[k] + sch.d2[k];
    for (int k = 1; k <= sch.m; ++k)
      inv = inv && sch.d2[k - 1] > hc_d2_requirement(sch.d1[k - 1], 1.0, 6.0);
    ok = ok && inv;
    log << "[delta=" << delta << ": m=" << sch.m << (inv ? " ok] " : " INVARIANT FAIL] ");
  }
  return ok;
}

bool distance_identity(std::ostream& log) {
  EnsembleSpec spec{50, 0.5, Field::Complex};
  const DistanceReport rep = distance_reduction_check(spec, 1000, kSeed);
  log << "identity gap " << rep.max_identity_gap << " over " << rep.fullrank_trials
      << " full-rank trials (" << rep.rank_deficient_trials << " excluded); worst coordinate "
      << "violation " << rep.max_coord_violation;
  return rep.fullrank_trials >= 900 && rep.max_identity_gap <= 1e-8 &&
         rep.max_coord_violation <= 1e-8;
}

bool shift_counterexample(std::ostream& log) {
  EnsembleSpec spec{50, 0.5, Field::Complex};
  const ShiftExperiment ex = run_shift_experiment(50, 100.0, 0.1, spec, 1000, kSeed);
  log << "bound held " << ex.bound_held_given_zero << "/" << ex.corner_zero
      << " conditioned trials (C = " << ex.calibrated_C << "); conditional median sigma "
      << ex.median_conditional_sigma << " vs unshifted " << ex.median_tid_sigma;
  return ex.corner_zero > 0 && ex.conditional_bound_rate >= 0.99 &&
         ex.median_conditional_sigma < 0.01 * ex.median_tid_sigma;
}

bool norm_split(std::ostream& log) {
  EnsembleSpec spec{100, 0.5, Field::Complex};
  const NormConcentration nc = norm_concentration(spec, log_grid(0.5, 4.0, 9), 1000, kSeed);
  bool monotone = true;
  for (std::size_t i = 1; i < nc.freq.size(); ++i)
    monotone = monotone && nc.freq[i] <= nc.freq[i - 1];
  log << "split inequality " << nc.split_holds << "/" << nc.trials << ", exceedance frequencies "
      << (monotone ? "nonincreasing" : "NOT monotone");
  return nc.split_holds == nc.trials && monotone;
}

struct Criterion {
  int id;
  std::string name;
  std::function<bool(std::ostream&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "tail exponent dichotomy at n = 100 (complex in [1.7,2.3], real in [0.8,1.3])",
       exponent_dichotomy},
      {2, "1x1 tail matches 1 - exp(-eps^2) within 95% intervals", one_dim_oracle},
      {3, "complex small-ball: sampled CDF dominated by eps^2/sigma^2 and matching the exact law",
       small_ball_lemma},
      {4, "sparse-net certificates: dist <= 3 sqrt(d1) and band mass >= d2 - 57 sqrt(d1), no "
          "violations",
       net_certificates},
      {5, "zero-out monotonicity of |Ax| lower tails (3 pooled se)", zero_out_monotonicity},
      {6, "no-cancellation row counts: mean and Chernoff tail at n = 64", row_bound_lemma},
      {7, "thinned-sum and row-dot anticoncentration bounds dominate sampling",
       anticoncentration_lemmas},
      {8, "chronological constant selection verifies on an n-grid to 1e8 (K = 6)",
       constant_selection},
      {9, "level schedule invariants across delta = 0.1 ... 0.9", schedule_invariants},
      {10, "column-distance identity and per-coordinate variational inequality at n = 50",
       distance_identity},
      {11, "corner-zeroed shift: calibrated bound holds in >= 99% of conditioned trials",
       shift_counterexample},
      {12, "operator-norm split and monotone exceedance at n = 100", norm_split},
  };

  int requested = 0;
  if (argc > 1) requested = std::atoi(argv[1]);

  int failures = 0;
  for (const auto& c : criteria) {
    if (requested != 0 && c.id != requested) continue;
    std::ostringstream detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail << "exception: " << e.what();
    }
    if (!ok) ++failures;
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << c.id << ": " << c.name << " -- "
              << detail.str() << "\n";
  }
  return failures;
}
