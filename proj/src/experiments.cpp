#include "svtail/experiments.hpp"

#include "svtail/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace svtail {

namespace {

void require_increasing(const std::vector<double>& grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + ": empty grid");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw std::invalid_argument(std::string(what) + ": grid must be strictly increasing");
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TailCurve estimate_tail_curve(const EnsembleSpec& spec, const std::vector<double>& eps_grid,
                              std::uint64_t trials, std::uint64_t master_seed, int jobs,
                              double solver_tol) {
  spec.validate();
  require_increasing(eps_grid, "estimate_tail_curve");
  if (eps_grid.front() <= 0.0)
    throw std::invalid_argument("estimate_tail_curve: eps grid must be positive");
  if (trials < 100) throw std::invalid_argument("estimate_tail_curve: trials must be >= 100");

  std::vector<double> sigma(trials);
  std::vector<unsigned char> fell_back(trials, 0);
  parallel_for(trials, jobs, [&](std::uint64_t t) {
    const Matrix A = assemble_sparse_matrix(spec, SeedPath{master_seed, t, "tail"});
    const SingularTriple tri = singular_extremes(A, solver_tol);
    sigma[t] = tri.sigma_min;
    fell_back[t] = tri.used_fallback ? 1 : 0;
  });

  TailCurve curve;
  curve.eps_grid = eps_grid;
  curve.trials = trials;
  curve.successes.assign(eps_grid.size(), 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    curve.solver_fallbacks += fell_back[t];
    for (std::size_t i = 0; i < eps_grid.size(); ++i)
      if (sigma[t] <= eps_grid[i]) ++curve.successes[i];
  }

  for (std::size_t i = 0; i < eps_grid.size(); ++i) {
    const double ph = static_cast<double>(curve.successes[i]) / static_cast<double>(trials);
    curve.p_hat.push_back(ph);
    const Interval ci = clopper_pearson(curve.successes[i], trials);
    curve.ci_lo.push_back(ci.lo);
    curve.ci_hi.push_back(ci.hi);
    if (curve.successes[i] == 0) curve.zero_points.push_back(i);
  }

  const PowerLawFit fit = fit_tail_power_law(eps_grid, curve.successes, trials);
  curve.fit_valid = fit.valid;
  curve.fitted_exponent = fit.exponent;
  curve.fit_r2 = fit.r2;
  curve.fitted_floor = fit.floor;
  curve.fitted_scale = fit.scale;
  curve.fit_points = fit.used;
  return curve;
}

NormConcentration norm_concentration(const EnsembleSpec& spec, const std::vector<double>& k_grid,
                                     std::uint64_t trials, std::uint64_t master_seed, int jobs,
                                     double tol) {
  spec.validate();
  require_increasing(k_grid, "norm_concentration");
  if (trials < 100) throw std::invalid_argument("norm_concentration: trials must be >= 100");

  const double scale = std::pow(static_cast<double>(spec.n), spec.delta / 2.0);
  std::vector<double> norms(trials);
  std::vector<unsigned char> split_ok(trials, 0);
  parallel_for(trials, jobs, [&](std::uint64_t t) {
    const Matrix A = assemble_sparse_matrix(spec, SeedPath{master_seed, t, "norm"});
    const double na = operator_norm(A, tol);
    const double nr = operator_norm(A.real(), tol);
    const double ni = operator_norm(A.imag(), tol);
    norms[t] = na;
    split_ok[t] = (na <= nr + ni + tol) ? 1 : 0;
  });

  NormConcentration out;
  out.k_grid = k_grid;
  out.trials = trials;
  out.exceed.assign(k_grid.size(), 0);
  std::vector<double> scaled(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    out.split_holds += split_ok[t];
    scaled[t] = norms[t] / scale;
    for (std::size_t i = 0; i < k_grid.size(); ++i)
      if (norms[t] >= k_grid[i] * scale) ++out.exceed[i];
  }
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    out.freq.push_back(static_cast<double>(out.exceed[i]) / static_cast<double>(trials));
    const Interval ci = clopper_pearson(out.exceed[i], trials);
    out.ci_lo.push_back(ci.lo);
    out.ci_hi.push_back(ci.hi);
  }
  out.median_scaled_norm = median_of(scaled);
  return out;
}

int count_row_bound_set(const Matrix& A, const Vector& y, const std::vector<int>& J) {
  if (J.empty()) throw std::invalid_argument("count_row_bound_set: J must not be empty");
  if (A.cols() != y.size())
    throw std::invalid_argument("count_row_bound_set: dimension mismatch between A and y");

  std::vector<int> supp;
  for (int j = 0; j < y.size(); ++j)
    if (y(j) != Complex(0.0, 0.0)) supp.push_back(j);
  std::vector<char> in_j(static_cast<std::size_t>(A.cols()), 0);
  for (int j : J) {
    if (j < 0 || j >= A.cols() || y(j) == Complex(0.0, 0.0))
      throw std::invalid_argument("count_row_bound_set: J must index supp(y)");
    in_j[static_cast<std::size_t>(j)] = 1;
  }

  // A row qualifies iff its only nonzero entry across supp(y) sits in J
  // with modulus >= 1.
  int count = 0;
  for (int i = 0; i < A.rows(); ++i) {
    int nonzero = 0;
    int where = -1;
    for (int j : supp) {
      if (A(i, j) != Complex(0.0, 0.0)) {
        if (++nonzero > 1) break;
        where = j;
      }
    }
    if (nonzero == 1 && in_j[static_cast<std::size_t>(where)] && std::abs(A(i, where)) >= 1.0)
      ++count;
  }
  return count;
}

RowBoundExperiment run_row_bound_experiment(const EnsembleSpec& spec, int j_size,
                                            int support_size, std::uint64_t trials,
                                            std::uint64_t master_seed, int jobs) {
  spec.validate();
  if (support_size < 1 || support_size > spec.n)
    throw std::invalid_argument("run_row_bound_experiment: support_size out of range");
  if (j_size < 1 || j_size > support_size)
    throw std::invalid_argument("run_row_bound_experiment: requires 1 <= j_size <= support_size");

  // Entries are i.i.d., so a fixed support is distribution-equivalent to a
  // random one; the first support_size coordinates carry y.
  Vector y = Vector::Zero(spec.n);
  for (int j = 0; j < support_size; ++j) y(j) = 1.0 / std::sqrt(static_cast<double>(support_size));
  std::vector<int> J(static_cast<std::size_t>(j_size));
  std::iota(J.begin(), J.end(), 0);

  RowBoundExperiment out;
  out.trials = trials;
  out.j_size = j_size;
  out.support_size = support_size;
  out.counts.assign(trials, 0);
  parallel_for(trials, jobs, [&](std::uint64_t t) {
    const Matrix A = assemble_sparse_matrix(spec, SeedPath{master_seed, t, "rowbound"});
    out.counts[t] = count_row_bound_set(A, y, J);
  });

  const double p = spec.sparsity();
  out.expected_mean = spec.n * std::exp(-1.0) * j_size * p *
                      std::pow(1.0 - p, static_cast<double>(support_size - 1));
  const RowBoundTail tail = row_bound_tail(j_size, support_size, spec.delta, spec.n);
  out.threshold = tail.threshold;
  out.chernoff_bound = tail.prob;

  double sum = 0.0, sum2 = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    sum += out.counts[t];
    sum2 += static_cast<double>(out.counts[t]) * out.counts[t];
    if (out.counts[t] <= out.threshold) ++out.below_threshold;
  }
  const double nt = static_cast<double>(trials);
  out.mean_count = sum / nt;
  const double var = std::max(0.0, sum2 / nt - out.mean_count * out.mean_count);
  out.se_mean = std::sqrt(var / nt);
  out.freq_below = static_cast<double>(out.below_threshold) / nt;
  out.ci_below = clopper_pearson(out.below_threshold, trials);
  return out;
}

IncompTailExperiment incompressible_tail_experiment(const ClassificationParams& params, int n,
                                                    double delta,
                                                    const std::vector<double>& t_grid,
                                                    std::uint64_t trials,
                                                    std::uint64_t master_seed, int jobs) {
  require_increasing(t_grid, "incompressible_tail_experiment");
  params.validate(n);
  EnsembleSpec col_spec{n, delta, Field::Complex};
  col_spec.validate();

  std::vector<double> overlap(trials);
  parallel_for(trials, jobs, [&](std::uint64_t t) {
    const SeedPath base{master_seed, t, "incomp"};
    const Vector eta =
        sample_class_member(SphereClass::Verdict::IC, params, n, base.sub("eta"));
    const Vector y1 = sample_sparse_column(col_spec, base.sub("col"));
    overlap[t] = std::abs(eta.dot(y1));
  });

  IncompTailExperiment out;
  out.t_grid = t_grid;
  out.trials = trials;
  out.successes.assign(t_grid.size(), 0);
  for (std::uint64_t t = 0; t < trials; ++t)
    for (std::size_t i = 0; i < t_grid.size(); ++i)
      if (overlap[t] < t_grid[i]) ++out.successes[i];
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    out.freq.push_back(static_cast<double>(out.successes[i]) / static_cast<double>(trials));
    const Interval ci = clopper_pearson(out.successes[i], trials);
    out.ci_lo.push_back(ci.lo);
    out.ci_hi.push_back(ci.hi);
  }
  out.t_fit = fit_tail_power_law(t_grid, out.successes, trials);
  return out;
}

LineFit incompressible_prefactor_fit(const ClassificationParams& params,
                                     const std::vector<int>& n_grid, double delta, double t,
                                     std::uint64_t trials, std::uint64_t master_seed, int jobs) {
  if (n_grid.size() < 2)
    throw std::invalid_argument("incompressible_prefactor_fit: need >= 2 dimensions");
  std::vector<double> xs, ys, ws;
  for (std::size_t k = 0; k < n_grid.size(); ++k) {
    const IncompTailExperiment ex = incompressible_tail_experiment(
        params, n_grid[k], delta, {t}, trials, master_seed + k, jobs);
    const double f = ex.freq[0];
    if (ex.successes[0] < 10) continue;
    xs.push_back(std::log(static_cast<double>(n_grid[k])));
    ys.push_back(std::log(f));
    ws.push_back(static_cast<double>(trials) * f / (1.0 - f));
  }
  if (xs.size() < 2)
    throw std::runtime_error("incompressible_prefactor_fit: too few informative dimensions");
  return weighted_line_fit(xs, ys, ws);
}

DistanceReport distance_reduction_check(const EnsembleSpec& spec, std::uint64_t trials,
                                        std::uint64_t master_seed, double tol, int jobs) {
  spec.validate();
  if (spec.n < 3) throw std::invalid_argument("distance_reduction_check: n must be >= 3");
  const int n = spec.n;

  std::vector<double> identity_gap(trials, 0.0);
  std::vector<double> coord_violation(trials, 0.0);
  std::vector<unsigned char> fullrank(trials, 0);

  parallel_for(trials, jobs, [&](std::uint64_t t) {
    const Matrix A = assemble_sparse_matrix(spec, SeedPath{master_seed, t, "distance"});
    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinV);
    const double sigma_n = svd.singularValues()(n - 1);
    const Vector x = svd.matrixV().col(n - 1);

    Matrix w(n, n - 1);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      int c = 0;
      for (int j = 0; j < n; ++j)
        if (j != i) w.col(c++) = A.col(j);
      const double dist = distance_to_span(A.col(i), w);
      worst = std::max(worst, std::abs(x(i)) * dist - sigma_n);
      if (i == 0) {
        const KernelVector kv = kernel_unit_vector(Matrix(w.adjoint()));
        if (!kv.rank_deficient) {
          fullrank[t] = 1;
          identity_gap[t] = std::abs(dist - std::abs(kv.eta.dot(A.col(0))));
        }
      }
    }
    coord_violation[t] = worst;
  });

  DistanceReport out;
  out.trials = trials;
  for (std::uint64_t t = 0; t < trials; ++t) {
    out.coord_checks += static_cast<std::uint64_t>(n);
    out.max_coord_violation = std::max(out.max_coord_violation, coord_violation[t]);
    if (fullrank[t]) {
      ++out.fullrank_trials;
      out.max_identity_gap = std::max(out.max_identity_gap, identity_gap[t]);
    } else {
      ++out.rank_deficient_trials;
    }
  }
  (void)tol;
  return out;
}

double shift_calibrated_constant(const EnsembleSpec& spec) {
  const double p = spec.sparsity();
  const double corner_zero_prob = 1.0 - p;
  if (!(corner_zero_prob > 0.0))
    throw std::invalid_argument("shift_calibrated_constant: P[a_nn = 0] vanishes (p = 1)");
  // Two Markov events at threshold C'n and C'sqrt(n); each fails with
  // probability <= p/C'^2, so jointly <= 0.01 P when C'^2 = 200 p / (1-p).
  return 200.0 * p / corner_zero_prob;
}

ShiftTrialResult shift_counterexample_trial(int n, double t, double lambda,
                                            const EnsembleSpec& spec, const SeedPath& seed,
                                            double solver_tol) {
  if (n < 2) throw std::invalid_argument("shift_counterexample_trial: n must be >= 2");
  if (!(t > 0.0) || !(lambda > 0.0))
    throw std::invalid_argument("shift_counterexample_trial: t and lambda must be > 0");
  EnsembleSpec s = spec;
  s.n = n;
  s.validate();

  const Matrix A = assemble_sparse_matrix(s, seed);
  const Matrix M = build_shift_matrix(n, t);
  const Vector x = build_shift_witness(A, t, lambda);

  ShiftTrialResult out;
  out.corner_was_zero = A(n - 1, n - 1) == Complex(0.0, 0.0);

  const Matrix shifted = M + lambda * A;
  out.sigma_min = singular_extremes(shifted, solver_tol).sigma_min;
  out.witness_ratio = (shifted * x).norm() / x.norm();

  const double C = shift_calibrated_constant(s);
  out.bound_value = C * lambda * lambda * std::pow(static_cast<double>(n), 1.5) / t;
  out.hs_chain_value = (lambda * lambda / t) * hs_norm(A.leftCols(n - 1)) *
                       A.col(n - 1).head(n - 1).norm() / x.norm();

  const Matrix tid = t * Matrix::Identity(n, n) + lambda * A;
  out.tid_sigma_min = singular_extremes(tid, solver_tol).sigma_min;
  return out;
}

ShiftExperiment run_shift_experiment(int n, double t, double lambda, const EnsembleSpec& spec,
                                     std::uint64_t trials, std::uint64_t master_seed, int jobs) {
  ShiftExperiment out;
  out.trials = trials;
  out.results.resize(trials);
  EnsembleSpec s = spec;
  s.n = n;
  out.calibrated_C = shift_calibrated_constant(s);

  parallel_for(trials, jobs, [&](std::uint64_t tr) {
    out.results[tr] =
        shift_counterexample_trial(n, t, lambda, spec, SeedPath{master_seed, tr, "shift"});
  });

  std::vector<double> cond_sigma, tid_sigma;
  for (const auto& r : out.results) {
    tid_sigma.push_back(r.tid_sigma_min);
    if (r.corner_was_zero) {
      ++out.corner_zero;
      cond_sigma.push_back(r.sigma_min);
      if (r.sigma_min <= r.bound_value) ++out.bound_held_given_zero;
    }
  }
  out.corner_zero_ci = clopper_pearson(out.corner_zero, trials);
  out.conditional_bound_rate =
      out.corner_zero == 0
          ? 0.0
          : static_cast<double>(out.bound_held_given_zero) / static_cast<double>(out.corner_zero);
  out.median_conditional_sigma = median_of(cond_sigma);
  out.median_tid_sigma = median_of(tid_sigma);
  return out;
}

ZeroOutCheck zero_out_monotonicity_check(const EnsembleSpec& spec, std::uint64_t pairs,
                                         std::uint64_t matrices_per_pair,
                                         std::uint64_t master_seed, int jobs) {
  spec.validate();
  const int n = spec.n;

  struct PairOutcome {
    std::uint64_t comparisons = 0;
    std::uint64_t violations = 0;
    double worst_z = -1e300;
  };
  std::vector<PairOutcome> outcomes(pairs);

  parallel_for(pairs, jobs, [&](std::uint64_t pidx) {
    const SeedPath base{master_seed, pidx, "zeroout"};
    CounterRng rng(base.sub("pair"));

    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = rng.next_complex_gaussian();
    x /= x.norm();

    Vector y;
    if (rng.next_unit() < 0.5) {
      // Truncation pairing: zero out everything above a random coordinate's
      // squared modulus (the minimum always survives).
      const int k = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
      y = zero_out_above(x, std::norm(x(k)));
    } else {
      // General damping satisfying |y_i| <= |x_i|.
      y = x;
      for (int i = 0; i < n; ++i) y(i) *= rng.next_unit();
    }

    std::vector<double> ax(matrices_per_pair), ay(matrices_per_pair);
    for (std::uint64_t m = 0; m < matrices_per_pair; ++m) {
      const Matrix A =
          assemble_sparse_matrix(spec, base.sub("mat" + std::to_string(m)));
      ax[m] = (A * x).norm();
      ay[m] = (A * y).norm();
    }

    std::vector<double> sorted = ax;
    std::sort(sorted.begin(), sorted.end());
    PairOutcome& o = outcomes[pidx];
    for (const double q : {0.10, 0.30, 0.50}) {
      const double thr = sorted[static_cast<std::size_t>(q * (matrices_per_pair - 1))];
      std::uint64_t cx = 0, cy = 0;
      for (std::uint64_t m = 0; m < matrices_per_pair; ++m) {
        if (ax[m] <= thr) ++cx;
        if (ay[m] <= thr) ++cy;
      }
      const double mp = static_cast<double>(matrices_per_pair);
      const double px = cx / mp, py = cy / mp;
      const double pbar = (px + py) / 2.0;
      const double se = std::sqrt(std::max(pbar * (1.0 - pbar) * 2.0 / mp, 1e-300));
      const double z = (px - py) / se;
      ++o.comparisons;
      if (z > 3.0) ++o.violations;
      o.worst_z = std::max(o.worst_z, z);
    }
  });

  ZeroOutCheck out;
  out.pairs = pairs;
  out.matrices_per_pair = matrices_per_pair;
  out.worst_z = -1e300;
  for (const auto& o : outcomes) {
    out.comparisons += o.comparisons;
    out.violations += o.violations;
    out.worst_z = std::max(out.worst_z, o.worst_z);
  }
  return out;
}

NetCheckReport run_net_check(int n, int a, double b, double d1, double d2, std::uint64_t samples,
                             std::uint64_t master_seed, int jobs) {
  struct Slot {
    bool violation = false;
    double dist_ratio = 0.0;
    double band_margin = 1e300;
    int support = 0;
  };
  std::vector<Slot> slots(samples);

  parallel_for(samples, jobs, [&](std::uint64_t t) {
    Slot& s = slots[t];
    try {
      const Vector x = sample_v_member(n, a, b, d1, d2, SeedPath{master_seed, t, "net"});
      const auto [x3, cert] = net_approximate(x, a, b, d1, d2);
      const double sqrt_d1 = std::sqrt(d1);
      s.dist_ratio = cert.dist / sqrt_d1;
      s.band_margin = cert.band_mass_x3 - (d2 - 57.0 * sqrt_d1);
      s.support = cert.support_size;
      s.violation = cert.dist > 3.0 * sqrt_d1 || cert.support_size > a || s.band_margin < 0.0;
    } catch (const std::exception&) {
      s.violation = true;
    }
  });

  NetCheckReport out;
  out.samples = samples;
  out.min_band_margin = 1e300;
  for (const auto& s : slots) {
    out.violations += s.violation ? 1 : 0;
    out.max_dist_over_sqrt_d1 = std::max(out.max_dist_over_sqrt_d1, s.dist_ratio);
    out.min_band_margin = std::min(out.min_band_margin, s.band_margin);
    out.max_support = std::max(out.max_support, s.support);
  }
  return out;
}

}  // namespace svtail
