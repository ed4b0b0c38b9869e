// svtail: Monte Carlo laboratory for least-singular-value tail bounds of
// sparse complex Gaussian matrices. Every run writes a manifest (full seed
// and configuration provenance), a CSV data file, and a JSON summary; a
// saved manifest can be re-executed byte-identically with `svtail rerun`.

#include "svtail/bounds.hpp"
#include "svtail/ensemble.hpp"
#include "svtail/experiments.hpp"
#include "svtail/sphere.hpp"
#include "svtail/spectral.hpp"
#include "svtail/stats.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace svtail;

namespace {

constexpr const char* kToolVersion = "svtail 1.0.0";

// ---- configuration -------------------------------------------------------

using Config = std::map<std::string, std::string>;

double get_d(const Config& c, const std::string& k) {
  return std::stod(c.at(k));
}
long double get_ld(const Config& c, const std::string& k) {
  return strtold(c.at(k).c_str(), nullptr);
}
std::uint64_t get_u64(const Config& c, const std::string& k) {
  return std::stoull(c.at(k));
}
int get_i(const Config& c, const std::string& k) {
  return std::stoi(c.at(k));
}

std::string hash_config(const std::string& command, const Config& cfg) {
  std::uint64_t h = 1469598103934665603ull;
  const auto eat = [&h](const std::string& s) {
    for (char ch : s) {
      h ^= static_cast<unsigned char>(ch);
      h *= 1099511628211ull;
    }
  };
  eat(command);
  for (const auto& [k, v] : cfg) {
    eat("|");
    eat(k);
    eat("=");
    eat(v);
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string iso_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char buf[64];
  std::tm tm_utc{};
  gmtime_r(&tt, &tm_utc);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_wide(Wide v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.21Lg", v);
  return buf;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = lo * std::pow(hi / lo, points > 1 ? static_cast<double>(i) / (points - 1) : 0.0);
  return g;
}

// ---- output files ---------------------------------------------------------

struct RunFiles {
  fs::path csv;
  fs::path summary;
  fs::path manifest;
};

RunFiles run_files(const fs::path& out_dir, const std::string& command) {
  return {out_dir / (command + ".csv"), out_dir / (command + "_summary.json"),
          out_dir / (command + "_manifest.json")};
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

// ---- experiment handlers ---------------------------------------------------

int cmd_tail(const Config& cfg, const RunFiles& files) {
  EnsembleSpec spec{get_i(cfg, "n"), get_d(cfg, "delta"), field_from_string(cfg.at("field"))};
  const double lo = get_d(cfg, "eps-min"), hi = get_d(cfg, "eps-max");
  const int points =
      std::max(2, static_cast<int>(std::lround(get_d(cfg, "points-per-decade") *
                                               std::log10(hi / lo))) + 1);
  const auto grid = log_grid(lo, hi, points);
  const TailCurve curve = estimate_tail_curve(spec, grid, get_u64(cfg, "trials"),
                                              get_u64(cfg, "seed"), get_i(cfg, "jobs"));

  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < grid.size(); ++i)
    rows.push_back({fmt(grid[i]), std::to_string(curve.trials),
                    std::to_string(curve.successes[i]), fmt(curve.p_hat[i]),
                    fmt(curve.ci_lo[i]), fmt(curve.ci_hi[i])});
  write_csv(files.csv, {"eps", "trials", "successes", "p_hat", "ci_lo", "ci_hi"}, rows);

  const double c_const = get_d(cfg, "c"), C_const = get_d(cfg, "C");
  json bound_main = json::array(), bound_ru = json::array();
  for (const double e : grid) {
    const TheoremTails tb = theorem_tail_bounds(e, spec.n, spec.delta, c_const, C_const);
    bound_main.push_back(tb.main);
    bound_ru.push_back(tb.ru_specialized);
  }
  json summary = {{"fitted_exponent", curve.fitted_exponent},
                  {"fit_r2", curve.fit_r2},
                  {"fitted_floor", curve.fitted_floor},
                  {"fitted_scale", curve.fitted_scale},
                  {"fit_valid", curve.fit_valid},
                  {"fit_points", curve.fit_points},
                  {"zero_success_points", curve.zero_points},
                  {"solver_fallbacks", curve.solver_fallbacks},
                  {"analytic_bound_main", bound_main},
                  {"analytic_bound_real_specialization", bound_ru},
                  {"bound_constants", {{"c", c_const}, {"C", C_const}}}};
  write_json(files.summary, summary);
  std::cout << "tail: fitted exponent " << curve.fitted_exponent << " (r2 " << curve.fit_r2
            << ", floor " << curve.fitted_floor << ")\n";
  return 0;
}

int cmd_norm(const Config& cfg, const RunFiles& files) {
  EnsembleSpec spec{get_i(cfg, "n"), get_d(cfg, "delta"), field_from_string(cfg.at("field"))};
  const auto grid = log_grid(get_d(cfg, "k-min"), get_d(cfg, "k-max"), get_i(cfg, "k-points"));
  const NormConcentration nc = norm_concentration(spec, grid, get_u64(cfg, "trials"),
                                                  get_u64(cfg, "seed"), get_i(cfg, "jobs"));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < grid.size(); ++i)
    rows.push_back({fmt(grid[i]), std::to_string(nc.trials), std::to_string(nc.exceed[i]),
                    fmt(nc.freq[i]), fmt(nc.ci_lo[i]), fmt(nc.ci_hi[i])});
  write_csv(files.csv, {"K", "trials", "exceed", "freq", "ci_lo", "ci_hi"}, rows);
  write_json(files.summary,
             {{"split_inequality_held", nc.split_holds},
              {"split_inequality_rate",
               static_cast<double>(nc.split_holds) / static_cast<double>(nc.trials)},
              {"median_norm_over_n_delta_half", nc.median_scaled_norm}});
  std::cout << "norm: median |A|/n^(delta/2) = " << nc.median_scaled_norm << ", split held "
            << nc.split_holds << "/" << nc.trials << "\n";
  return 0;
}

int cmd_rowbound(const Config& cfg, const RunFiles& files) {
  EnsembleSpec spec{get_i(cfg, "n"), get_d(cfg, "delta"), Field::Complex};
  const RowBoundExperiment ex =
      run_row_bound_experiment(spec, get_i(cfg, "j-size"), get_i(cfg, "support"),
                               get_u64(cfg, "trials"), get_u64(cfg, "seed"), get_i(cfg, "jobs"));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t t = 0; t < ex.counts.size(); ++t)
    rows.push_back({std::to_string(t), std::to_string(ex.counts[t])});
  write_csv(files.csv, {"trial", "count"}, rows);
  write_json(files.summary, {{"mean_count", ex.mean_count},
                             {"se_mean", ex.se_mean},
                             {"expected_mean", ex.expected_mean},
                             {"threshold", ex.threshold},
                             {"chernoff_bound", ex.chernoff_bound},
                             {"freq_below_threshold", ex.freq_below},
                             {"ci_below", {ex.ci_below.lo, ex.ci_below.hi}}});
  std::cout << "rowbound: mean " << ex.mean_count << " vs expected " << ex.expected_mean
            << "; P[count <= " << ex.threshold << "] = " << ex.freq_below
            << " <= " << ex.chernoff_bound << "\n";
  return 0;
}

int cmd_net_check(const Config& cfg, const RunFiles& files) {
  const NetCheckReport rep =
      run_net_check(get_i(cfg, "n"), get_i(cfg, "a"), get_d(cfg, "b"), get_d(cfg, "d1"),
                    get_d(cfg, "d2"), get_u64(cfg, "samples"), get_u64(cfg, "seed"),
                    get_i(cfg, "jobs"));
  write_csv(files.csv,
            {"samples", "violations", "max_dist_over_sqrt_d1", "min_band_margin", "max_support"},
            {{std::to_string(rep.samples), std::to_string(rep.violations),
              fmt(rep.max_dist_over_sqrt_d1), fmt(rep.min_band_margin),
              std::to_string(rep.max_support)}});
  write_json(files.summary, {{"samples", rep.samples},
                             {"violations", rep.violations},
                             {"max_dist_over_sqrt_d1", rep.max_dist_over_sqrt_d1},
                             {"min_band_margin", rep.min_band_margin},
                             {"max_support", rep.max_support}});
  std::cout << "net-check: " << rep.violations << "/" << rep.samples
            << " certificate violations; worst dist/sqrt(d1) = " << rep.max_dist_over_sqrt_d1
            << "\n";
  return rep.violations == 0 ? 0 : 2;
}

int cmd_constants(const Config& cfg, const RunFiles& files) {
  const McConstants mc = choose_mc_constants(get_d(cfg, "K"), get_d(cfg, "delta"),
                                             get_d(cfg, "n-min"), get_d(cfg, "c2"));
  std::vector<std::vector<std::string>> rows;
  bool all_hold = true;
  std::vector<double> ns;
  for (double n = get_d(cfg, "n-min"); n <= get_d(cfg, "n-grid-max"); n *= 2.0) ns.push_back(n);
  ns.push_back(std::numeric_limits<double>::infinity());
  for (const double n : ns) {
    for (const auto& chk : verify_mc_constants(mc, n)) {
      all_hold = all_hold && chk.holds;
      rows.push_back({fmt(n), chk.id, fmt_wide(chk.lhs), fmt_wide(chk.rhs), fmt_wide(chk.margin),
                      chk.holds ? "1" : "0"});
    }
  }
  write_csv(files.csv, {"n", "inequality", "lhs", "rhs", "margin", "holds"}, rows);
  write_json(files.summary, {{"c1", fmt_wide(mc.c1)},
                             {"c2", fmt_wide(mc.c2)},
                             {"eps1", fmt_wide(mc.eps1)},
                             {"eps2", fmt_wide(mc.eps2)},
                             {"t", fmt_wide(mc.t)},
                             {"delta_prime", fmt_wide(mc.delta_prime)},
                             {"K", mc.K},
                             {"delta", mc.delta},
                             {"all_inequalities_hold", all_hold}});
  std::cout << "constants: t = " << static_cast<double>(mc.t)
            << ", eps2 = " << fmt_wide(mc.eps2) << ", all inequalities "
            << (all_hold ? "hold" : "FAIL") << "\n";
  return all_hold ? 0 : 2;
}

int cmd_schedule(const Config& cfg, const RunFiles& files) {
  const double n = get_d(cfg, "n"), delta = get_d(cfg, "delta");
  const double c2 = get_d(cfg, "c2"), K = get_d(cfg, "K");
  Wide eps1, eps2;
  if (cfg.at("eps1") == "auto" || cfg.at("eps2") == "auto") {
    const McConstants mc = choose_mc_constants(K, delta, n, c2);
    eps1 = mc.eps1;
    eps2 = mc.eps2;
  } else {
    eps1 = get_ld(cfg, "eps1");
    eps2 = get_ld(cfg, "eps2");
  }
  const HcSchedule sch = build_hc_schedule(n, delta, c2, K, eps1, eps2);
  std::vector<std::vector<std::string>> rows;
  for (int k = 1; k <= sch.m; ++k)
    rows.push_back({std::to_string(k), fmt_wide(sch.a[k - 1]), fmt_wide(sch.b[k - 1]),
                    fmt_wide(sch.d1[k - 1]), fmt_wide(sch.d2[k - 1])});
  write_csv(files.csv, {"k", "a", "b", "d1", "d2"}, rows);
  write_json(files.summary, {{"m", sch.m},
                             {"eps1", fmt_wide(eps1)},
                             {"eps2", fmt_wide(eps2)},
                             {"d1_top", fmt_wide(sch.d1[0])},
                             {"d2_top", fmt_wide(sch.d2[0])}});
  std::cout << "schedule: m = " << sch.m << " levels, d1_1 = " << fmt_wide(sch.d1[0]) << "\n";
  return 0;
}

int cmd_incompressible(const Config& cfg, const RunFiles& files) {
  ClassificationParams params{get_d(cfg, "c1"), get_d(cfg, "c2"), get_d(cfg, "eps1"),
                              get_d(cfg, "eps2"), get_d(cfg, "delta")};
  const int points =
      std::max(2, static_cast<int>(std::lround(get_d(cfg, "points-per-decade") *
                                               std::log10(get_d(cfg, "t-max") /
                                                          get_d(cfg, "t-min")))) + 1);
  const auto grid = log_grid(get_d(cfg, "t-min"), get_d(cfg, "t-max"), points);
  const IncompTailExperiment ex = incompressible_tail_experiment(
      params, get_i(cfg, "n"), get_d(cfg, "delta"), grid, get_u64(cfg, "trials"),
      get_u64(cfg, "seed"), get_i(cfg, "jobs"));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < grid.size(); ++i)
    rows.push_back({fmt(grid[i]), std::to_string(ex.trials), std::to_string(ex.successes[i]),
                    fmt(ex.freq[i]), fmt(ex.ci_lo[i]), fmt(ex.ci_hi[i])});
  write_csv(files.csv, {"t", "trials", "successes", "freq", "ci_lo", "ci_hi"}, rows);
  write_json(files.summary, {{"t_exponent", ex.t_fit.exponent},
                             {"fit_r2", ex.t_fit.r2},
                             {"fit_valid", ex.t_fit.valid},
                             {"fitted_floor", ex.t_fit.floor}});
  std::cout << "incompressible: fitted t-exponent " << ex.t_fit.exponent << "\n";
  return 0;
}

int cmd_distance(const Config& cfg, const RunFiles& files) {
  EnsembleSpec spec{get_i(cfg, "n"), get_d(cfg, "delta"), field_from_string(cfg.at("field"))};
  const DistanceReport rep = distance_reduction_check(spec, get_u64(cfg, "trials"),
                                                      get_u64(cfg, "seed"), 1e-8,
                                                      get_i(cfg, "jobs"));
  write_csv(files.csv,
            {"trials", "fullrank_trials", "rank_deficient_trials", "max_identity_gap",
             "max_coord_violation"},
            {{std::to_string(rep.trials), std::to_string(rep.fullrank_trials),
              std::to_string(rep.rank_deficient_trials), fmt(rep.max_identity_gap),
              fmt(rep.max_coord_violation)}});
  write_json(files.summary, {{"trials", rep.trials},
                             {"fullrank_trials", rep.fullrank_trials},
                             {"rank_deficient_trials", rep.rank_deficient_trials},
                             {"max_identity_gap", rep.max_identity_gap},
                             {"max_coord_violation", rep.max_coord_violation}});
  std::cout << "distance: identity gap " << rep.max_identity_gap << ", worst coord violation "
            << rep.max_coord_violation << "\n";
  return 0;
}

int cmd_shift(const Config& cfg, const RunFiles& files) {
  EnsembleSpec spec{get_i(cfg, "n"), get_d(cfg, "delta"), Field::Complex};
  const ShiftExperiment ex =
      run_shift_experiment(get_i(cfg, "n"), get_d(cfg, "t"), get_d(cfg, "lambda"), spec,
                           get_u64(cfg, "trials"), get_u64(cfg, "seed"), get_i(cfg, "jobs"));
  std::vector<std::vector<std::string>> rows;
  for (std::size_t t = 0; t < ex.results.size(); ++t) {
    const auto& r = ex.results[t];
    rows.push_back({std::to_string(t), fmt(r.sigma_min), r.corner_was_zero ? "1" : "0",
                    fmt(r.witness_ratio), fmt(r.bound_value), fmt(r.hs_chain_value),
                    fmt(r.tid_sigma_min)});
  }
  write_csv(files.csv,
            {"trial", "sigma_min", "corner_zero", "witness_ratio", "bound_value",
             "hs_chain_value", "tid_sigma_min"},
            rows);
  write_json(files.summary,
             {{"calibrated_C", ex.calibrated_C},
              {"corner_zero_trials", ex.corner_zero},
              {"corner_zero_ci", {ex.corner_zero_ci.lo, ex.corner_zero_ci.hi}},
              {"conditional_bound_rate", ex.conditional_bound_rate},
              {"median_conditional_sigma", ex.median_conditional_sigma},
              {"median_tid_sigma", ex.median_tid_sigma}});
  std::cout << "shift: bound held in " << ex.bound_held_given_zero << "/" << ex.corner_zero
            << " corner-zero trials; conditional median sigma " << ex.median_conditional_sigma
            << " vs unshifted " << ex.median_tid_sigma << "\n";
  return 0;
}

// ---- dispatch --------------------------------------------------------------

int dispatch(const std::string& command, Config cfg, const fs::path& out_dir) {
  fs::create_directories(out_dir);
  const RunFiles files = run_files(out_dir, command);

  json manifest = {{"command", command},
                   {"config", cfg},
                   {"config_hash", hash_config(command, cfg)},
                   {"master_seed", get_u64(cfg, "seed")},
                   {"tool_version", kToolVersion},
                   {"started", iso_now()}};

  int rc = 0;
  if (command == "tail")
    rc = cmd_tail(cfg, files);
  else if (command == "norm")
    rc = cmd_norm(cfg, files);
  else if (command == "rowbound")
    rc = cmd_rowbound(cfg, files);
  else if (command == "net-check")
    rc = cmd_net_check(cfg, files);
  else if (command == "constants")
    rc = cmd_constants(cfg, files);
  else if (command == "schedule")
    rc = cmd_schedule(cfg, files);
  else if (command == "incompressible")
    rc = cmd_incompressible(cfg, files);
  else if (command == "distance")
    rc = cmd_distance(cfg, files);
  else if (command == "shift")
    rc = cmd_shift(cfg, files);
  else
    throw std::invalid_argument("unknown command " + command);

  manifest["finished"] = iso_now();
  manifest["outputs"] = {files.csv.string(), files.summary.string()};
  write_json(files.manifest, manifest);
  return rc;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SVTAIL_SEED")) return std::stoull(env);
  return 42;
}

// One option registered both with CLI11 (so flags and the config file work)
// and in the resolved-config map the manifest records.
void opt(CLI::App* app, Config& cfg, const std::string& name, const std::string& def,
         const std::string& help) {
  cfg[name] = def;
  app->add_option_function<std::string>(
         "--" + name, [&cfg, name](const std::string& v) { cfg[name] = v; }, help)
      ->default_str(def);
}

void common_opts(CLI::App* app, Config& cfg, std::string& out_dir) {
  opt(app, cfg, "seed", std::to_string(default_seed()),
      "master seed (SVTAIL_SEED overrides the default)");
  opt(app, cfg, "jobs", "1", "worker threads; results are identical for any value");
  app->add_option("--out-dir", out_dir, "directory for CSV/JSON/manifest outputs")
      ->capture_default_str();
  app->set_config("--config", "", "flat key=value configuration file");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical laboratory for least-singular-value tails of sparse random matrices"};
  app.require_subcommand(1);
  std::string out_dir = ".";

  std::map<std::string, Config> cfgs;

  auto* tail = app.add_subcommand(
      "tail", "Lower-tail curve of the least singular value with exponent fit");
  common_opts(tail, cfgs["tail"], out_dir);
  opt(tail, cfgs["tail"], "n", "100", "matrix dimension");
  opt(tail, cfgs["tail"], "delta", "0.5", "sparsity exponent, p = n^(delta-1)");
  opt(tail, cfgs["tail"], "field", "complex", "entry field: real|complex");
  opt(tail, cfgs["tail"], "trials", "10000", "Monte Carlo trials");
  opt(tail, cfgs["tail"], "eps-min", "0.001", "grid lower endpoint");
  opt(tail, cfgs["tail"], "eps-max", "0.1", "grid upper endpoint");
  opt(tail, cfgs["tail"], "points-per-decade", "12", "log-grid density");
  opt(tail, cfgs["tail"], "c", "1", "exponential-term constant in the analytic bound");
  opt(tail, cfgs["tail"], "C", "1", "power-term constant in the analytic bound");

  auto* norm = app.add_subcommand(
      "norm", "Operator-norm concentration at scale n^(delta/2) and the Re/Im split check");
  common_opts(norm, cfgs["norm"], out_dir);
  opt(norm, cfgs["norm"], "n", "100", "matrix dimension");
  opt(norm, cfgs["norm"], "delta", "0.5", "sparsity exponent");
  opt(norm, cfgs["norm"], "field", "complex", "entry field: real|complex");
  opt(norm, cfgs["norm"], "trials", "1000", "Monte Carlo trials");
  opt(norm, cfgs["norm"], "k-min", "0.5", "smallest K");
  opt(norm, cfgs["norm"], "k-max", "4", "largest K");
  opt(norm, cfgs["norm"], "k-points", "9", "K-grid size");

  auto* rowb = app.add_subcommand(
      "rowbound", "No-cancellation row counts against their Chernoff tail");
  common_opts(rowb, cfgs["rowbound"], out_dir);
  opt(rowb, cfgs["rowbound"], "n", "64", "matrix dimension");
  opt(rowb, cfgs["rowbound"], "delta", "0.5", "sparsity exponent");
  opt(rowb, cfgs["rowbound"], "j-size", "4", "|J|, block of the support being scanned");
  opt(rowb, cfgs["rowbound"], "support", "8", "support size of y");
  opt(rowb, cfgs["rowbound"], "trials", "10000", "Monte Carlo trials");

  auto* net = app.add_subcommand(
      "net-check", "Certificates of the sparse-net approximation over fuzzed vectors");
  common_opts(net, cfgs["net-check"], out_dir);
  opt(net, cfgs["net-check"], "n", "64", "ambient dimension");
  opt(net, cfgs["net-check"], "a", "16", "sparsity level");
  opt(net, cfgs["net-check"], "b", "2", "band parameter (band is (1/a, 1/b])");
  opt(net, cfgs["net-check"], "d1", "5e-5", "small-mass budget");
  opt(net, cfgs["net-check"], "d2", "0.5", "band-mass requirement");
  opt(net, cfgs["net-check"], "samples", "10000", "fuzz corpus size");

  auto* cons = app.add_subcommand(
      "constants", "Chronological selection of the moderate-compressibility constants");
  common_opts(cons, cfgs["constants"], out_dir);
  opt(cons, cfgs["constants"], "K", "6", "operator-norm scale constant");
  opt(cons, cfgs["constants"], "delta", "0.5", "sparsity exponent");
  opt(cons, cfgs["constants"], "n-min", "1000", "smallest dimension the constants must serve");
  opt(cons, cfgs["constants"], "c2", "1", "band constant (free choice, default 1)");
  opt(cons, cfgs["constants"], "n-grid-max", "1e8", "verify on a geometric grid up to here");

  auto* sched = app.add_subcommand(
      "schedule", "Level sequences for the highly-compressible union bound");
  common_opts(sched, cfgs["schedule"], out_dir);
  opt(sched, cfgs["schedule"], "n", "1000", "dimension");
  opt(sched, cfgs["schedule"], "delta", "0.5", "sparsity exponent");
  opt(sched, cfgs["schedule"], "c2", "1", "band constant");
  opt(sched, cfgs["schedule"], "K", "6", "operator-norm scale constant");
  opt(sched, cfgs["schedule"], "eps1", "auto", "mass constant (auto = derive feasibly)");
  opt(sched, cfgs["schedule"], "eps2", "auto", "mass constant (auto = derive feasibly)");

  auto* inc = app.add_subcommand(
      "incompressible", "Inner-product small-ball tail against incompressible directions");
  common_opts(inc, cfgs["incompressible"], out_dir);
  opt(inc, cfgs["incompressible"], "n", "200", "dimension");
  opt(inc, cfgs["incompressible"], "delta", "0.5", "sparsity exponent");
  opt(inc, cfgs["incompressible"], "c1", "0.5", "small-band constant");
  opt(inc, cfgs["incompressible"], "c2", "1", "band constant");
  opt(inc, cfgs["incompressible"], "eps1", "0.2", "incompressible mass threshold");
  opt(inc, cfgs["incompressible"], "eps2", "0.2", "moderate mass threshold");
  opt(inc, cfgs["incompressible"], "trials", "100000", "Monte Carlo trials");
  opt(inc, cfgs["incompressible"], "t-min", "0.01", "grid lower endpoint");
  opt(inc, cfgs["incompressible"], "t-max", "0.5", "grid upper endpoint");
  opt(inc, cfgs["incompressible"], "points-per-decade", "12", "log-grid density");

  auto* dist = app.add_subcommand(
      "distance", "Column-distance reduction identity and per-coordinate inequality");
  common_opts(dist, cfgs["distance"], out_dir);
  opt(dist, cfgs["distance"], "n", "50", "dimension");
  opt(dist, cfgs["distance"], "delta", "0.5", "sparsity exponent");
  opt(dist, cfgs["distance"], "field", "complex", "entry field: real|complex");
  opt(dist, cfgs["distance"], "trials", "1000", "Monte Carlo trials");

  auto* shift = app.add_subcommand(
      "shift", "Corner-zeroed shift construction against the perturbation tail bound");
  common_opts(shift, cfgs["shift"], out_dir);
  opt(shift, cfgs["shift"], "n", "50", "dimension");
  opt(shift, cfgs["shift"], "delta", "0.5", "sparsity exponent");
  opt(shift, cfgs["shift"], "t", "100", "shift magnitude |M|_op");
  opt(shift, cfgs["shift"], "lambda", "0.1", "perturbation scale");
  opt(shift, cfgs["shift"], "trials", "1000", "Monte Carlo trials");

  auto* rerun = app.add_subcommand("rerun", "Re-execute a saved manifest byte-identically");
  std::string manifest_path;
  rerun->add_option("--manifest", manifest_path, "manifest JSON written by a previous run")
      ->required();
  rerun->add_option("--out-dir", out_dir, "directory for CSV/JSON/manifest outputs")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    if (rerun->parsed()) {
      std::ifstream in(manifest_path);
      if (!in) throw std::invalid_argument("cannot read manifest " + manifest_path);
      json m = json::parse(in);
      Config cfg = m.at("config").get<Config>();
      return dispatch(m.at("command").get<std::string>(), cfg, out_dir);
    }
    for (auto& [name, cfg] : cfgs)
      if (app.get_subcommand(name)->parsed()) return dispatch(name, cfg, out_dir);
    throw std::invalid_argument("no subcommand given");
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    // Infeasible constants and unwritable outputs are configuration
    // problems; everything else is numerical.
    const std::string what = e.what();
    if (what.find("infeasible") != std::string::npos ||
        what.find("cannot write") != std::string::npos)
      return 1;
    return 2;
  }
}
