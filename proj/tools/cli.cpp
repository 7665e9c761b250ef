// Copyright 2026 The cvhide Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// cvhide-cli: experiment runner on top of the C API.

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvhide/cvhide.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInvariant = 3;
constexpr int kExitInfeasible = 4;

constexpr double kEprDelta = 1e-8;
constexpr double kHomodyneS = 15.0;  // stands in for infinite squeezing

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ApiError : std::runtime_error {
  ApiError(cvh_status s, const std::string& what) : std::runtime_error(what), status(s) {}
  cvh_status status;
};

void check(cvh_status s) {
  if (s != CVH_OK) {
    throw ApiError(s, std::string(cvh_status_string(s)) + ": " + cvh_last_error());
  }
}

struct Config {
  std::string experiment;
  std::vector<std::string> s_grid_raw{"0:5:0.5"};
  std::vector<double> s_grid;
  double sigma = 1.0;
  double epsilon = 0.01;
  int n_copies = 100;
  uint64_t seed = 0;
  uint64_t samples = 1000000;
  int restarts = 32;
  int max_iters = 4000;
  double tol = 1e-9;
  std::string out;
};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

double parse_double(const std::string& tok) {
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number in s_grid: '" + tok + "'");
  }
  if (used != tok.size() || !std::isfinite(v)) {
    throw ConfigError("not a number in s_grid: '" + tok + "'");
  }
  return v;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t[]");
  const auto e = s.find_last_not_of(" \t[]");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

// Tokens are numbers or inclusive ranges "start:stop:step".
std::vector<double> parse_grid(const std::vector<std::string>& raw) {
  std::vector<double> out;
  for (const std::string& piece : raw) {
    std::stringstream ss(piece);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (tok.empty()) continue;
      const auto c1 = tok.find(':');
      if (c1 == std::string::npos) {
        out.push_back(parse_double(tok));
        continue;
      }
      const auto c2 = tok.find(':', c1 + 1);
      if (c2 == std::string::npos) throw ConfigError("range must be start:stop:step");
      const double a = parse_double(tok.substr(0, c1));
      const double b = parse_double(tok.substr(c1 + 1, c2 - c1 - 1));
      const double h = parse_double(tok.substr(c2 + 1));
      if (!(h > 0.0) || b < a) throw ConfigError("bad range '" + tok + "'");
      const long n = std::lround(std::floor((b - a) / h + 1e-9));
      if (n > 100000) throw ConfigError("range too long");
      for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * h);
    }
  }
  return out;
}

void validate_config(Config& c) {
  static const std::vector<std::string> kExperiments{"mi-sweep", "tv-sweep", "multi-copy",
                                                     "thermal-separation", "validate"};
  if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end()) {
    throw ConfigError("unknown or missing experiment '" + c.experiment + "'");
  }
  c.s_grid = parse_grid(c.s_grid_raw);
  const bool uses_grid = c.experiment == "mi-sweep" || c.experiment == "tv-sweep" ||
                         c.experiment == "multi-copy";
  if (uses_grid && c.s_grid.empty()) throw ConfigError("s_grid must not be empty");
  for (double s : c.s_grid) {
    if (uses_grid && s < 0.0) throw ConfigError("s_grid values must be >= 0");
  }
  if (!(c.sigma > 0.0) || !std::isfinite(c.sigma)) throw ConfigError("sigma must be > 0");
  if (!(c.epsilon > 0.0 && c.epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  if (c.n_copies < 1) throw ConfigError("n_copies must be >= 1");
  if (c.samples < 1000) throw ConfigError("samples must be >= 1000");
  if (c.restarts < 1) throw ConfigError("restarts must be >= 1");
  if (c.max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (c.out.empty()) c.out = c.experiment + ".csv";
}

// Output paths are excluded so relocated runs share a hash.
std::string canonical(const Config& c) {
  std::ostringstream os;
  os << "experiment=" << c.experiment << ";s_grid=";
  for (size_t i = 0; i < c.s_grid.size(); ++i) os << (i ? "," : "") << num(c.s_grid[i]);
  os << ";sigma=" << num(c.sigma) << ";epsilon=" << num(c.epsilon)
     << ";n_copies=" << c.n_copies << ";seed=" << c.seed << ";samples=" << c.samples
     << ";restarts=" << c.restarts << ";max_iters=" << c.max_iters << ";tol=" << num(c.tol);
  return os.str();
}

std::string fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, h);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& hash, const std::string& canon,
            const std::vector<std::string>& columns)
      : path_(path), f_(path, std::ios::binary | std::ios::trunc) {
    if (!f_) throw ApiError(CVH_ERR_IO, "cannot open '" + path + "' for writing");
    f_ << "# config-hash: fnv1a64:" << hash << " " << canon << "\n";
    row(columns);
  }

  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << cells[i];
    f_ << "\n";
    if (!f_) throw ApiError(CVH_ERR_IO, "write to '" + path_ + "' failed");
  }

 private:
  std::string path_;
  std::ofstream f_;
};

std::string sibling(const std::string& out, const std::string& suffix) {
  const std::string ext = ".csv";
  if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
    return out.substr(0, out.size() - ext.size()) + suffix;
  }
  return out + suffix;
}

struct Cov {
  cvh_cov* p = nullptr;
  Cov() = default;
  Cov(const Cov&) = delete;
  Cov& operator=(const Cov&) = delete;
  ~Cov() { cvh_cov_destroy(p); }
};

struct Optim {
  cvh_optim_result* p = nullptr;
  Optim() = default;
  Optim(const Optim&) = delete;
  Optim& operator=(const Optim&) = delete;
  ~Optim() { cvh_optim_result_destroy(p); }
};

cvh_optimizer_config optimizer_config(const Config& c, cvh_objective obj, bool constrained) {
  cvh_optimizer_config o;
  cvh_optimizer_config_default(&o);
  o.restarts = c.restarts;
  o.max_iters = c.max_iters;
  o.seed = c.seed;
  o.objective = obj;
  o.constrained = constrained ? 1 : 0;
  return o;
}

double nonlocal_mi(double s, double sigma) {
  Cov rho, epr, v;
  check(cvh_tmsv_cov(s, &rho.p));
  check(cvh_nonlocal_epr_measurement(kEprDelta, &epr.p));
  check(cvh_outcome_covariance(rho.p, epr.p, &v.p));
  double mi = 0.0;
  check(cvh_mutual_information(v.p, sigma, &mi));
  return mi;
}

cvh_tv_estimate nonlocal_tv(double s, double sigma, cvh_tv_method m, uint64_t samples,
                            uint64_t seed) {
  Cov epr;
  check(cvh_nonlocal_epr_measurement(kEprDelta, &epr.p));
  cvh_tv_estimate e;
  check(cvh_tv_sign_scheme(epr.p, s, sigma, m, samples, seed, &e));
  return e;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den > 0.0 ? (n * sxy - sx * sy) / den : std::nan("");
}

void write_curve_row(CsvWriter& curve, CsvWriter& trace, const Config& c, double s,
                     bool constrained, const char* objective, const Optim& r) {
  curve.row({num(s), num(c.sigma), constrained ? "1" : "0", objective,
             num(cvh_optim_result_value(r.p)), num(cvh_optim_result_ppt_margin(r.p)),
             num(cvh_optim_result_bona_fide_margin(r.p)), std::to_string(c.seed)});
  const size_t n = cvh_optim_result_trace_size(r.p);
  for (size_t i = 0; i < n; ++i) {
    cvh_trace_entry t;
    check(cvh_optim_result_trace(r.p, i, &t));
    trace.row({num(s), constrained ? "1" : "0", objective, std::to_string(t.restart),
               std::to_string(t.iteration), num(t.best_penalized)});
  }
}

const std::vector<std::string> kCurveColumns{
    "s", "sigma", "constrained", "objective", "value", "ppt_margin", "bona_fide_margin", "seed"};
const std::vector<std::string> kTraceColumns{"s",       "constrained", "objective",
                                             "restart", "iteration",   "best_penalized"};

nlohmann::json run_mi_sweep(const Config& c, const std::string& hash, const std::string& canon) {
  CsvWriter out(c.out, hash, canon,
                {"s", "I_glocc", "I_unconstrained", "I_nonlocal", "local_slope_glocc",
                 "ppt_margin_glocc"});
  CsvWriter curve(sibling(c.out, ".curve.csv"), hash, canon, kCurveColumns);
  CsvWriter trace(sibling(c.out, ".trace.csv"), hash, canon, kTraceColumns);
  std::vector<double> xs, glocc, fit_x, fit_y;
  double gap_at_max = 0.0;
  for (double s : c.s_grid) {
    Optim con, unc;
    auto cc = optimizer_config(c, CVH_OBJECTIVE_MUTUAL_INFORMATION, true);
    auto cu = optimizer_config(c, CVH_OBJECTIVE_MUTUAL_INFORMATION, false);
    check(cvh_optimize(s, c.sigma, &cc, &con.p));
    check(cvh_optimize(s, c.sigma, &cu, &unc.p));
    const double ig = cvh_optim_result_value(con.p);
    const double iu = cvh_optim_result_value(unc.p);
    std::string local = "";
    if (!xs.empty() && s != xs.back()) local = num((ig - glocc.back()) / (s - xs.back()));
    xs.push_back(s);
    glocc.push_back(ig);
    if (s >= 2.0) {
      fit_x.push_back(s);
      fit_y.push_back(ig);
    }
    gap_at_max = iu - ig;
    out.row({num(s), num(ig), num(iu), num(nonlocal_mi(s, c.sigma)), local,
             num(cvh_optim_result_ppt_margin(con.p))});
    write_curve_row(curve, trace, c, s, true, "mutual-information", con);
    write_curve_row(curve, trace, c, s, false, "mutual-information", unc);
  }
  if (fit_x.size() < 2) {
    fit_x = xs;
    fit_y = glocc;
  }
  return {{"glocc_slope", least_squares_slope(fit_x, fit_y)},
          {"slope_fit_points", fit_x.size()},
          {"gap_at_max_s", gap_at_max}};
}

nlohmann::json run_tv_sweep(const Config& c, const std::string& hash, const std::string& canon) {
  CsvWriter out(c.out, hash, canon,
                {"s", "tv_glocc", "tv_glocc_err", "tv_nonlocal", "tv_nonlocal_err",
                 "tv_nonlocal_mc", "tv_nonlocal_mc_err", "ppt_margin_glocc"});
  CsvWriter curve(sibling(c.out, ".curve.csv"), hash, canon, kCurveColumns);
  CsvWriter trace(sibling(c.out, ".trace.csv"), hash, canon, kTraceColumns);
  bool dominated = true;
  double min_gap = 1.0;
  for (double s : c.s_grid) {
    Optim con;
    auto cc = optimizer_config(c, CVH_OBJECTIVE_TV_SIGN_SCHEME, true);
    check(cvh_optimize(s, c.sigma, &cc, &con.p));
    Cov best;
    check(cvh_optim_result_measurement(con.p, &best.p));
    cvh_tv_estimate g;
    check(cvh_tv_sign_scheme(best.p, s, c.sigma, CVH_TV_QUADRATURE, 0, 0, &g));
    const cvh_tv_estimate q = nonlocal_tv(s, c.sigma, CVH_TV_QUADRATURE, 0, 0);
    const cvh_tv_estimate mc = nonlocal_tv(s, c.sigma, CVH_TV_MONTE_CARLO, c.samples, c.seed);
    dominated = dominated && g.value <= q.value + 1e-9;
    min_gap = std::min(min_gap, q.value - g.value);
    out.row({num(s), num(g.value), num(g.std_error), num(q.value), num(q.std_error),
             num(mc.value), num(mc.std_error), num(cvh_optim_result_ppt_margin(con.p))});
    write_curve_row(curve, trace, c, s, true, "tv-sign-scheme", con);
  }
  return {{"glocc_dominated_by_nonlocal", dominated}, {"min_gap", min_gap}};
}

nlohmann::json run_multi_copy(const Config& c, const std::string& hash, const std::string& canon) {
  CsvWriter out(c.out, hash, canon, {"s", "N", "tv_nonlocal", "tv_glocc"});
  nlohmann::json per_s = nlohmann::json::array();
  for (double s : c.s_grid) {
    Optim con;
    auto cc = optimizer_config(c, CVH_OBJECTIVE_TV_SIGN_SCHEME, true);
    check(cvh_optimize(s, c.sigma, &cc, &con.p));
    const double fg = cvh_optim_result_value(con.p);
    const double fn = nonlocal_tv(s, c.sigma, CVH_TV_QUADRATURE, 0, 0).value;
    for (int n = 1; n <= c.n_copies; ++n) {
      out.row({num(s), std::to_string(n), num(std::pow(fn, n)), num(std::pow(fg, n))});
    }
    const double n_star = (fg > 0.0 && fg < 1.0) ? std::ceil(std::log(20.0) / -std::log(fg))
                                                 : std::nan("");
    per_s.push_back({{"s", s},
                     {"factor_nonlocal", fn},
                     {"factor_glocc", fg},
                     {"copies_for_5pct_glocc", n_star}});
  }
  return {{"per_s", per_s}};
}

std::vector<int> copy_grid(int n_max) {
  std::vector<int> g;
  for (int base = 1; base <= n_max; base *= 10) {
    for (int m : {1, 2, 5}) {
      if (base * m <= n_max) g.push_back(base * m);
    }
    if (base > n_max / 10) break;
  }
  if (g.empty() || g.back() != n_max) g.push_back(n_max);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

nlohmann::json run_thermal(const Config& c, const std::string& hash, const std::string& canon) {
  CsvWriter out(c.out, hash, canon,
                {"eps", "N", "tv_nongaussian", "tv_gaussian_bound", "kl_heterodyne",
                 "kl_epr_homodyne", "kl_bound", "tv_nongaussian_mc", "tv_nongaussian_mc_err",
                 "tv_heterodyne_mc", "tv_heterodyne_mc_err", "tv_epr_homodyne_mc",
                 "tv_epr_homodyne_mc_err"});
  const double eps = c.epsilon;
  nlohmann::json last;
  for (int n : copy_grid(c.n_copies)) {
    const size_t d = 4 * static_cast<size_t>(n);
    std::vector<double> het(d, 1.0);
    std::vector<double> hom(d);
    const double lo = std::exp(-2.0 * kHomodyneS);
    const double hi = std::exp(2.0 * kHomodyneS);
    for (size_t i = 0; i < d; ++i) {
      const size_t comp = i / static_cast<size_t>(n);
      hom[i] = (comp == 0 || comp == 3) ? lo : hi;
    }
    double tv_ng = 0.0, kl_het = 0.0, kl_hom = 0.0;
    check(cvh_tv_nongaussian(n, eps, &tv_ng));
    check(cvh_kl_quadratic_diagonal(het.data(), n, eps, &kl_het));
    check(cvh_kl_quadratic_diagonal(hom.data(), n, eps, &kl_hom));
    const double tv_bound = cvh_tv_upper_bound(n, eps);
    cvh_thermal_params p{eps, 1.0, 0.0, n};
    cvh_tv_estimate ng, eh, eo;
    check(cvh_simulate_povm(&p, c.samples, c.seed, &ng));
    std::vector<double> dense_het(d * d, 0.0), dense_hom(d * d, 0.0);
    for (size_t i = 0; i < d; ++i) {
      dense_het[i * d + i] = het[i];
      dense_hom[i * d + i] = hom[i];
    }
    check(cvh_tv_gaussian_measurement(dense_het.data(), n, eps, c.samples, c.seed, &eh));
    check(cvh_tv_gaussian_measurement(dense_hom.data(), n, eps, c.samples, c.seed + 1, &eo));
    out.row({num(eps), std::to_string(n), num(tv_ng), num(tv_bound), num(kl_het), num(kl_hom),
             num(cvh_kl_upper_bound(n, eps)), num(ng.value), num(ng.std_error), num(eh.value),
             num(eh.std_error), num(eo.value), num(eo.std_error)});
    last = {{"N", n},
            {"tv_nongaussian", tv_ng},
            {"tv_gaussian_bound", tv_bound},
            {"separated", tv_ng > tv_bound}};
  }
  return {{"largest_N", last}};
}

int run_validate(const Config& c) {
  cvh_report* raw = nullptr;
  check(cvh_validate(c.tol, c.seed, &raw));
  const size_t n = cvh_report_size(raw);
  for (size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    const char* detail = nullptr;
    int passed = 0;
    double margin = 0.0;
    check(cvh_report_entry(raw, i, &name, &passed, &margin, &detail));
    std::printf("%s  %-44s margin=%-12s %s\n", passed ? "PASS" : "FAIL", name,
                num(margin).c_str(), detail);
  }
  const bool ok = cvh_report_all_passed(raw) != 0;
  cvh_report_destroy(raw);
  std::printf("%s: %zu checks\n", ok ? "all checks passed" : "INVARIANT FAILURE", n);
  return ok ? kExitOk : kExitInvariant;
}

int exit_for(cvh_status s) {
  switch (s) {
    case CVH_ERR_INVALID_ARGUMENT:
    case CVH_ERR_DIMENSION:
      return kExitConfig;
    case CVH_ERR_INFEASIBLE:
      return kExitInfeasible;
    default:
      return kExitRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cvhide experiment runner"};
  app.set_version_flag("--version", cvh_version());
  Config c;
  std::string experiment_opt;
  app.set_config("--config", "", "TOML-style key = value file; flags override it");
  app.add_option("--experiment", experiment_opt, "experiment name (normally the subcommand)");
  app.add_option("--seed", c.seed, "RNG seed")->required();
  app.add_option("--out,--output_path", c.out, "output CSV path (default: <experiment>.csv)");
  app.add_option("--samples", c.samples, "Monte Carlo samples / trials")->capture_default_str();
  app.add_option("--s-grid,--s_grid", c.s_grid_raw,
                 "squeezing grid: values and start:stop:step ranges, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  app.add_option("--sigma", c.sigma, "prior standard deviation")->capture_default_str();
  app.add_option("--epsilon", c.epsilon, "thermal mean photon number")->capture_default_str();
  app.add_option("-N,--n-copies,--n_copies", c.n_copies, "number of copies")
      ->capture_default_str();
  app.add_option("--restarts", c.restarts, "optimizer restarts")->capture_default_str();
  app.add_option("--max-iters,--max_iters", c.max_iters, "optimizer iterations per restart")
      ->capture_default_str();
  app.add_option("--tol", c.tol, "feasibility tolerance (validate)")->capture_default_str();
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(0, 1);
  for (const char* name : {"mi-sweep", "tv-sweep", "multi-copy", "thermal-separation",
                           "validate"}) {
    app.add_subcommand(name, std::string("run the ") + name + " experiment")->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    const auto subs = app.get_subcommands();
    if (!subs.empty()) {
      c.experiment = subs.front()->get_name();
      if (!experiment_opt.empty() && experiment_opt != c.experiment) {
        throw ConfigError("config experiment '" + experiment_opt + "' conflicts with '" +
                          c.experiment + "'");
      }
    } else {
      c.experiment = experiment_opt;
    }
    validate_config(c);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }

  const std::string canon = canonical(c);
  const std::string hash = fnv1a64(canon);
  try {
    if (c.experiment == "validate") return run_validate(c);
    nlohmann::json summary;
    if (c.experiment == "mi-sweep") {
      summary = run_mi_sweep(c, hash, canon);
    } else if (c.experiment == "tv-sweep") {
      summary = run_tv_sweep(c, hash, canon);
    } else if (c.experiment == "multi-copy") {
      summary = run_multi_copy(c, hash, canon);
    } else {
      summary = run_thermal(c, hash, canon);
    }
    summary["experiment"] = c.experiment;
    summary["config_hash"] = "fnv1a64:" + hash;
    summary["output"] = c.out;
    std::cout << summary.dump() << "\n";
  } catch (const ApiError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_for(e.status);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitOk;
}
