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

#include "cvhide/cvhide.h"

#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <string>
#include <vector>

#include "error.hpp"
#include "gauss_core.hpp"
#include "glocc_opt.hpp"
#include "info_metrics.hpp"
#include "thermal_hiding.hpp"
#include "validate.hpp"

struct cvh_cov {
  cvhide::CovMatrix m;
};

struct cvh_optim_result {
  cvhide::OptimResult r;
};

struct cvh_report {
  cvhide::ValidationReport r;
};

namespace {

thread_local std::string g_last_error;

cvh_status to_status(cvhide::ErrorCode c) {
  return static_cast<cvh_status>(static_cast<int>(c));
}

template <typename Fn>
cvh_status guard(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return CVH_OK;
  } catch (const cvhide::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const nlohmann::json::exception& e) {
    g_last_error = e.what();
    return CVH_ERR_INVALID_ARGUMENT;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CVH_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CVH_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CVH_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (p == nullptr) {
    cvhide::fail(cvhide::ErrorCode::kInvalidArgument,
                 std::string(what) + " must not be null");
  }
}

const cvhide::CovMatrix& get(const cvh_cov* c, const char* what = "cov") {
  need(c, what);
  return c->m;
}

void emit(cvhide::CovMatrix m, cvh_cov** out) {
  need(out, "out");
  *out = new cvh_cov{std::move(m)};
}

cvhide::Matrix square(const double* data, size_t dim) {
  need(data, "matrix");
  cvhide::Matrix m(dim, dim);
  for (size_t r = 0; r < dim; ++r) {
    for (size_t c = 0; c < dim; ++c) m(r, c) = data[r * dim + c];
  }
  return m;
}

char* dup(const std::string& s) {
  char* p = new char[s.size() + 1];
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void fill(const cvhide::TVEstimate& e, cvh_tv_estimate* out) {
  out->value = e.value;
  out->std_error = e.std_error;
  out->method = static_cast<cvh_tv_method>(static_cast<int>(e.method));
  out->n = e.n;
}

cvhide::ThermalParams params(const cvh_thermal_params* p) {
  need(p, "params");
  cvhide::ThermalParams t;
  t.eps = p->eps;
  t.g = p->g;
  t.theta = p->theta;
  t.n_copies = p->n_copies;
  t.check();
  return t;
}

cvhide::ModePartition partition(int n_modes, const int* right, size_t n_right) {
  if (n_right > 0) need(right, "right_modes");
  std::vector<int> r(right, right + n_right);
  std::vector<int> l;
  for (int i = 0; i < n_modes; ++i) {
    bool in_right = false;
    for (int j : r) in_right |= (j == i);
    if (!in_right) l.push_back(i);
  }
  cvhide::ModePartition part(std::move(l), std::move(r));
  part.check(n_modes);
  return part;
}

cvhide::Matrix rotated(const double* sigma_pi, int n_copies) {
  if (n_copies < 1) {
    cvhide::fail(cvhide::ErrorCode::kInvalidArgument, "n_copies must be >= 1");
  }
  return square(sigma_pi, 4 * static_cast<size_t>(n_copies));
}

}  // namespace

extern "C" {

const char* cvh_version(void) { return "1.0.0"; }

const char* cvh_last_error(void) { return g_last_error.c_str(); }

const char* cvh_status_string(cvh_status status) {
  switch (status) {
    case CVH_OK: return "ok";
    case CVH_ERR_INVALID_ARGUMENT: return "invalid argument";
    case CVH_ERR_DIMENSION: return "dimension mismatch";
    case CVH_ERR_NOT_BONA_FIDE: return "not bona fide";
    case CVH_ERR_SINGULAR: return "singular matrix";
    case CVH_ERR_NO_CONVERGENCE: return "no convergence";
    case CVH_ERR_INFEASIBLE: return "infeasible";
    case CVH_ERR_IO: return "i/o error";
    case CVH_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

void cvh_string_free(char* s) { delete[] s; }

cvh_status cvh_cov_create(int n_modes, const double* row_major, cvh_cov** out) {
  return guard([&] {
    if (n_modes < 1) {
      cvhide::fail(cvhide::ErrorCode::kInvalidArgument, "n_modes must be >= 1");
    }
    emit(cvhide::CovMatrix(n_modes, square(row_major, 2 * static_cast<size_t>(n_modes))),
         out);
  });
}

void cvh_cov_destroy(cvh_cov* cov) { delete cov; }

int cvh_cov_n_modes(const cvh_cov* cov) { return cov ? cov->m.n_modes() : 0; }

cvh_status cvh_cov_data(const cvh_cov* cov, double* out, size_t len) {
  return guard([&] {
    const auto& m = get(cov);
    need(out, "out");
    const size_t d = static_cast<size_t>(m.dim());
    if (len < d * d) {
      cvhide::fail(cvhide::ErrorCode::kDimensionMismatch, "output buffer too small");
    }
    for (size_t r = 0; r < d; ++r) {
      for (size_t c = 0; c < d; ++c) out[r * d + c] = m(static_cast<int>(r), static_cast<int>(c));
    }
  });
}

cvh_status cvh_cov_to_json(const cvh_cov* cov, char** out) {
  return guard([&] {
    need(out, "out");
    *out = dup(get(cov).to_json().dump());
  });
}

cvh_status cvh_cov_from_json(const char* json, cvh_cov** out) {
  return guard([&] {
    need(json, "json");
    emit(cvhide::CovMatrix::from_json(nlohmann::json::parse(json)), out);
  });
}

cvh_status cvh_identity_cov(int n_modes, cvh_cov** out) {
  return guard([&] { emit(cvhide::CovMatrix::identity(n_modes), out); });
}

cvh_status cvh_tmsv_cov(double s, cvh_cov** out) {
  return guard([&] { emit(cvhide::tmsv_cov(s), out); });
}

cvh_status cvh_nonlocal_epr_measurement(double delta, cvh_cov** out) {
  return guard([&] { emit(cvhide::nonlocal_epr_measurement(delta), out); });
}

cvh_status cvh_local_homodyne_measurement(double phi1, double phi2, double delta,
                                          cvh_cov** out) {
  return guard([&] { emit(cvhide::local_homodyne_measurement(phi1, phi2, delta), out); });
}

cvh_status cvh_thermal_pair_cov(double eps, int sign, cvh_cov** out) {
  return guard([&] { emit(cvhide::thermal_pair_cov(eps, sign), out); });
}

cvh_status cvh_multi_copy_cov(const cvh_cov* cov, int n_copies, cvh_cov** out) {
  return guard([&] { emit(cvhide::multi_copy_cov(get(cov), n_copies), out); });
}

cvh_status cvh_outcome_covariance(const cvh_cov* v_rho, const cvh_cov* v_pi,
                                  cvh_cov** out) {
  return guard([&] {
    emit(cvhide::outcome_covariance(get(v_rho, "v_rho"), get(v_pi, "v_pi")), out);
  });
}

cvh_status cvh_partial_transpose(const cvh_cov* cov, const int* right_modes,
                                 size_t n_right, cvh_cov** out) {
  return guard([&] {
    const auto& m = get(cov);
    emit(cvhide::partial_transpose(m, partition(m.n_modes(), right_modes, n_right)), out);
  });
}

cvh_status cvh_symplectic_form(int n_modes, double* out, size_t len) {
  return guard([&] {
    const auto om = cvhide::symplectic_form(n_modes);
    need(out, "out");
    const size_t d = static_cast<size_t>(2 * n_modes);
    if (len < d * d) {
      cvhide::fail(cvhide::ErrorCode::kDimensionMismatch, "output buffer too small");
    }
    for (size_t r = 0; r < d; ++r) {
      for (size_t c = 0; c < d; ++c) out[r * d + c] = om.data()(r, c);
    }
  });
}

cvh_status cvh_is_bona_fide(const cvh_cov* cov, double tol, cvh_bona_fide_report* out) {
  return guard([&] {
    need(out, "out");
    const auto r = cvhide::is_bona_fide(get(cov), tol);
    *out = {r.ok ? 1 : 0, r.min_eig_v, r.min_eig_v_plus_iomega, r.threshold};
  });
}

cvh_status cvh_is_ppt(const cvh_cov* cov, const int* right_modes, size_t n_right,
                      double tol, cvh_ppt_report* out) {
  return guard([&] {
    need(out, "out");
    const auto& m = get(cov);
    const auto r = cvhide::is_ppt(m, partition(m.n_modes(), right_modes, n_right), tol);
    *out = {r.ppt ? 1 : 0, r.min_eig};
  });
}

double cvh_ppt_violation_formula(double lambda3, double lambda4) {
  return cvhide::ppt_violation_formula(lambda3, lambda4);
}

cvh_status cvh_mutual_information(const cvh_cov* v, double sigma, double* out) {
  return guard([&] {
    need(out, "out");
    *out = cvhide::mutual_information(get(v), sigma);
  });
}

cvh_status cvh_mutual_information_projected(const cvh_cov* v, double t1, double t2,
                                            double sigma, double* out) {
  return guard([&] {
    need(out, "out");
    *out = cvhide::mutual_information_projected(get(v), t1, t2, sigma);
  });
}

cvh_status cvh_gaussian_kl(size_t dim, const double* s1, const double* s2,
                           const double* mu1, const double* mu2, double* out) {
  return guard([&] {
    need(out, "out");
    if (dim == 0) cvhide::fail(cvhide::ErrorCode::kInvalidArgument, "dim must be > 0");
    const cvhide::Matrix a = square(s1, dim);
    const cvhide::Matrix b = square(s2, dim);
    cvhide::Vector m1 = cvhide::Vector::Zero(static_cast<Eigen::Index>(dim));
    cvhide::Vector m2 = m1;
    for (size_t i = 0; i < dim; ++i) {
      if (mu1) m1(static_cast<Eigen::Index>(i)) = mu1[i];
      if (mu2) m2(static_cast<Eigen::Index>(i)) = mu2[i];
    }
    *out = cvhide::gaussian_kl(a, b, m1, m2);
  });
}

cvh_status cvh_pinsker_bound(double d_kl, double* out, int* clamped) {
  return guard([&] {
    need(out, "out");
    const auto b = cvhide::pinsker_bound(d_kl);
    *out = b.value;
    if (clamped) *clamped = b.clamped ? 1 : 0;
  });
}

cvh_status cvh_error_probability(double tv, double* out) {
  return guard([&] {
    need(out, "out");
    *out = cvhide::error_probability(tv);
  });
}

cvh_status cvh_tv_sign_scheme(const cvh_cov* v_pi, double s, double sigma,
                              cvh_tv_method method, uint64_t samples, uint64_t seed,
                              cvh_tv_estimate* out) {
  return guard([&] {
    need(out, "out");
    if (method < CVH_TV_ANALYTIC || method > CVH_TV_MONTE_CARLO) {
      cvhide::fail(cvhide::ErrorCode::kInvalidArgument, "unknown TV method");
    }
    cvhide::SignSchemeOptions o;
    o.method = static_cast<cvhide::TvMethod>(static_cast<int>(method));
    o.samples = samples;
    o.seed = seed;
    fill(cvhide::tv_sign_scheme(get(v_pi), s, sigma, o), out);
  });
}

cvh_status cvh_tv_multi_copy(const double* factors, size_t n, double* out) {
  return guard([&] {
    need(out, "out");
    if (n > 0) need(factors, "factors");
    *out = cvhide::tv_multi_copy(std::span<const double>(factors, n));
  });
}

void cvh_optimizer_config_default(cvh_optimizer_config* cfg) {
  if (!cfg) return;
  const cvhide::OptimizerConfig d;
  cfg->restarts = d.restarts;
  cfg->max_iters = d.max_iters;
  cfg->penalty_weight = d.penalty_weight;
  cfg->feasibility_tol = d.feasibility_tol;
  cfg->seed = d.seed;
  cfg->objective = CVH_OBJECTIVE_MUTUAL_INFORMATION;
  cfg->constrained = d.constrained ? 1 : 0;
  cfg->quadrature_tol = d.quadrature_tol;
  cfg->workers = d.workers;
}

cvh_status cvh_optimize(double s, double sigma, const cvh_optimizer_config* cfg,
                        cvh_optim_result** out) {
  return guard([&] {
    need(cfg, "cfg");
    need(out, "out");
    cvhide::OptimizerConfig c;
    c.restarts = cfg->restarts;
    c.max_iters = cfg->max_iters;
    c.penalty_weight = cfg->penalty_weight;
    c.feasibility_tol = cfg->feasibility_tol;
    c.seed = cfg->seed;
    switch (cfg->objective) {
      case CVH_OBJECTIVE_MUTUAL_INFORMATION:
        c.objective = cvhide::Objective::kMutualInformation;
        break;
      case CVH_OBJECTIVE_TV_SIGN_SCHEME:
        c.objective = cvhide::Objective::kTvSignScheme;
        break;
      default:
        cvhide::fail(cvhide::ErrorCode::kInvalidArgument, "unknown objective");
    }
    c.constrained = cfg->constrained != 0;
    c.quadrature_tol = cfg->quadrature_tol;
    c.workers = cfg->workers;
    *out = new cvh_optim_result{cvhide::optimize(s, sigma, c)};
  });
}

void cvh_optim_result_destroy(cvh_optim_result* r) { delete r; }

double cvh_optim_result_value(const cvh_optim_result* r) {
  return r ? r->r.objective_value : 0.0;
}

double cvh_optim_result_bona_fide_margin(const cvh_optim_result* r) {
  return r ? r->r.bona_fide_margin : 0.0;
}

double cvh_optim_result_ppt_margin(const cvh_optim_result* r) {
  return r ? r->r.ppt_margin : 0.0;
}

int cvh_optim_result_best_restart(const cvh_optim_result* r) {
  return r ? r->r.best_restart : -1;
}

cvh_status cvh_optim_result_measurement(const cvh_optim_result* r, cvh_cov** out) {
  return guard([&] {
    need(r, "result");
    emit(r->r.v_pi_star, out);
  });
}

size_t cvh_optim_result_trace_size(const cvh_optim_result* r) {
  return r ? r->r.trace.size() : 0;
}

cvh_status cvh_optim_result_trace(const cvh_optim_result* r, size_t index,
                                  cvh_trace_entry* out) {
  return guard([&] {
    need(r, "result");
    need(out, "out");
    if (index >= r->r.trace.size()) {
      cvhide::fail(cvhide::ErrorCode::kInvalidArgument, "trace index out of range");
    }
    const auto& t = r->r.trace[index];
    *out = {t.restart, t.iteration, t.best_penalized};
  });
}

cvh_status cvh_no_go_diagnostic(const cvh_cov* v_pi, double s, cvh_no_go_report* out) {
  return guard([&] {
    need(out, "out");
    const auto d = cvhide::no_go_diagnostic(get(v_pi), s);
    out->smallest_eigenvalues[0] = d.smallest_eigenvalues(0);
    out->smallest_eigenvalues[1] = d.smallest_eigenvalues(1);
    out->subspace_overlap = d.subspace_overlap;
    out->ppt_margin = d.ppt_margin;
    out->squeezed_variance = d.squeezed_variance;
    out->small_pair = d.small_pair ? 1 : 0;
  });
}

cvh_status cvh_povm_probs(const cvh_thermal_params* p, double* vac, double* plus,
                          double* minus) {
  return guard([&] {
    const auto q = cvhide::povm_probs(params(p));
    if (vac) *vac = q.vac;
    if (plus) *plus = q.plus;
    if (minus) *minus = q.minus;
  });
}

cvh_status cvh_counts_prob(int k, int m, const cvh_thermal_params* p, double* out) {
  return guard([&] {
    need(out, "out");
    *out = cvhide::counts_prob({k, m}, params(p));
  });
}

cvh_status cvh_tv_nongaussian(int n_copies, double eps, double* out) {
  return guard([&] {
    need(out, "out");
    *out = cvhide::tv_nongaussian(n_copies, eps);
  });
}

cvh_status cvh_simulate_povm(const cvh_thermal_params* p, uint64_t n_trials,
                             uint64_t seed, cvh_tv_estimate* out) {
  return guard([&] {
    need(out, "out");
    fill(cvhide::simulate_povm(params(p), n_trials, seed), out);
  });
}

cvh_status cvh_kl_quadratic(const double* sigma_pi, int n_copies, double eps,
                            double* out) {
  return guard([&] {
    need(out, "out");
    *out = cvhide::kl_quadratic(rotated(sigma_pi, n_copies), n_copies, eps);
  });
}

cvh_status cvh_kl_quadratic_diagonal(const double* sigma_pi_diag, int n_copies,
                                     double eps, double* out) {
  return guard([&] {
    need(out, "out");
    need(sigma_pi_diag, "sigma_pi_diag");
    if (n_copies < 1) {
      cvhide::fail(cvhide::ErrorCode::kInvalidArgument, "n_copies must be >= 1");
    }
    const cvhide::Vector d =
        Eigen::Map<const cvhide::Vector>(sigma_pi_diag, 4 * static_cast<Eigen::Index>(n_copies));
    *out = cvhide::kl_quadratic_diagonal(d, n_copies, eps);
  });
}

cvh_status cvh_kl_exact_vs_quadratic(const double* sigma_pi, int n_copies, double eps,
                                     double* exact, double* quadratic,
                                     double* residual) {
  return guard([&] {
    const auto k = cvhide::kl_exact_vs_quadratic(rotated(sigma_pi, n_copies), n_copies, eps);
    if (exact) *exact = k.exact;
    if (quadratic) *quadratic = k.quadratic;
    if (residual) *residual = k.residual;
  });
}

double cvh_kl_upper_bound(int n_copies, double eps) {
  double v = std::numeric_limits<double>::quiet_NaN();
  guard([&] { v = cvhide::kl_upper_bound(n_copies, eps); });
  return v;
}

double cvh_tv_upper_bound(int n_copies, double eps) {
  double v = std::numeric_limits<double>::quiet_NaN();
  guard([&] { v = cvhide::tv_upper_bound(n_copies, eps); });
  return v;
}

cvh_status cvh_tv_gaussian_measurement(const double* sigma_pi, int n_copies, double eps,
                                       uint64_t n_samples, uint64_t seed,
                                       cvh_tv_estimate* out) {
  return guard([&] {
    need(out, "out");
    fill(cvhide::tv_gaussian_measurement(rotated(sigma_pi, n_copies), n_copies, eps,
                                         n_samples, seed),
         out);
  });
}

cvh_status cvh_validate(double tol, uint64_t seed, cvh_report** out) {
  return guard([&] {
    need(out, "out");
    *out = new cvh_report{cvhide::run_validation(tol, seed)};
  });
}

void cvh_report_destroy(cvh_report* r) { delete r; }

size_t cvh_report_size(const cvh_report* r) { return r ? r->r.checks.size() : 0; }

int cvh_report_all_passed(const cvh_report* r) {
  return (r && r->r.all_passed()) ? 1 : 0;
}

cvh_status cvh_report_entry(const cvh_report* r, size_t index, const char** name,
                            int* passed, double* margin, const char** detail) {
  return guard([&] {
    need(r, "report");
    if (index >= r->r.checks.size()) {
      cvhide::fail(cvhide::ErrorCode::kInvalidArgument, "report index out of range");
    }
    const auto& c = r->r.checks[index];
    if (name) *name = c.name.c_str();
    if (passed) *passed = c.passed ? 1 : 0;
    if (margin) *margin = c.margin;
    if (detail) *detail = c.detail.c_str();
  });
}

}  // extern "C"
