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

/*
 * cvhide: C interface.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_destroy function. Every fallible call returns a cvh_status; on
 * failure, cvh_last_error() holds a message for the calling thread.
 * Covariance matrices use quadrature ordering (q1, p1, q2, p2, ...) with
 * vacuum variance 1. Mode indices are zero-based.
 */

#ifndef CVHIDE_CVHIDE_H_
#define CVHIDE_CVHIDE_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CVHIDE_BUILDING)
#    define CVH_API __declspec(dllexport)
#  else
#    define CVH_API __declspec(dllimport)
#  endif
#else
#  define CVH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cvh_status {
  CVH_OK = 0,
  CVH_ERR_INVALID_ARGUMENT = 1,
  CVH_ERR_DIMENSION = 2,
  CVH_ERR_NOT_BONA_FIDE = 3,
  CVH_ERR_SINGULAR = 4,
  CVH_ERR_NO_CONVERGENCE = 5,
  CVH_ERR_INFEASIBLE = 6,
  CVH_ERR_IO = 7,
  CVH_ERR_INTERNAL = 99
} cvh_status;

typedef enum cvh_tv_method {
  CVH_TV_ANALYTIC = 0,
  CVH_TV_QUADRATURE = 1,
  CVH_TV_MONTE_CARLO = 2
} cvh_tv_method;

typedef enum cvh_objective {
  CVH_OBJECTIVE_MUTUAL_INFORMATION = 0,
  CVH_OBJECTIVE_TV_SIGN_SCHEME = 1
} cvh_objective;

typedef struct cvh_cov cvh_cov;
typedef struct cvh_optim_result cvh_optim_result;
typedef struct cvh_report cvh_report;

CVH_API const char* cvh_version(void);
CVH_API const char* cvh_last_error(void);
CVH_API const char* cvh_status_string(cvh_status status);
/* Frees strings returned through char** out-parameters. */
CVH_API void cvh_string_free(char* s);

/* ---- covariance matrices ------------------------------------------------ */

CVH_API cvh_status cvh_cov_create(int n_modes, const double* row_major,
                                  cvh_cov** out);
CVH_API void cvh_cov_destroy(cvh_cov* cov);
CVH_API int cvh_cov_n_modes(const cvh_cov* cov);
/* Copies (2 n_modes)^2 entries in row-major order into `out`. */
CVH_API cvh_status cvh_cov_data(const cvh_cov* cov, double* out, size_t len);
/* {"n_modes": n, "data": [row-major]}; the loader validates symmetry. */
CVH_API cvh_status cvh_cov_to_json(const cvh_cov* cov, char** out);
CVH_API cvh_status cvh_cov_from_json(const char* json, cvh_cov** out);

CVH_API cvh_status cvh_identity_cov(int n_modes, cvh_cov** out);
CVH_API cvh_status cvh_tmsv_cov(double s, cvh_cov** out);
CVH_API cvh_status cvh_nonlocal_epr_measurement(double delta, cvh_cov** out);
CVH_API cvh_status cvh_local_homodyne_measurement(double phi1, double phi2,
                                                  double delta, cvh_cov** out);
CVH_API cvh_status cvh_thermal_pair_cov(double eps, int sign, cvh_cov** out);
CVH_API cvh_status cvh_multi_copy_cov(const cvh_cov* cov, int n_copies,
                                      cvh_cov** out);
CVH_API cvh_status cvh_outcome_covariance(const cvh_cov* v_rho,
                                          const cvh_cov* v_pi, cvh_cov** out);
/* Flips the momentum of every mode listed in right_modes. */
CVH_API cvh_status cvh_partial_transpose(const cvh_cov* cov,
                                         const int* right_modes,
                                         size_t n_right, cvh_cov** out);
/* 2 n_modes symplectic form, row-major, into `out`. */
CVH_API cvh_status cvh_symplectic_form(int n_modes, double* out, size_t len);

/* ---- feasibility -------------------------------------------------------- */

typedef struct cvh_bona_fide_report {
  int ok;
  double min_eig_v;
  double min_eig_v_plus_iomega;
  double threshold;
} cvh_bona_fide_report;

typedef struct cvh_ppt_report {
  int ppt;
  double min_eig;
} cvh_ppt_report;

CVH_API cvh_status cvh_is_bona_fide(const cvh_cov* cov, double tol,
                                    cvh_bona_fide_report* out);
/* CVH_ERR_NOT_BONA_FIDE if the matrix itself is unphysical. */
CVH_API cvh_status cvh_is_ppt(const cvh_cov* cov, const int* right_modes,
                              size_t n_right, double tol, cvh_ppt_report* out);
CVH_API double cvh_ppt_violation_formula(double lambda3, double lambda4);

/* ---- information metrics ------------------------------------------------ */

typedef struct cvh_tv_estimate {
  double value;
  double std_error;
  cvh_tv_method method;
  uint64_t n;
} cvh_tv_estimate;

CVH_API cvh_status cvh_mutual_information(const cvh_cov* v, double sigma,
                                          double* out);
CVH_API cvh_status cvh_mutual_information_projected(const cvh_cov* v, double t1,
                                                    double t2, double sigma,
                                                    double* out);
/* mu1/mu2 may be NULL for zero means. Matrices are dim x dim row-major. */
CVH_API cvh_status cvh_gaussian_kl(size_t dim, const double* s1,
                                   const double* s2, const double* mu1,
                                   const double* mu2, double* out);
/* `clamped` (nullable) is set when √(D/2) exceeded 1. */
CVH_API cvh_status cvh_pinsker_bound(double d_kl, double* out, int* clamped);
CVH_API cvh_status cvh_error_probability(double tv, double* out);
/* samples/seed are used by CVH_TV_MONTE_CARLO only. */
CVH_API cvh_status cvh_tv_sign_scheme(const cvh_cov* v_pi, double s,
                                      double sigma, cvh_tv_method method,
                                      uint64_t samples, uint64_t seed,
                                      cvh_tv_estimate* out);
CVH_API cvh_status cvh_tv_multi_copy(const double* factors, size_t n,
                                     double* out);

/* ---- measurement optimization ------------------------------------------- */

typedef struct cvh_optimizer_config {
  int restarts;
  int max_iters;
  double penalty_weight;
  double feasibility_tol;
  uint64_t seed;
  cvh_objective objective;
  int constrained; /* nonzero: PPT-feasible measurements only */
  double quadrature_tol;
  unsigned workers; /* 0: hardware concurrency */
} cvh_optimizer_config;

typedef struct cvh_trace_entry {
  int restart;
  int iteration;
  double best_penalized;
} cvh_trace_entry;

CVH_API void cvh_optimizer_config_default(cvh_optimizer_config* cfg);
/* CVH_ERR_INFEASIBLE if no restart ends feasible. */
CVH_API cvh_status cvh_optimize(double s, double sigma,
                                const cvh_optimizer_config* cfg,
                                cvh_optim_result** out);
CVH_API void cvh_optim_result_destroy(cvh_optim_result* r);
CVH_API double cvh_optim_result_value(const cvh_optim_result* r);
CVH_API double cvh_optim_result_bona_fide_margin(const cvh_optim_result* r);
CVH_API double cvh_optim_result_ppt_margin(const cvh_optim_result* r);
CVH_API int cvh_optim_result_best_restart(const cvh_optim_result* r);
CVH_API cvh_status cvh_optim_result_measurement(const cvh_optim_result* r,
                                                cvh_cov** out);
CVH_API size_t cvh_optim_result_trace_size(const cvh_optim_result* r);
CVH_API cvh_status cvh_optim_result_trace(const cvh_optim_result* r,
                                          size_t index, cvh_trace_entry* out);

typedef struct cvh_no_go_report {
  double smallest_eigenvalues[2];
  double subspace_overlap;
  double ppt_margin;
  double squeezed_variance;
  int small_pair;
} cvh_no_go_report;

CVH_API cvh_status cvh_no_go_diagnostic(const cvh_cov* v_pi, double s,
                                        cvh_no_go_report* out);

/* ---- thermal hiding ----------------------------------------------------- */

typedef struct cvh_thermal_params {
  double eps;
  double g;
  double theta;
  int n_copies;
} cvh_thermal_params;

CVH_API cvh_status cvh_povm_probs(const cvh_thermal_params* p, double* vac,
                                  double* plus, double* minus);
CVH_API cvh_status cvh_counts_prob(int k, int m, const cvh_thermal_params* p,
                                   double* out);
CVH_API cvh_status cvh_tv_nongaussian(int n_copies, double eps, double* out);
CVH_API cvh_status cvh_simulate_povm(const cvh_thermal_params* p,
                                     uint64_t n_trials, uint64_t seed,
                                     cvh_tv_estimate* out);
/* Σ_Π in the rotated component-major ordering, (4N)^2 entries row-major. */
CVH_API cvh_status cvh_kl_quadratic(const double* sigma_pi, int n_copies,
                                    double eps, double* out);
/* Σ_Π diagonal given as 4N entries. */
CVH_API cvh_status cvh_kl_quadratic_diagonal(const double* sigma_pi_diag,
                                             int n_copies, double eps,
                                             double* out);
CVH_API cvh_status cvh_kl_exact_vs_quadratic(const double* sigma_pi,
                                             int n_copies, double eps,
                                             double* exact, double* quadratic,
                                             double* residual);
/* NaN for n_copies < 1. */
CVH_API double cvh_kl_upper_bound(int n_copies, double eps);
CVH_API double cvh_tv_upper_bound(int n_copies, double eps);
/* Monte Carlo TV of the outcome distributions of the two hiding states. */
CVH_API cvh_status cvh_tv_gaussian_measurement(const double* sigma_pi,
                                               int n_copies, double eps,
                                               uint64_t n_samples,
                                               uint64_t seed,
                                               cvh_tv_estimate* out);

/* ---- self-checks -------------------------------------------------------- */

CVH_API cvh_status cvh_validate(double tol, uint64_t seed, cvh_report** out);
CVH_API void cvh_report_destroy(cvh_report* r);
CVH_API size_t cvh_report_size(const cvh_report* r);
CVH_API int cvh_report_all_passed(const cvh_report* r);
/* Returned strings stay valid until the report is destroyed. */
CVH_API cvh_status cvh_report_entry(const cvh_report* r, size_t index,
                                    const char** name, int* passed,
                                    double* margin, const char** detail);

#ifdef __cplusplus
}
#endif

#endif /* CVHIDE_CVHIDE_H_ */
