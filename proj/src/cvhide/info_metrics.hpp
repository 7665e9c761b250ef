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

// Outcome statistics of Gaussian measurements on displaced Gaussian states:
// mutual information, Gaussian KL divergence, Pinsker's bound and the
// sign-scheme total-variation distance, with Monte Carlo estimators that act
// as independent oracles.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "gauss_core.hpp"

namespace cvhide {

// Gaussian prior over the encoded displacement vector r.
struct PriorSpec {
  double sigma = 1.0;
  std::optional<Matrix> v_r;  // full prior covariance; overrides sigma

  static PriorSpec isotropic(double sigma) { return {sigma, std::nullopt}; }
  void check(int dim) const;
};

enum class TvMethod { kAnalytic, kQuadrature, kMonteCarlo };

std::string to_string(TvMethod m);

struct TVEstimate {
  double value = 0.0;
  double std_error = 0.0;  // quadrature: error estimate; MC: standard error
  TvMethod method = TvMethod::kAnalytic;
  uint64_t n = 0;          // samples or integrand evaluations

  nlohmann::json to_json() const;
};

CovMatrix outcome_covariance(const CovMatrix& v_rho, const CovMatrix& v_pi);

// ½ Σ ln(1 + σ²/λ_i) over the eigenvalues of V, in nats.
double mutual_information(const CovMatrix& v, double sigma);
// ½ ln det(I + V_r V⁻¹).
double mutual_information(const CovMatrix& v, const PriorSpec& prior);

// Orthonormal basis whose first column is (t1, t2, -t1, t2); requires
// t1² + t2² = ½.
Matrix projected_basis(double t1, double t2);

// ½ ln(1 + σ² ω1ᵀ V⁻¹ ω1): information about t1(a - c) + t2(b + d) alone.
double mutual_information_projected(const CovMatrix& v, double t1, double t2,
                                    double sigma);

double gaussian_kl(const Matrix& s1, const Matrix& s2, const Vector& mu1,
                   const Vector& mu2);
double gaussian_kl(const Matrix& s1, const Matrix& s2);

struct PinskerBound {
  double value = 0.0;  // min(raw, 1)
  double raw = 0.0;    // √(D/2)
  bool clamped = false;
};

PinskerBound pinsker_bound(double d_kl);

double error_probability(double tv);

// Covariance of (Q1, Q4) where Q = U y - U r.
Eigen::Matrix2d sign_scheme_marginal(const CovMatrix& v_pi, double s);

struct SignSchemeOptions {
  TvMethod method = TvMethod::kQuadrature;
  uint64_t samples = 1'000'000;
  uint64_t seed = 0;
  unsigned workers = 0;          // 0: hardware concurrency
  double feasibility_tol = kDefaultTol;
  double quadrature_tol = 1e-6;  // absolute; exceeding it is an error
};

// E[erfc(|Q1|/√2σ) erfc(|Q4|/√2σ)] for zero-mean (Q1, Q4) with covariance c.
TVEstimate tv_sign_marginal(const Eigen::Matrix2d& c, double sigma,
                            double quadrature_tol = 1e-6);

TVEstimate tv_sign_scheme(const CovMatrix& v_pi, double s, double sigma,
                          const SignSchemeOptions& opts = {});

TVEstimate tv_monte_carlo_oracle(const CovMatrix& v_pi, double s, double sigma,
                                 uint64_t n_samples, uint64_t seed,
                                 unsigned workers = 0);

double tv_multi_copy(std::span<const double> per_copy_factors);
double tv_multi_copy(double factor, int n_copies);

// Monte Carlo TV between N(0, s1) and N(0, s2), sampling the equal mixture and
// averaging |p1 - p2| / (p1 + p2).
TVEstimate tv_gaussian_monte_carlo(const Matrix& s1, const Matrix& s2,
                                   uint64_t n_samples, uint64_t seed,
                                   unsigned workers = 0);

}  // namespace cvhide
