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

// Weak two-mode thermal states as hiding pairs against Gaussian measurements:
// the O(ε) Fock model, the photon-counting POVM and its multi-copy statistics,
// and the quadratic KL machinery that bounds every Gaussian measurement.
//
// Multi-copy Gaussian matrices use the rotated, component-major ordering:
// index c·N + i holds component c ∈ {0..3} of Y = U y for copy i.

#pragma once

#include <complex>
#include <cstdint>

#include "gauss_core.hpp"
#include "info_metrics.hpp"

namespace cvhide {

struct ThermalParams {
  double eps = 0.01;
  double g = 1.0;
  double theta = 0.0;
  int n_copies = 1;

  void check() const;
};

struct FockBlock {
  double p_vac = 0.0;
  Eigen::Matrix2cd coherence_block;  // on span{|10>, |01>}
};

FockBlock fock_expansion(const ThermalParams& p);

struct PovmProbs {
  double vac = 0.0;
  double plus = 0.0;
  double minus = 0.0;
};

// Probabilities of |00>, |+> and |-> with |±> = (|01> ± |10>)/√2.
PovmProbs povm_probs(const ThermalParams& p);

struct CountsOutcome {
  int k = 0;  // |00> count
  int m = 0;  // |+> count
};

double counts_log_prob(const CountsOutcome& o, const ThermalParams& p);
double counts_prob(const CountsOutcome& o, const ThermalParams& p);

// ½ Σ |P(k,m|θ=0) − P(k,m|θ=π)| over the full simplex, for the given g.
double tv_counts_exact(const ThermalParams& p);

// 1 − (1 − ε)^N.
double tv_nongaussian(int n_copies, double eps);

// Draws n_trials outcomes (k, m) under θ = 0 (sign +1) or θ = π (sign −1).
std::vector<CountsOutcome> sample_counts(const ThermalParams& p, int sign,
                                         uint64_t n_trials, uint64_t seed);

// Classifies by the likelihood-ratio rule (more |+> than |-> ⇒ +, fewer ⇒ −,
// tie ⇒ fair coin) and returns the empirical TV P(ok|+) + P(ok|−) − 1.
TVEstimate simulate_povm(const ThermalParams& p, uint64_t n_trials,
                         uint64_t seed);

// UV±Uᵀ ⊗ I_N in component-major order.
Matrix rotated_thermal_cov(double eps, int sign, int n_copies);

// Maps a copy-major physical measurement covariance (q1,p1,q2,p2 per copy) to
// the rotated component-major ordering.
Matrix rotate_measurement(const CovMatrix& v_pi, int n_copies);

// Σ_Π for measurements with the same 4x4 rotated block on every copy.
Matrix rotated_block_measurement(const Eigen::Vector4d& block_diagonal,
                                 int n_copies);

// (ε²/4) tr(A⁻¹ D A⁻¹ D) with A = I + Σ_Π, D = B₁ − B₂.
double kl_quadratic(const Matrix& sigma_pi, int n_copies, double eps);
// Same for a diagonal Σ_Π given by its diagonal; O(N).
double kl_quadratic_diagonal(const Vector& sigma_pi_diag, int n_copies,
                             double eps);

struct KlComparison {
  double exact = 0.0;
  double quadratic = 0.0;
  double residual = 0.0;
};

KlComparison kl_exact_vs_quadratic(const Matrix& sigma_pi, int n_copies,
                                   double eps);

double kl_upper_bound(int n_copies, double eps);  // 4Nε²
double tv_upper_bound(int n_copies, double eps);  // √(2N) ε

// Monte Carlo TV of the Gaussian outcome distributions of ρ₊^⊗N vs ρ₋^⊗N
// under the measurement Σ_Π.
TVEstimate tv_gaussian_measurement(const Matrix& sigma_pi, int n_copies,
                                   double eps, uint64_t n_samples,
                                   uint64_t seed, unsigned workers = 0);

}  // namespace cvhide
