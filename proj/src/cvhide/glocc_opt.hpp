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

// Search over two-mode Gaussian measurement covariances, with or without the
// PPT constraint, maximizing mutual information or the sign-scheme TV.
//
// "Constrained" always means PPT-feasible across the 1|1 split; that is the
// operational stand-in for GLOCC used throughout this library.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gauss_core.hpp"
#include "info_metrics.hpp"

namespace cvhide {

inline constexpr int kParamDim = 10;
inline constexpr double kDecodeFloor = 1e-10;

// Lower-triangular factor L (row-major over the lower triangle) with softplus
// on the diagonal; decodes to V = L Lᵀ + kDecodeFloor · I.
struct MeasurementParam {
  std::array<double, kParamDim> theta{};
};

CovMatrix decode(const MeasurementParam& p);
// Inverse of decode for a positive definite V with eigenvalues > floor.
MeasurementParam encode(const CovMatrix& v);

enum class Objective { kMutualInformation, kTvSignScheme };

std::string to_string(Objective o);
Objective objective_from_string(const std::string& s);

struct OptimizerConfig {
  int restarts = 32;
  int max_iters = 4000;
  double penalty_weight = 1e3;
  double feasibility_tol = kDefaultTol;
  uint64_t seed = 0;
  Objective objective = Objective::kMutualInformation;
  bool constrained = true;
  double quadrature_tol = 1e-6;
  unsigned workers = 0;  // 0: hardware concurrency

  void check() const;
};

struct TraceEntry {
  int restart = 0;
  int iteration = 0;
  double best_penalized = 0.0;
};

struct RestartSummary {
  int restart = 0;
  double objective = 0.0;    // unpenalized, after repair
  double repair_shift = 0.0; // isotropic noise added to restore feasibility
  bool feasible = false;
};

struct OptimResult {
  CovMatrix v_pi_star = CovMatrix::identity(2);
  double objective_value = 0.0;
  double bona_fide_margin = 0.0;  // min eig of V + iΩ
  double ppt_margin = 0.0;        // min eig of T V T + iΩ
  double penalty_weight_used = 0.0;
  int best_restart = -1;
  bool constrained = true;
  Objective objective = Objective::kMutualInformation;
  std::vector<RestartSummary> restarts;
  std::vector<TraceEntry> trace;
};

// Unpenalized objective at (V_Π, s, σ).
double objective_value(const CovMatrix& v_pi, double s, double sigma,
                       Objective obj, double quadrature_tol = 1e-6);

// Hinge penalties on the bona fide margin and, when constrained, the PPT
// margin. Exactly zero inside the tolerance band.
double constraint_penalty(const CovMatrix& v_pi, const OptimizerConfig& cfg);

double objective_penalized(const CovMatrix& v_pi, double s, double sigma,
                           const OptimizerConfig& cfg);

// Throws kInfeasible when no restart yields a feasible measurement even after
// one ×10 penalty escalation.
OptimResult optimize(double s, double sigma, const OptimizerConfig& cfg);

struct NoGoReport {
  Eigen::Vector2d smallest_eigenvalues;  // of V_ρ + V_Π, ascending
  double subspace_overlap = 0.0;  // mean squared weight of their eigenvectors on span{ω_ρ3, ω_ρ4}
  double ppt_margin = 0.0;
  double squeezed_variance = 0.0;  // e^{-2s}
  bool small_pair = false;  // both smallest eigenvalues ≤ 10·e^{-2s}
};

NoGoReport no_go_diagnostic(const CovMatrix& v_pi, double s,
                            double tol = kDefaultTol);

// V_Π with eigenvalues (l1, l2, l3, l4) on the rotated TMSV eigenbasis
// ω_Π1 = x1 ω_ρ1 + √(1-x1²) ω_ρ2, ω_Π2 = √(1-x1²) ω_ρ1 - x1 ω_ρ2, and the
// same with x3 on (ω_ρ3, ω_ρ4).
CovMatrix eigen_ansatz_measurement(double x1, double x3, double l1, double l2,
                                   double l3, double l4);

}  // namespace cvhide
