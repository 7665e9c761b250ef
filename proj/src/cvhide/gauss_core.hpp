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

// Covariance-matrix formalism for Gaussian states and measurements.
//
// Quadrature ordering is (q1, p1, q2, p2, ...) everywhere and the vacuum
// variance is 1. All values are immutable after construction.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "json.hpp"
#include "sampling.hpp"

namespace cvhide {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-9;
inline constexpr int kDefaultCopyCap = 10000;

class CovMatrix {
 public:
  // Validates dimension 2*n_modes and symmetry to 1e-12 relative; stores the
  // symmetric part (bit-identical for exactly symmetric input).
  CovMatrix(int n_modes, const Matrix& data);

  static CovMatrix identity(int n_modes);

  int n_modes() const { return n_modes_; }
  int dim() const { return 2 * n_modes_; }
  const Matrix& data() const { return data_; }
  double operator()(int r, int c) const { return data_(r, c); }

  nlohmann::json to_json() const;
  static CovMatrix from_json(const nlohmann::json& j);

 private:
  int n_modes_;
  Matrix data_;
};

class SymplecticForm {
 public:
  explicit SymplecticForm(int n_modes);

  int n_modes() const { return n_modes_; }
  const Matrix& data() const { return data_; }

 private:
  int n_modes_;
  Matrix data_;
};

// Two-party split of the modes. Indices are zero-based.
class ModePartition {
 public:
  ModePartition(std::vector<int> left_modes, std::vector<int> right_modes);

  // Modes [0, n_left) on the left, the rest on the right.
  static ModePartition split(int n_modes, int n_left);

  const std::vector<int>& left_modes() const { return left_; }
  const std::vector<int>& right_modes() const { return right_; }
  int n_modes() const { return static_cast<int>(left_.size() + right_.size()); }

  // Throws kInvalidArgument unless the partition covers exactly 0..n_modes-1.
  void check(int n_modes) const;

 private:
  std::vector<int> left_;
  std::vector<int> right_;
};

// The partition of N stacked copies, each copy split as `per_copy`.
ModePartition multi_copy_partition(const ModePartition& per_copy, int n_copies);

struct EigSpectrum {
  Vector eigenvalues;   // descending
  Matrix eigenvectors;  // orthonormal columns, matching eigenvalues

  Matrix reconstruct() const;
};

EigSpectrum spectrum(const CovMatrix& v);

SymplecticForm symplectic_form(int n_modes);

struct BonaFideReport {
  bool ok = false;
  double min_eig_v = 0.0;
  double min_eig_v_plus_iomega = 0.0;
  double threshold = 0.0;  // effective tolerance actually applied
};

// V > 0 and V + iΩ ⪰ 0, up to tol plus the eigensolver's backward error.
BonaFideReport is_bona_fide(const CovMatrix& v, double tol = kDefaultTol);

// T V T with T flipping every momentum quadrature of the right modes.
CovMatrix partial_transpose(const CovMatrix& v, const ModePartition& part);

struct PptReport {
  bool ppt = false;
  double min_eig = 0.0;  // smallest eigenvalue of T V T + iΩ
};

// Throws kNotBonaFide if V itself is unphysical.
PptReport is_ppt(const CovMatrix& v, const ModePartition& part,
                 double tol = kDefaultTol);

// Ascending symplectic eigenvalues of a positive definite V (moduli of the
// eigenvalues of iΩV).
Vector symplectic_eigenvalues(const CovMatrix& v);

// Independent PPT test: smallest symplectic eigenvalue of T V T >= 1 - tol.
PptReport is_ppt_symplectic(const CovMatrix& v, const ModePartition& part,
                            double tol = kDefaultTol);

// One eigenvalue of T V_Π T + iΩ when V_Π has eigenvalues lambda3, lambda4 on
// span{ω_ρ3, ω_ρ4}: ½(λ3 + λ4 − √(4 + (λ3 − λ4)²)).
double ppt_violation_formula(double lambda3, double lambda4);

// Two-mode squeezed vacuum with squeezing s.
CovMatrix tmsv_cov(double s);
EigSpectrum tmsv_spectrum(double s);

// Orthogonal map to (q1-q2, q1+q2, p1-p2, p1+p2)/√2.
Matrix epr_basis();

// Joint homodyne of q1-q2 and p1+p2 with residual variance delta.
CovMatrix nonlocal_epr_measurement(double delta);

// Product of single-mode homodynes of cos(phi)q + sin(phi)p on each mode,
// variance delta along the measured quadrature and 1/delta across it.
CovMatrix local_homodyne_measurement(double phi1, double phi2, double delta);

// Two-mode weak thermal state with |g| = 1 and theta = 0 (sign +1) or pi
// (sign -1).
CovMatrix thermal_pair_cov(double eps, int sign);

CovMatrix multi_copy_cov(const CovMatrix& v, int n_copies,
                         int cap = kDefaultCopyCap);

// Effective eigenvalue threshold for a matrix with spectral norm `norm`.
// Passive two-mode symplectic from a unitary, in (q1, p1, q2, p2) ordering.
Matrix passive_symplectic(const Eigen::Matrix2cd& u);
Eigen::Matrix2cd random_unitary(CounterRng& rng);  // Haar

double effective_tolerance(double tol, double norm);

}  // namespace cvhide
