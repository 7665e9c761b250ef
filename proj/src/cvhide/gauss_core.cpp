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

#include "gauss_core.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>

#include "error.hpp"

namespace cvhide {
namespace {

using ComplexMatrix = Eigen::MatrixXcd;

void require_modes(int n_modes) {
  if (n_modes < 1) {
    fail(ErrorCode::kInvalidArgument,
         "n_modes must be >= 1, got " + std::to_string(n_modes));
  }
}

double min_hermitian_eigenvalue(const Matrix& re, const Matrix& im) {
  ComplexMatrix h(re.rows(), re.cols());
  h.real() = re;
  h.imag() = im;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double spectral_norm(const Vector& eigenvalues) {
  return eigenvalues.cwiseAbs().maxCoeff();
}

}  // namespace

Matrix passive_symplectic(const Eigen::Matrix2cd& u) {
  Matrix s(4, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double re = u(i, j).real();
      const double im = u(i, j).imag();
      s(2 * i, 2 * j) = re;
      s(2 * i, 2 * j + 1) = -im;
      s(2 * i + 1, 2 * j) = im;
      s(2 * i + 1, 2 * j + 1) = re;
    }
  }
  return s;
}

Eigen::Matrix2cd random_unitary(CounterRng& rng) {
  const double two_pi = 2.0 * std::numbers::pi;
  const double theta = std::acos(std::sqrt(rng.uniform()));
  const auto e = [](double a) { return std::polar(1.0, a); };
  const double a = two_pi * rng.uniform();
  const double b = two_pi * rng.uniform();
  const double g = two_pi * rng.uniform();
  Eigen::Matrix2cd u;
  u << e(a) * std::cos(theta), -e(b) * std::sin(theta),
       std::conj(e(b)) * std::sin(theta), std::conj(e(a)) * std::cos(theta);
  return e(g) * u;
}

double effective_tolerance(double tol, double norm) {
  return tol + 64.0 * std::numeric_limits<double>::epsilon() * norm;
}

CovMatrix::CovMatrix(int n_modes, const Matrix& data) : n_modes_(n_modes) {
  require_modes(n_modes);
  const int d = 2 * n_modes;
  if (data.rows() != d || data.cols() != d) {
    fail(ErrorCode::kDimensionMismatch,
         "covariance of " + std::to_string(n_modes) + " modes must be " +
             std::to_string(d) + "x" + std::to_string(d) + ", got " +
             std::to_string(data.rows()) + "x" + std::to_string(data.cols()));
  }
  if (!data.allFinite()) {
    fail(ErrorCode::kInvalidArgument, "covariance has non-finite entries");
  }
  const double scale = std::max(1.0, data.cwiseAbs().maxCoeff());
  const double asym = (data - data.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    fail(ErrorCode::kInvalidArgument,
         "covariance is not symmetric (max asymmetry " + std::to_string(asym) +
             ")");
  }
  data_ = 0.5 * (data + data.transpose());
}

CovMatrix CovMatrix::identity(int n_modes) {
  require_modes(n_modes);
  return CovMatrix(n_modes, Matrix::Identity(2 * n_modes, 2 * n_modes));
}

nlohmann::json CovMatrix::to_json() const {
  std::vector<double> flat;
  flat.reserve(static_cast<size_t>(dim()) * dim());
  for (int r = 0; r < dim(); ++r) {
    for (int c = 0; c < dim(); ++c) flat.push_back(data_(r, c));
  }
  return {{"n_modes", n_modes_}, {"data", flat}};
}

CovMatrix CovMatrix::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("n_modes") || !j.contains("data") ||
      !j["n_modes"].is_number_integer() || !j["data"].is_array()) {
    fail(ErrorCode::kInvalidArgument,
         "covariance JSON needs integer n_modes and array data");
  }
  const int n = j["n_modes"].get<int>();
  require_modes(n);
  const auto& arr = j["data"];
  const size_t d = 2 * static_cast<size_t>(n);
  if (arr.size() != d * d) {
    fail(ErrorCode::kDimensionMismatch,
         "covariance JSON data has " + std::to_string(arr.size()) +
             " entries, expected " + std::to_string(d * d));
  }
  Matrix m(d, d);
  for (size_t i = 0; i < d * d; ++i) {
    if (!arr[i].is_number()) {
      fail(ErrorCode::kInvalidArgument, "covariance JSON data must be numeric");
    }
    m(i / d, i % d) = arr[i].get<double>();
  }
  return CovMatrix(n, m);
}

SymplecticForm::SymplecticForm(int n_modes) : n_modes_(n_modes) {
  require_modes(n_modes);
  data_ = Matrix::Zero(2 * n_modes, 2 * n_modes);
  for (int k = 0; k < n_modes; ++k) {
    data_(2 * k, 2 * k + 1) = 1.0;
    data_(2 * k + 1, 2 * k) = -1.0;
  }
}

SymplecticForm symplectic_form(int n_modes) { return SymplecticForm(n_modes); }

ModePartition::ModePartition(std::vector<int> left_modes,
                             std::vector<int> right_modes)
    : left_(std::move(left_modes)), right_(std::move(right_modes)) {
  check(n_modes());
}

ModePartition ModePartition::split(int n_modes, int n_left) {
  if (n_left < 0 || n_left > n_modes) {
    fail(ErrorCode::kInvalidArgument, "split point outside the mode range");
  }
  std::vector<int> left(n_left);
  std::vector<int> right(n_modes - n_left);
  std::iota(left.begin(), left.end(), 0);
  std::iota(right.begin(), right.end(), n_left);
  return ModePartition(std::move(left), std::move(right));
}

void ModePartition::check(int n_modes) const {
  std::vector<int> all(left_);
  all.insert(all.end(), right_.begin(), right_.end());
  std::sort(all.begin(), all.end());
  bool ok = static_cast<int>(all.size()) == n_modes;
  for (int i = 0; ok && i < n_modes; ++i) ok = all[i] == i;
  if (!ok) {
    fail(ErrorCode::kInvalidArgument,
         "mode partition must cover modes 0.." + std::to_string(n_modes - 1) +
             " exactly once");
  }
}

ModePartition multi_copy_partition(const ModePartition& per_copy,
                                   int n_copies) {
  if (n_copies < 1) {
    fail(ErrorCode::kInvalidArgument, "n_copies must be >= 1");
  }
  const int m = per_copy.n_modes();
  std::vector<int> left;
  std::vector<int> right;
  for (int c = 0; c < n_copies; ++c) {
    for (int k : per_copy.left_modes()) left.push_back(c * m + k);
    for (int k : per_copy.right_modes()) right.push_back(c * m + k);
  }
  return ModePartition(std::move(left), std::move(right));
}

Matrix EigSpectrum::reconstruct() const {
  return eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
}

EigSpectrum spectrum(const CovMatrix& v) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(v.data());
  // Eigen returns ascending order.
  return {es.eigenvalues().reverse(), es.eigenvectors().rowwise().reverse()};
}

BonaFideReport is_bona_fide(const CovMatrix& v, double tol) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(v.data(), Eigen::EigenvaluesOnly);
  BonaFideReport r;
  r.min_eig_v = es.eigenvalues()(0);
  r.min_eig_v_plus_iomega =
      min_hermitian_eigenvalue(v.data(), symplectic_form(v.n_modes()).data());
  r.threshold = effective_tolerance(tol, spectral_norm(es.eigenvalues()));
  r.ok = r.min_eig_v > tol && r.min_eig_v_plus_iomega >= -r.threshold;
  return r;
}

CovMatrix partial_transpose(const CovMatrix& v, const ModePartition& part) {
  part.check(v.n_modes());
  Matrix out = v.data();
  for (int k : part.right_modes()) {
    out.row(2 * k + 1) *= -1.0;
    out.col(2 * k + 1) *= -1.0;
  }
  return CovMatrix(v.n_modes(), out);
}

PptReport is_ppt(const CovMatrix& v, const ModePartition& part, double tol) {
  const BonaFideReport bf = is_bona_fide(v, tol);
  if (!bf.ok) {
    fail(ErrorCode::kNotBonaFide,
         "PPT test on a matrix that is not a bona fide covariance (min eig of "
         "V+iΩ = " + std::to_string(bf.min_eig_v_plus_iomega) + ")");
  }
  const CovMatrix tvt = partial_transpose(v, part);
  PptReport r;
  r.min_eig =
      min_hermitian_eigenvalue(tvt.data(), symplectic_form(v.n_modes()).data());
  r.ppt = r.min_eig >= -bf.threshold;
  return r;
}

Vector symplectic_eigenvalues(const CovMatrix& v) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(v.data());
  if (es.eigenvalues()(0) <= 0.0) {
    fail(ErrorCode::kSingular,
         "symplectic eigenvalues need a positive definite matrix");
  }
  const Matrix root = es.operatorSqrt();
  // i·(V^½ Ω V^½) is Hermitian with eigenvalues ±ν_k.
  const Matrix k = root * symplectic_form(v.n_modes()).data() * root;
  const Vector ev =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(
          std::complex<double>(0.0, 1.0) * k.cast<std::complex<double>>(),
          Eigen::EigenvaluesOnly)
          .eigenvalues();
  return ev.tail(v.n_modes());
}

PptReport is_ppt_symplectic(const CovMatrix& v, const ModePartition& part,
                            double tol) {
  const CovMatrix tvt = partial_transpose(v, part);
  const Vector nu = symplectic_eigenvalues(tvt);
  Eigen::SelfAdjointEigenSolver<Matrix> es(v.data(), Eigen::EigenvaluesOnly);
  const double thr = effective_tolerance(tol, spectral_norm(es.eigenvalues()));
  return {nu(0) >= 1.0 - thr, nu(0) - 1.0};
}

double ppt_violation_formula(double lambda3, double lambda4) {
  const double d = lambda3 - lambda4;
  return 0.5 * (lambda3 + lambda4 - std::sqrt(4.0 + d * d));
}

CovMatrix tmsv_cov(double s) {
  if (!std::isfinite(s)) fail(ErrorCode::kInvalidArgument, "s must be finite");
  const double c = std::cosh(2.0 * s);
  const double sh = std::sinh(2.0 * s);
  Matrix m(4, 4);
  m << c, 0, sh, 0,
       0, c, 0, -sh,
       sh, 0, c, 0,
       0, -sh, 0, c;
  return CovMatrix(2, m);
}

EigSpectrum tmsv_spectrum(double s) {
  if (!std::isfinite(s)) fail(ErrorCode::kInvalidArgument, "s must be finite");
  const double r = 1.0 / std::sqrt(2.0);
  Matrix w(4, 4);
  // Columns ω_ρ1..ω_ρ4.
  w << 0, r, 0, -r,
       -r, 0, r, 0,
       0, r, 0, r,
       r, 0, r, 0;
  const double big = std::exp(2.0 * s);
  const double small = std::exp(-2.0 * s);
  EigSpectrum out;
  out.eigenvalues = Vector(4);
  out.eigenvectors = Matrix(4, 4);
  if (s >= 0.0) {
    out.eigenvalues << big, big, small, small;
    out.eigenvectors = w;
  } else {
    out.eigenvalues << small, small, big, big;
    out.eigenvectors << w.col(2), w.col(3), w.col(0), w.col(1);
  }
  return out;
}

Matrix epr_basis() {
  const double r = 1.0 / std::sqrt(2.0);
  Matrix u(4, 4);
  u << r, 0, -r, 0,
       r, 0, r, 0,
       0, r, 0, -r,
       0, r, 0, r;
  return u;
}

CovMatrix nonlocal_epr_measurement(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    fail(ErrorCode::kInvalidArgument, "delta must be a positive finite number");
  }
  const Matrix w = tmsv_spectrum(0.0).eigenvectors;
  Vector lambda(4);
  lambda << 1.0 / delta, 1.0 / delta, delta, delta;
  return CovMatrix(2, w * lambda.asDiagonal() * w.transpose());
}

CovMatrix local_homodyne_measurement(double phi1, double phi2, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    fail(ErrorCode::kInvalidArgument, "delta must be a positive finite number");
  }
  Matrix m = Matrix::Zero(4, 4);
  const double phis[2] = {phi1, phi2};
  for (int k = 0; k < 2; ++k) {
    Eigen::Matrix2d rot;
    rot << std::cos(phis[k]), -std::sin(phis[k]),
           std::sin(phis[k]), std::cos(phis[k]);
    const Eigen::Vector2d d(delta, 1.0 / delta);
    m.block<2, 2>(2 * k, 2 * k) = rot * d.asDiagonal() * rot.transpose();
  }
  return CovMatrix(2, m);
}

CovMatrix thermal_pair_cov(double eps, int sign) {
  if (!(eps >= 0.0) || !std::isfinite(eps)) {
    fail(ErrorCode::kInvalidArgument, "eps must be a nonnegative finite number");
  }
  if (sign != 1 && sign != -1) {
    fail(ErrorCode::kInvalidArgument, "sign must be +1 or -1");
  }
  const double d = 1.0 + eps;
  const double o = sign * eps;
  Matrix m(4, 4);
  m << d, 0, o, 0,
       0, d, 0, o,
       o, 0, d, 0,
       0, o, 0, d;
  return CovMatrix(2, m);
}

CovMatrix multi_copy_cov(const CovMatrix& v, int n_copies, int cap) {
  if (n_copies < 1) fail(ErrorCode::kInvalidArgument, "n_copies must be >= 1");
  if (n_copies > cap) {
    fail(ErrorCode::kInvalidArgument,
         "n_copies " + std::to_string(n_copies) + " exceeds cap " +
             std::to_string(cap));
  }
  const int d = v.dim();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(d) * n_copies,
                            static_cast<Eigen::Index>(d) * n_copies);
  for (int c = 0; c < n_copies; ++c) {
    out.block(static_cast<Eigen::Index>(c) * d, static_cast<Eigen::Index>(c) * d,
              d, d) = v.data();
  }
  return CovMatrix(v.n_modes() * n_copies, out);
}

}  // namespace cvhide
