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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <complex>

#include "error.hpp"
#include "gauss_core.hpp"
#include "sampling.hpp"
#include "validate.hpp"

namespace cvhide {
namespace {

const ModePartition kSplit = ModePartition::split(2, 1);

// Oracle: min eigenvalue of a Hermitian matrix via a complex eigensolve that
// does not go through any library helper.
double hermitian_min_eig(const Matrix& re, const Matrix& im) {
  Eigen::MatrixXcd h(re.rows(), re.cols());
  h.real() = re;
  h.imag() = im;
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(h).eigenvalues()(0);
}

Matrix projector(const Matrix& cols) { return cols * cols.transpose(); }

TEST(SymplecticForm, TwoModeMatchesPrintedForm) {
  Matrix expect(4, 4);
  expect << 0, 1, 0, 0,
            -1, 0, 0, 0,
            0, 0, 0, 1,
            0, 0, -1, 0;
  EXPECT_EQ(symplectic_form(2).data(), expect);
}

TEST(SymplecticForm, SingleModeBlock) {
  Matrix expect(2, 2);
  expect << 0, 1, -1, 0;
  EXPECT_EQ(symplectic_form(1).data(), expect);
}

TEST(SymplecticForm, SquaresToMinusIdentityExactly) {
  for (int n : {1, 2, 3, 7}) {
    const Matrix om = symplectic_form(n).data();
    EXPECT_EQ(om * om, -Matrix::Identity(2 * n, 2 * n)) << "n=" << n;
  }
}

TEST(SymplecticForm, RejectsNonPositiveModes) {
  EXPECT_THROW(symplectic_form(0), Error);
}

TEST(CovMatrix, RejectsWrongDimensionAndAsymmetry) {
  EXPECT_THROW(CovMatrix(2, Matrix::Identity(3, 3)), Error);
  Matrix m = Matrix::Identity(2, 2);
  m(0, 1) = 0.5;
  EXPECT_THROW(CovMatrix(1, m), Error);
}

TEST(CovMatrix, JsonRoundTrip) {
  const CovMatrix v = tmsv_cov(0.7);
  const nlohmann::json j = v.to_json();
  EXPECT_EQ(j.at("n_modes").get<int>(), 2);
  EXPECT_EQ(j.at("data").size(), 16u);
  const CovMatrix back = CovMatrix::from_json(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.data(), v.data());
}

TEST(CovMatrix, JsonLoaderValidatesSymmetry) {
  nlohmann::json j = CovMatrix::identity(1).to_json();
  j["data"][1] = 0.25;
  EXPECT_THROW(CovMatrix::from_json(j), Error);
}

TEST(ModePartition, ChecksCoverage) {
  EXPECT_NO_THROW(ModePartition({0}, {1}).check(2));
  EXPECT_THROW(ModePartition({0}, {0}).check(2), Error);
  EXPECT_THROW(ModePartition({0}, {2}).check(2), Error);
  EXPECT_THROW(ModePartition({0}, {}).check(2), Error);
}

TEST(ModePartition, MultiCopyKeepsSidesPerCopy) {
  const ModePartition p = multi_copy_partition(kSplit, 3);
  EXPECT_EQ(p.left_modes(), (std::vector<int>{0, 2, 4}));
  EXPECT_EQ(p.right_modes(), (std::vector<int>{1, 3, 5}));
}

TEST(BonaFide, Examples) {
  EXPECT_TRUE(is_bona_fide(CovMatrix::identity(2)).ok);
  EXPECT_TRUE(is_bona_fide(tmsv_cov(1.0)).ok);
  const double e = std::exp(-6.0);
  EXPECT_FALSE(is_bona_fide(CovMatrix(2, e * Matrix::Identity(4, 4))).ok);
}

TEST(BonaFide, ReportsMarginsOfVacuum) {
  const BonaFideReport r = is_bona_fide(CovMatrix::identity(2));
  EXPECT_NEAR(r.min_eig_v, 1.0, 1e-14);
  EXPECT_NEAR(r.min_eig_v_plus_iomega, 0.0, 1e-14);
  EXPECT_GE(r.threshold, kDefaultTol);
}

TEST(BonaFide, ClassicalNoiseMatrixIsNotPositive) {
  Matrix m = Matrix::Identity(2, 2);
  m(1, 1) = -1.0;
  EXPECT_FALSE(is_bona_fide(CovMatrix(1, m)).ok);
}

TEST(PartialTranspose, Examples) {
  EXPECT_EQ(partial_transpose(CovMatrix::identity(2), kSplit).data(),
            Matrix::Identity(4, 4));
  const double s = 0.8;
  Matrix expect = tmsv_cov(s).data();
  // T = diag(1,1,1,-1): flips row/column 3 off the diagonal.
  for (int k = 0; k < 3; ++k) {
    expect(3, k) = -expect(3, k);
    expect(k, 3) = -expect(k, 3);
  }
  EXPECT_EQ(partial_transpose(tmsv_cov(s), kSplit).data(), expect);
}

TEST(PartialTranspose, InvolutionBitExact) {
  Matrix m(4, 4);
  m << 3, 0.5, 0.25, -1.5,
       0.5, 2, 0.75, 0.125,
       0.25, 0.75, 4, 0.5,
       -1.5, 0.125, 0.5, 5;
  const CovMatrix v(2, m);
  EXPECT_EQ(partial_transpose(partial_transpose(v, kSplit), kSplit).data(), m);
}

TEST(Ppt, Examples) {
  EXPECT_TRUE(is_ppt(CovMatrix::identity(2), kSplit).ppt);
  EXPECT_FALSE(is_ppt(nonlocal_epr_measurement(1e-6), kSplit).ppt);
  const PptReport tmsv = is_ppt(tmsv_cov(1.0), kSplit);
  EXPECT_FALSE(tmsv.ppt);
  // Oracle: the partially transposed TMSV has symplectic eigenvalue e^{-2s},
  // so T V T + iΩ has eigenvalue e^{-2s} - 1.
  EXPECT_NEAR(tmsv.min_eig, std::exp(-2.0) - 1.0, 1e-12);
}

TEST(Ppt, UnphysicalInputIsDistinctError) {
  const CovMatrix bad(2, 0.1 * Matrix::Identity(4, 4));
  try {
    is_ppt(bad, kSplit);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotBonaFide);
  }
}

TEST(Ppt, ThermalPairsArePpt) {
  for (int sign : {1, -1}) {
    const CovMatrix v = thermal_pair_cov(0.01, sign);
    EXPECT_TRUE(is_bona_fide(v).ok);
    EXPECT_TRUE(is_ppt(v, kSplit).ppt);
  }
}

TEST(PptViolationFormula, PlugIns) {
  EXPECT_DOUBLE_EQ(ppt_violation_formula(0.0, 0.0), -1.0);
  EXPECT_DOUBLE_EQ(ppt_violation_formula(1.0, 1.0), 0.0);
}

TEST(Tmsv, Examples) {
  EXPECT_EQ(tmsv_cov(0.0).data(), Matrix::Identity(4, 4));
  const CovMatrix v = tmsv_cov(1.0);
  EXPECT_NEAR(v(0, 0), 3.7621956910836314, 1e-14);
  EXPECT_NEAR(v(0, 2), 3.626860407847019, 1e-14);
  EXPECT_NEAR(v(1, 3), -3.626860407847019, 1e-14);
  EXPECT_EQ(v(0, 1), 0.0);
}

TEST(Tmsv, EigenvaluesArePairedExponentials) {
  for (double s : {0.3, 1.0, 2.5}) {
    const EigSpectrum sp = spectrum(tmsv_cov(s));
    EXPECT_NEAR(sp.eigenvalues(0), std::exp(2 * s), 1e-9 * std::exp(2 * s));
    EXPECT_NEAR(sp.eigenvalues(1), std::exp(2 * s), 1e-9 * std::exp(2 * s));
    EXPECT_NEAR(sp.eigenvalues(2), std::exp(-2 * s), 1e-9);
    EXPECT_NEAR(sp.eigenvalues(3), std::exp(-2 * s), 1e-9);
  }
}

TEST(TmsvSpectrum, PrintedEigenvectors) {
  const EigSpectrum sp = tmsv_spectrum(1.0);
  const double r = 1.0 / std::sqrt(2.0);
  Matrix expect(4, 4);
  expect.col(0) << 0, -r, 0, r;
  expect.col(1) << r, 0, r, 0;
  expect.col(2) << 0, r, 0, r;
  expect.col(3) << -r, 0, r, 0;
  EXPECT_TRUE(sp.eigenvectors.isApprox(expect, 1e-15));
  EXPECT_TRUE((sp.eigenvectors.transpose() * sp.eigenvectors)
                  .isApprox(Matrix::Identity(4, 4), 1e-15));
  EXPECT_TRUE(sp.reconstruct().isApprox(tmsv_cov(1.0).data(), 1e-12));
}

TEST(TmsvSpectrum, ProjectorsMatchGeneralEigensolver) {
  for (double s : {0.5, 2.0, 4.0}) {
    const EigSpectrum mine = tmsv_spectrum(s);
    Eigen::SelfAdjointEigenSolver<Matrix> es(tmsv_cov(s).data());
    // Eigen sorts ascending: columns 0,1 span e^{-2s}, columns 2,3 span e^{2s}.
    const Matrix big = projector(es.eigenvectors().rightCols(2));
    const Matrix small = projector(es.eigenvectors().leftCols(2));
    EXPECT_LE((projector(mine.eigenvectors.leftCols(2)) - big).norm(), 1e-9);
    EXPECT_LE((projector(mine.eigenvectors.rightCols(2)) - small).norm(), 1e-9);
  }
}

TEST(TmsvSpectrum, VacuumHasUnitEigenvalues) {
  const EigSpectrum sp = tmsv_spectrum(0.0);
  EXPECT_TRUE(sp.eigenvalues.isApprox(Vector::Ones(4)));
}

TEST(EprBasis, OrthogonalAndDiagonalizesTmsv) {
  const Matrix u = epr_basis();
  EXPECT_TRUE((u * u.transpose()).isApprox(Matrix::Identity(4, 4), 1e-15));
  for (double s : {1.0, 3.0}) {
    const Matrix d = u * tmsv_cov(s).data() * u.transpose();
    Vector expect(4);
    expect << std::exp(-2 * s), std::exp(2 * s), std::exp(2 * s), std::exp(-2 * s);
    EXPECT_LE((d - Matrix(expect.asDiagonal())).cwiseAbs().maxCoeff(),
              1e-12 * std::exp(2 * s));
  }
}

TEST(EprBasis, RotatesThermalPairToDiagonal) {
  const double eps = 0.01;
  const Matrix u = epr_basis();
  Vector plus(4), minus(4);
  plus << 1, 1 + 2 * eps, 1, 1 + 2 * eps;
  minus << 1 + 2 * eps, 1, 1 + 2 * eps, 1;
  EXPECT_TRUE((u * thermal_pair_cov(eps, 1).data() * u.transpose())
                  .isApprox(Matrix(plus.asDiagonal()), 1e-14));
  EXPECT_TRUE((u * thermal_pair_cov(eps, -1).data() * u.transpose())
                  .isApprox(Matrix(minus.asDiagonal()), 1e-14));
}

TEST(EprMeasurement, Examples) {
  EXPECT_TRUE(nonlocal_epr_measurement(1.0).data().isApprox(Matrix::Identity(4, 4), 1e-15));
  const CovMatrix v = nonlocal_epr_measurement(1e-6);
  EXPECT_TRUE(is_bona_fide(v).ok);
  EXPECT_FALSE(is_ppt(v, kSplit).ppt);
  const EigSpectrum sp = spectrum(v);
  EXPECT_NEAR(sp.eigenvalues(0), 1e6, 1e-6);
  // Entries of size 1e6 carry absolute rounding ~1e-10 into the small pair.
  EXPECT_NEAR(sp.eigenvalues(3), 1e-6, 1e-9);
  EXPECT_THROW(nonlocal_epr_measurement(0.0), Error);
  EXPECT_THROW(nonlocal_epr_measurement(-1e-3), Error);
}

TEST(EprMeasurement, PureForAllDeltas) {
  // Storing the matrix perturbs ν by O(ε/δ²).
  for (double delta : {1e-1, 1e-2, 1e-4, 1e-6}) {
    const Vector nu = symplectic_eigenvalues(nonlocal_epr_measurement(delta));
    const double allowed = 1e-9 + 64 * std::numeric_limits<double>::epsilon() / (delta * delta);
    EXPECT_LE((nu.array() - 1.0).abs().maxCoeff(), allowed) << "delta=" << delta;
  }
}

TEST(LocalHomodyne, IsPptAndPure) {
  for (double phi : {0.0, 0.7, 1.5707963267948966}) {
    const CovMatrix v = local_homodyne_measurement(phi, -phi, 1e-4);
    EXPECT_TRUE(is_ppt(v, kSplit).ppt);
    const Vector nu = symplectic_eigenvalues(v);
    EXPECT_LE((nu.array() - 1.0).abs().maxCoeff(), 1e-6);
  }
  Vector expect(4);
  expect << 1e-3, 1e3, 1e-3, 1e3;
  EXPECT_TRUE(local_homodyne_measurement(0, 0, 1e-3).data().isApprox(
      Matrix(expect.asDiagonal()), 1e-14));
}

TEST(ThermalPair, Pattern) {
  const double eps = 0.01;
  Matrix expect(4, 4);
  expect << 1 + eps, 0, eps, 0,
            0, 1 + eps, 0, eps,
            eps, 0, 1 + eps, 0,
            0, eps, 0, 1 + eps;
  EXPECT_TRUE(thermal_pair_cov(eps, 1).data().isApprox(expect, 1e-15));
  EXPECT_EQ(thermal_pair_cov(0.0, 1).data(), Matrix::Identity(4, 4));
  EXPECT_THROW(thermal_pair_cov(0.01, 0), Error);
  EXPECT_THROW(thermal_pair_cov(-0.01, 1), Error);
}

TEST(MultiCopy, Examples) {
  const CovMatrix v = tmsv_cov(0.4);
  EXPECT_EQ(multi_copy_cov(v, 1).data(), v.data());
  EXPECT_EQ(multi_copy_cov(CovMatrix::identity(2), 3).data(), Matrix::Identity(12, 12));
  const Vector base = spectrum(v).eigenvalues;
  const Vector rep = spectrum(multi_copy_cov(v, 3)).eigenvalues;
  for (int i = 0; i < 4; ++i) {
    for (int c = 0; c < 3; ++c) EXPECT_NEAR(rep(3 * i + c), base(i), 1e-12);
  }
}

TEST(MultiCopy, CapGuardsAllocation) {
  EXPECT_THROW(multi_copy_cov(CovMatrix::identity(2), 0), Error);
  EXPECT_THROW(multi_copy_cov(CovMatrix::identity(2), 11, 10), Error);
}

// ---- property tests ----------------------------------------------------------

TEST(Property, ConstructorsAreBonaFide) {
  for (double s : {0.0, 1.0, 3.0, 5.0}) EXPECT_TRUE(is_bona_fide(tmsv_cov(s)).ok);
  for (double d : {1e-8, 1e-4, 1.0, 10.0}) {
    EXPECT_TRUE(is_bona_fide(nonlocal_epr_measurement(d)).ok);
    EXPECT_TRUE(is_bona_fide(local_homodyne_measurement(0.3, 1.1, d)).ok);
  }
  for (double e : {0.0, 1e-3, 0.5}) {
    EXPECT_TRUE(is_bona_fide(thermal_pair_cov(e, 1)).ok);
    EXPECT_TRUE(is_bona_fide(thermal_pair_cov(e, -1)).ok);
  }
  EXPECT_TRUE(is_bona_fide(multi_copy_cov(tmsv_cov(1.0), 4)).ok);
  for (double s : {1.0, 3.0}) {
    EXPECT_FALSE(is_bona_fide(CovMatrix(2, std::exp(-2 * s) * Matrix::Identity(4, 4))).ok);
  }
}

TEST(Property, RandomCovariancesAgreeAcrossPptMethods) {
  CounterRng rng(2024, 0);
  const Matrix om = symplectic_form(2).data();
  int n_ppt = 0;
  for (int i = 0; i < 100; ++i) {
    const CovMatrix v = random_two_mode_covariance(rng);
    EXPECT_GE(hermitian_min_eig(v.data(), om), -1e-9);
    const bool a = is_ppt(v, kSplit).ppt;
    const bool b = is_ppt_symplectic(v, kSplit).ppt;
    EXPECT_EQ(a, b) << "sample " << i;
    n_ppt += a;
  }
  // Both verdicts should actually occur in the sample.
  EXPECT_GT(n_ppt, 0);
  EXPECT_LT(n_ppt, 100);
}

TEST(Property, SymplecticEigenvaluesInvariantUnderPassiveMaps) {
  CounterRng rng(7, 1);
  for (int i = 0; i < 20; ++i) {
    const CovMatrix v = random_two_mode_covariance(rng);
    const Matrix p = passive_symplectic(random_unitary(rng));
    const Matrix om = symplectic_form(2).data();
    EXPECT_TRUE((p * om * p.transpose()).isApprox(om, 1e-12));
    const Matrix w = p * v.data() * p.transpose();
    const Vector a = symplectic_eigenvalues(v);
    const Vector b = symplectic_eigenvalues(CovMatrix(2, 0.5 * (w + w.transpose())));
    EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Property, SpectrumReconstructs) {
  CounterRng rng(11, 2);
  for (int i = 0; i < 20; ++i) {
    const CovMatrix v = random_two_mode_covariance(rng);
    const EigSpectrum sp = spectrum(v);
    EXPECT_LE((sp.reconstruct() - v.data()).norm(), 1e-9 * v.data().norm());
    for (int k = 1; k < 4; ++k) EXPECT_GE(sp.eigenvalues(k - 1), sp.eigenvalues(k));
  }
}

TEST(EffectiveTolerance, GrowsWithNorm) {
  EXPECT_NEAR(effective_tolerance(1e-9, 1.0), 1e-9, 1e-13);
  EXPECT_GT(effective_tolerance(1e-9, 1e8), 1e-7);
}

}  // namespace
}  // namespace cvhide
