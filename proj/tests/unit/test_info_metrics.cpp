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

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <vector>

#include "error.hpp"
#include "gauss_core.hpp"
#include "info_metrics.hpp"
#include "sampling.hpp"
#include "validate.hpp"

namespace cvhide {
namespace {

constexpr double kPi = std::numbers::pi;
const ModePartition kSplit = ModePartition::split(2, 1);

// Oracle for independent (Q1, Q4): E[erfc(|Q|/√2σ)] = (2/π) atan(σ/√var).
double erfc_mean_closed_form(double var, double sigma) {
  return 2.0 / kPi * std::atan(sigma / std::sqrt(var));
}

// Oracle: 1-D numerical quadrature of E[erfc(|Q|/√2σ)] with Q ~ N(0, var),
// independent of the closed-form path and of the library's quadrature.
double erfc_mean_numeric(double var, double sigma) {
  auto f = [&](double q) {
    return std::erfc(q / (std::sqrt(2.0) * sigma)) * std::exp(-0.5 * q * q / var) /
           std::sqrt(2.0 * kPi * var);
  };
  return 2.0 * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                   f, 0.0, 40.0 * std::sqrt(var), 20, 1e-13);
}

CovMatrix random_orthogonal_conjugate(const CovMatrix& v, CounterRng& rng) {
  Matrix g(4, 4);
  for (int i = 0; i < 16; ++i) g(i / 4, i % 4) = rng.normal();
  const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ();
  const Matrix w = q * v.data() * q.transpose();
  return CovMatrix(2, 0.5 * (w + w.transpose()));
}

Matrix random_spd(int d, CounterRng& rng) {
  Matrix g(d, d);
  for (int i = 0; i < d * d; ++i) g(i / d, i % d) = rng.normal();
  return g * g.transpose() / d + 0.2 * Matrix::Identity(d, d);
}

TEST(OutcomeCovariance, Examples) {
  const CovMatrix two = outcome_covariance(CovMatrix::identity(2), CovMatrix::identity(2));
  EXPECT_EQ(two.data(), 2.0 * Matrix::Identity(4, 4));
  const double s = 2.0;
  const double d = 1e-3;
  const EigSpectrum sp = spectrum(outcome_covariance(tmsv_cov(s), nonlocal_epr_measurement(d)));
  EXPECT_NEAR(sp.eigenvalues(0), std::exp(2 * s) + 1 / d, 1e-9);
  EXPECT_NEAR(sp.eigenvalues(1), std::exp(2 * s) + 1 / d, 1e-9);
  EXPECT_NEAR(sp.eigenvalues(2), std::exp(-2 * s) + d, 1e-12);
  EXPECT_NEAR(sp.eigenvalues(3), std::exp(-2 * s) + d, 1e-12);
  const CovMatrix a = tmsv_cov(0.3);
  const CovMatrix b = thermal_pair_cov(0.2, -1);
  EXPECT_EQ(outcome_covariance(a, b).data(), outcome_covariance(b, a).data());
  EXPECT_THROW(outcome_covariance(CovMatrix::identity(1), CovMatrix::identity(2)), Error);
}

TEST(MutualInformation, Examples) {
  EXPECT_NEAR(mutual_information(CovMatrix(2, 2.0 * Matrix::Identity(4, 4)), 1.0),
              2.0 * std::log(1.5), 1e-14);
  const double mi = mutual_information(
      outcome_covariance(tmsv_cov(5.0), nonlocal_epr_measurement(1e-8)), 1.0);
  EXPECT_NEAR(mi / 10.0, 1.0, 0.02);
  const CovMatrix v = outcome_covariance(tmsv_cov(1.0), CovMatrix::identity(2));
  double prev = 0.0;
  for (double sigma : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    const double cur = mutual_information(v, sigma);
    EXPECT_GT(cur, prev);
    prev = cur;
  }
}

TEST(MutualInformation, SingularThrows) {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = 0.0;
  try {
    mutual_information(CovMatrix(2, m), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSingular);
  }
  EXPECT_THROW(mutual_information(CovMatrix::identity(2), 0.0), Error);
}

TEST(MutualInformation, FullPriorMatchesIsotropic) {
  const CovMatrix v = outcome_covariance(tmsv_cov(1.2), local_homodyne_measurement(0.2, 0.4, 0.1));
  PriorSpec p;
  p.v_r = 2.25 * Matrix::Identity(4, 4);
  EXPECT_NEAR(mutual_information(v, p), mutual_information(v, 1.5), 1e-12);
  EXPECT_NEAR(mutual_information(v, PriorSpec::isotropic(1.5)), mutual_information(v, 1.5), 0);
  PriorSpec bad;
  bad.v_r = -Matrix::Identity(4, 4);
  EXPECT_THROW(mutual_information(v, bad), Error);
}

TEST(ProjectedMi, SqueezedDirectionGivesS) {
  const double s = 6.0;
  const double t = 1.0 / std::sqrt(2.0);
  const Matrix w = projected_basis(t, 0.0);
  Vector d(4);
  d << std::exp(-2 * s), 3.0, 0.5, 7.0;
  const CovMatrix v(2, w * d.asDiagonal() * w.transpose());
  EXPECT_NEAR(mutual_information_projected(v, t, 0.0, 1.0),
              0.5 * std::log1p(std::exp(2 * s)), 1e-9);
  EXPECT_NEAR(mutual_information_projected(v, t, 0.0, 1.0), s, 1e-3);
}

TEST(ProjectedMi, LocalHomodyneComparableToNonlocal) {
  const double s = 4.0;
  const CovMatrix local = outcome_covariance(tmsv_cov(s), local_homodyne_measurement(0, 0, 1e-8));
  const CovMatrix nonlocal = outcome_covariance(tmsv_cov(s), nonlocal_epr_measurement(1e-8));
  const double t = 1.0 / std::sqrt(2.0);
  const double a = mutual_information_projected(local, t, 0.0, 1.0);
  const double b = mutual_information_projected(nonlocal, t, 0.0, 1.0);
  EXPECT_NEAR(a / b, 1.0, 0.01);
}

// Phase-matched local homodynes (t1 q1 + t2 p1, -t1 q2 + t2 p2) track the
// nonlocal measurement in every direction; mismatched ones lose it.
TEST(ProjectedMi, PhaseMatchedLocalHomodyneAnyDirection) {
  const double s = 4.0;
  const CovMatrix nonlocal = outcome_covariance(tmsv_cov(s), nonlocal_epr_measurement(1e-8));
  for (double angle : {0.0, 0.3, kPi / 4, 1.2, kPi / 2, 2.5}) {
    const double t1 = std::cos(angle) / std::sqrt(2.0);
    const double t2 = std::sin(angle) / std::sqrt(2.0);
    const CovMatrix local = outcome_covariance(
        tmsv_cov(s), local_homodyne_measurement(std::atan2(t2, t1), std::atan2(t2, -t1), 1e-8));
    const double a = mutual_information_projected(local, t1, t2, 1.0);
    const double b = mutual_information_projected(nonlocal, t1, t2, 1.0);
    EXPECT_NEAR(a / b, 1.0, 0.01) << "angle=" << angle;
  }
  const CovMatrix q_only = outcome_covariance(tmsv_cov(s), local_homodyne_measurement(0, 0, 1e-8));
  EXPECT_LT(mutual_information_projected(q_only, 0.0, 1.0 / std::sqrt(2.0), 1.0), 1e-3);
}

TEST(ProjectedMi, VanishesWithSigmaAndChecksNormalization) {
  const CovMatrix v = outcome_covariance(tmsv_cov(1.0), CovMatrix::identity(2));
  EXPECT_LT(mutual_information_projected(v, 0.5, 0.5, 1e-6), 1e-11);
  EXPECT_THROW(mutual_information_projected(v, 0.5, 0.6, 1.0), Error);
  EXPECT_THROW(projected_basis(1.0, 0.0), Error);
}

TEST(ProjectedMi, BasisIsOrthonormal) {
  for (auto [t1, t2] : std::vector<std::pair<double, double>>{
           {1 / std::sqrt(2.0), 0.0}, {0.5, 0.5}, {0.0, 1 / std::sqrt(2.0)}}) {
    const Matrix w = projected_basis(t1, t2);
    EXPECT_TRUE((w.transpose() * w).isApprox(Matrix::Identity(4, 4), 1e-12));
  }
}

TEST(GaussianKl, Examples) {
  const Matrix i2 = Matrix::Identity(2, 2);
  EXPECT_NEAR(gaussian_kl(i2, i2), 0.0, 1e-15);
  // ½(tr 2I₂ − 2 + ln det I₂/det 2I₂) = 1 − ln 2.
  EXPECT_NEAR(gaussian_kl(2.0 * i2, i2), 1.0 - std::log(2.0), 1e-14);
  Vector mu(2);
  mu << 1.0, -2.0;
  // Mean shift under identity covariance: ½|Δμ|².
  EXPECT_NEAR(gaussian_kl(i2, i2, Vector::Zero(2), mu), 2.5, 1e-14);
  EXPECT_THROW(gaussian_kl(i2, Matrix::Zero(2, 2)), Error);
  EXPECT_THROW(gaussian_kl(i2, Matrix::Identity(3, 3)), Error);
}

TEST(GaussianKl, ThermalHeterodyneIsNEpsSquared) {
  const double eps = 0.01;
  const Matrix s1 = thermal_pair_cov(eps, 1).data() + Matrix::Identity(4, 4);
  const Matrix s2 = thermal_pair_cov(eps, -1).data() + Matrix::Identity(4, 4);
  EXPECT_NEAR(gaussian_kl(s1, s2), eps * eps, 3 * eps * eps * eps);
}

TEST(Pinsker, Examples) {
  EXPECT_EQ(pinsker_bound(0.0).value, 0.0);
  const int n = 100;
  const double eps = 0.01;
  EXPECT_NEAR(pinsker_bound(4 * eps * eps * n).value, std::sqrt(2.0 * n) * eps, 1e-15);
  const PinskerBound b = pinsker_bound(2.0);
  EXPECT_DOUBLE_EQ(b.raw, 1.0);
  EXPECT_FALSE(b.clamped);
  const PinskerBound c = pinsker_bound(8.0);
  EXPECT_TRUE(c.clamped);
  EXPECT_EQ(c.value, 1.0);
  EXPECT_DOUBLE_EQ(c.raw, 2.0);
}

TEST(ErrorProbability, Examples) {
  EXPECT_EQ(error_probability(1.0), 0.0);
  EXPECT_EQ(error_probability(0.0), 0.5);
  const double bound = std::sqrt(200.0) * 0.01;
  EXPECT_NEAR(error_probability(bound), 0.5 * (1 - bound), 1e-15);
  EXPECT_THROW(error_probability(1.5), Error);
  EXPECT_THROW(error_probability(-0.1), Error);
}

TEST(SignScheme, MarginalOfTmsvAndEpr) {
  const double s = 2.0;
  const Eigen::Matrix2d c = sign_scheme_marginal(nonlocal_epr_measurement(1e-3), s);
  EXPECT_NEAR(c(0, 0), std::exp(-2 * s) + 1e-3, 1e-12);
  EXPECT_NEAR(c(1, 1), std::exp(-2 * s) + 1e-3, 1e-12);
  EXPECT_NEAR(c(0, 1), 0.0, 1e-12);
}

TEST(SignScheme, HeterodyneMatchesClosedFormAndNumericOracle) {
  const TVEstimate e = tv_sign_scheme(CovMatrix::identity(2), 0.0, 1.0);
  const double closed = std::pow(erfc_mean_closed_form(2.0, 1.0), 2);
  const double numeric = std::pow(erfc_mean_numeric(2.0, 1.0), 2);
  EXPECT_NEAR(closed, numeric, 1e-12);
  EXPECT_NEAR(e.value, closed, 1e-9);
  EXPECT_EQ(e.method, TvMethod::kQuadrature);
  EXPECT_LE(e.std_error, 1e-6);
}

TEST(SignScheme, IndependentMarginalsFactorize) {
  for (auto [a, b, sigma] : std::vector<std::tuple<double, double, double>>{
           {1e-4, 3.0, 1.0}, {5.0, 0.2, 0.7}, {1e3, 1e-6, 2.0}}) {
    Eigen::Matrix2d c;
    c << a, 0, 0, b;
    const double expect = erfc_mean_closed_form(a, sigma) * erfc_mean_closed_form(b, sigma);
    EXPECT_NEAR(tv_sign_marginal(c, sigma).value, expect, 1e-9);
  }
}

TEST(SignScheme, QuadratureAgreesWithMonteCarloOnHeterodyne) {
  const TVEstimate q = tv_sign_scheme(CovMatrix::identity(2), 0.0, 1.0);
  const TVEstimate mc = tv_monte_carlo_oracle(CovMatrix::identity(2), 0.0, 1.0, 400000, 3);
  EXPECT_LE(std::abs(q.value - mc.value), 3.0 * std::hypot(q.std_error, mc.std_error));
}

TEST(SignScheme, EprAtLargeSqueezingApproachesOne) {
  SignSchemeOptions o;
  const TVEstimate e = tv_sign_scheme(nonlocal_epr_measurement(1e-8), 5.0, 1.0, o);
  EXPECT_GE(e.value, 0.98);
}

TEST(SignScheme, IncreasesTowardOneWithSigma) {
  const CovMatrix v = local_homodyne_measurement(0.3, 0.9, 0.1);
  double prev = 0.0;
  for (double sigma : {0.1, 1.0, 10.0, 100.0, 1e4}) {
    const double cur = tv_sign_scheme(v, 1.0, sigma).value;
    EXPECT_GE(cur, prev);
    prev = cur;
  }
  EXPECT_GT(prev, 0.99);
}

TEST(SignScheme, ErrorsAndMethodDispatch) {
  EXPECT_THROW(tv_sign_scheme(CovMatrix(2, 0.01 * Matrix::Identity(4, 4)), 1.0, 1.0), Error);
  SignSchemeOptions o;
  o.method = TvMethod::kAnalytic;
  EXPECT_THROW(tv_sign_scheme(CovMatrix::identity(2), 1.0, 1.0, o), Error);
  o.method = TvMethod::kMonteCarlo;
  o.samples = 20000;
  const TVEstimate e = tv_sign_scheme(CovMatrix::identity(2), 0.0, 1.0, o);
  EXPECT_EQ(e.method, TvMethod::kMonteCarlo);
  EXPECT_EQ(e.n, 20000u);
  EXPECT_GT(e.std_error, 0.0);
}

TEST(MonteCarloOracle, ReproducibleAndWorkerIndependent) {
  const CovMatrix v = local_homodyne_measurement(0.1, 0.2, 0.3);
  const TVEstimate a = tv_monte_carlo_oracle(v, 1.0, 1.0, 150000, 9, 1);
  const TVEstimate b = tv_monte_carlo_oracle(v, 1.0, 1.0, 150000, 9, 4);
  const TVEstimate c = tv_monte_carlo_oracle(v, 1.0, 1.0, 150000, 10, 1);
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_NE(a.value, c.value);
  EXPECT_THROW(tv_monte_carlo_oracle(v, 1.0, 1.0, 999, 0), Error);
}

TEST(MultiCopyTv, Examples) {
  const std::vector<double> ones(7, 1.0);
  EXPECT_EQ(tv_multi_copy(ones), 1.0);
  EXPECT_LT(tv_multi_copy(0.91, 50), 0.01);
  EXPECT_NEAR(tv_multi_copy(0.5, 3), 0.125, 1e-16);
  const std::vector<double> mixed{0.5, 0.25, 1.0};
  EXPECT_EQ(tv_multi_copy(mixed), 0.125);
  EXPECT_THROW(tv_multi_copy(1.2, 2), Error);
  EXPECT_THROW(tv_multi_copy(0.5, 0), Error);
  const double f = tv_sign_scheme(nonlocal_epr_measurement(1e-8), 5.0, 1.0).value;
  EXPECT_GE(tv_multi_copy(f, 5), 0.90);
}

// ---- property tests ----------------------------------------------------------

TEST(Property, QuadratureAgreesWithMonteCarloOnRandomMeasurements) {
  CounterRng rng(31, 0);
  for (int i = 0; i < 20; ++i) {
    const CovMatrix v_pi = random_two_mode_covariance(rng);
    const double s = 2.0 * rng.uniform();
    const TVEstimate q = tv_sign_scheme(v_pi, s, 1.0);
    const TVEstimate mc = tv_monte_carlo_oracle(v_pi, s, 1.0, 100000, 100 + i);
    EXPECT_LE(std::abs(q.value - mc.value), 3.0 * std::hypot(q.std_error, mc.std_error))
        << "instance " << i << " q=" << q.value << " mc=" << mc.value;
  }
}

TEST(Property, MiInvariantUnderOrthogonalConjugation) {
  CounterRng rng(5, 0);
  for (int i = 0; i < 30; ++i) {
    const CovMatrix v = outcome_covariance(tmsv_cov(2.0 * rng.uniform()),
                                           random_two_mode_covariance(rng));
    const CovMatrix w = random_orthogonal_conjugate(v, rng);
    EXPECT_NEAR(mutual_information(w, 1.3), mutual_information(v, 1.3), 1e-10);
  }
}

TEST(Property, KlNonnegativeAndZeroOnlyForEqualInputs) {
  CounterRng rng(6, 0);
  for (int i = 0; i < 50; ++i) {
    const int d = 2 + i % 4;
    const Matrix a = random_spd(d, rng);
    const Matrix b = random_spd(d, rng);
    EXPECT_GT(gaussian_kl(a, b), 0.0);
    EXPECT_NEAR(gaussian_kl(a, a), 0.0, 1e-12);
  }
}

TEST(Property, PinskerDominatesMonteCarloTv) {
  CounterRng rng(8, 0);
  for (int i = 0; i < 50; ++i) {
    const int d = 1 + i % 4;
    const Matrix a = random_spd(d, rng);
    const Matrix b = a + 0.3 * rng.uniform() * random_spd(d, rng);
    const TVEstimate tv = tv_gaussian_monte_carlo(a, b, 20000, 500 + i);
    EXPECT_LE(tv.value, pinsker_bound(gaussian_kl(a, b)).raw + 3.0 * tv.std_error)
        << "instance " << i;
  }
}

TEST(Property, GaussianMonteCarloTvMatchesOneDimensionalClosedForm) {
  // N(0,1) vs N(0,4): densities cross at |x| = x0, TV = 2[Φ(x0) − Φ(x0/2)].
  const double x0 = std::sqrt(8.0 * std::log(2.0) / 3.0);
  auto phi = [](double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  const double expect = 2.0 * (phi(x0) - phi(x0 / 2.0));
  const TVEstimate tv = tv_gaussian_monte_carlo(Matrix::Identity(1, 1),
                                                4.0 * Matrix::Identity(1, 1), 200000, 1);
  EXPECT_NEAR(tv.value, expect, 4.0 * tv.std_error + 1e-4);
}

TEST(Property, TvNonincreasingInMarginalVariances) {
  const double sigma = 1.0;
  for (double rho : {0.0, 0.4, -0.7}) {
    for (double fixed : {1e-4, 0.3, 3.0}) {
      double prev_a = 2.0;
      double prev_b = 2.0;
      for (double var : {1e-6, 1e-3, 0.05, 0.5, 2.0, 20.0, 500.0}) {
        // Grow one variance while keeping the correlation coefficient.
        Eigen::Matrix2d ca;
        ca << var, rho * std::sqrt(var * fixed), rho * std::sqrt(var * fixed), fixed;
        Eigen::Matrix2d cb;
        cb << fixed, rho * std::sqrt(var * fixed), rho * std::sqrt(var * fixed), var;
        const double ta = tv_sign_marginal(ca, sigma).value;
        const double tb = tv_sign_marginal(cb, sigma).value;
        EXPECT_LE(ta, prev_a + 1e-9) << "rho=" << rho << " var=" << var;
        EXPECT_LE(tb, prev_b + 1e-9);
        prev_a = ta;
        prev_b = tb;
      }
    }
  }
}

TEST(Property, EprTvIncreasesWithSqueezing) {
  double prev = 0.0;
  for (double s : {1.0, 2.0, 3.0, 4.0, 5.0}) {
    const double cur = tv_sign_scheme(nonlocal_epr_measurement(1e-8), s, 1.0).value;
    EXPECT_GT(cur, prev) << "s=" << s;
    prev = cur;
  }
}

TEST(Property, PptMeasurementsNeverBeatEprAtLargeSqueezing) {
  CounterRng rng(12, 0);
  std::vector<CovMatrix> ppt{CovMatrix::identity(2)};
  for (double d : {1e-1, 1e-4, 1e-8}) {
    ppt.push_back(local_homodyne_measurement(0, 0, d));
    ppt.push_back(local_homodyne_measurement(kPi / 2, kPi / 2, d));
    ppt.push_back(local_homodyne_measurement(kPi / 4, 3 * kPi / 4, d));
  }
  while (ppt.size() < 40) {
    const CovMatrix v = random_two_mode_covariance(rng);
    if (is_ppt(v, kSplit).ppt) ppt.push_back(v);
  }
  for (double s : {3.0, 4.0, 5.0}) {
    const double epr = tv_sign_scheme(nonlocal_epr_measurement(1e-8), s, 1.0).value;
    for (const CovMatrix& v : ppt) EXPECT_LE(tv_sign_scheme(v, s, 1.0).value, epr);
  }
}

}  // namespace
}  // namespace cvhide
