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

#include "info_metrics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/owens_t.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "error.hpp"
#include "sampling.hpp"

namespace cvhide {
namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

Eigen::LLT<Matrix> checked_llt(const Matrix& m, const char* what) {
  Eigen::LLT<Matrix> llt(m);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kSingular, std::string(what) + " is not positive definite");
  }
  return llt;
}

double log_det(const Eigen::LLT<Matrix>& llt) {
  return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

void require_sigma(double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    fail(ErrorCode::kInvalidArgument, "sigma must be positive and finite");
  }
}

// E[erfc(|X|/√2σ)] for X ~ N(mu, v), via erfc(|x|/√2σ) = P(|σZ| > |x|) and
// the resulting bivariate-normal orthant: 4·T(mu/√(σ²+v), σ/√v).
double conditional_erfc_mean(double mu, double v, double sigma) {
  if (v <= 1e-300 || sigma / std::sqrt(v) > 1e12) {
    return std::erfc(std::abs(mu) / (kSqrt2 * sigma));
  }
  const double h = mu / std::sqrt(sigma * sigma + v);
  return 4.0 * boost::math::owens_t(h, sigma / std::sqrt(v));
}

unsigned resolve_workers(unsigned w) { return w == 0 ? default_workers() : w; }

}  // namespace

std::string to_string(TvMethod m) {
  switch (m) {
    case TvMethod::kAnalytic: return "analytic";
    case TvMethod::kQuadrature: return "quadrature";
    case TvMethod::kMonteCarlo: return "monte-carlo";
  }
  return "unknown";
}

nlohmann::json TVEstimate::to_json() const {
  return {{"value", value},
          {"std_error", std_error},
          {"method", to_string(method)},
          {"n", n}};
}

void PriorSpec::check(int dim) const {
  require_sigma(sigma);
  if (v_r) {
    if (v_r->rows() != dim || v_r->cols() != dim) {
      fail(ErrorCode::kDimensionMismatch, "prior covariance has wrong shape");
    }
    if ((*v_r - v_r->transpose()).cwiseAbs().maxCoeff() >
        1e-12 * std::max(1.0, v_r->cwiseAbs().maxCoeff())) {
      fail(ErrorCode::kInvalidArgument, "prior covariance is not symmetric");
    }
    checked_llt(*v_r, "prior covariance");
  }
}

CovMatrix outcome_covariance(const CovMatrix& v_rho, const CovMatrix& v_pi) {
  if (v_rho.dim() != v_pi.dim()) {
    fail(ErrorCode::kDimensionMismatch,
         "state and measurement covariances differ in dimension");
  }
  return CovMatrix(v_rho.n_modes(), v_rho.data() + v_pi.data());
}

double mutual_information(const CovMatrix& v, double sigma) {
  require_sigma(sigma);
  Eigen::SelfAdjointEigenSolver<Matrix> es(v.data(), Eigen::EigenvaluesOnly);
  const Vector& lambda = es.eigenvalues();
  if (lambda(0) <= effective_tolerance(0.0, lambda.cwiseAbs().maxCoeff())) {
    fail(ErrorCode::kSingular, "outcome covariance is singular");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    total += std::log1p(sigma * sigma / lambda(i));
  }
  return 0.5 * total;
}

double mutual_information(const CovMatrix& v, const PriorSpec& prior) {
  prior.check(v.dim());
  if (!prior.v_r) return mutual_information(v, prior.sigma);
  const auto llt_v = checked_llt(v.data(), "outcome covariance");
  const auto llt_sum = checked_llt(v.data() + *prior.v_r, "V + V_r");
  return 0.5 * (log_det(llt_sum) - log_det(llt_v));
}

Matrix projected_basis(double t1, double t2) {
  if (std::abs(t1 * t1 + t2 * t2 - 0.5) > 1e-9) {
    fail(ErrorCode::kInvalidArgument, "t1² + t2² must equal 1/2");
  }
  Matrix w(4, 4);
  w.col(0) << t1, t2, -t1, t2;
  w.col(1) << t1, t2, t1, -t2;
  w.col(2) << -t2, t1, t2, t1;
  w.col(3) << -t2, t1, -t2, -t1;
  return w;
}

double mutual_information_projected(const CovMatrix& v, double t1, double t2,
                                    double sigma) {
  require_sigma(sigma);
  if (v.dim() != 4) {
    fail(ErrorCode::kDimensionMismatch, "projected MI needs a 4x4 covariance");
  }
  const Vector w1 = projected_basis(t1, t2).col(0);
  const auto llt = checked_llt(v.data(), "outcome covariance");
  const double q = w1.dot(llt.solve(w1));
  return 0.5 * std::log1p(sigma * sigma * q);
}

double gaussian_kl(const Matrix& s1, const Matrix& s2, const Vector& mu1,
                   const Vector& mu2) {
  const auto m = s1.rows();
  if (s1.cols() != m || s2.rows() != m || s2.cols() != m || mu1.size() != m ||
      mu2.size() != m) {
    fail(ErrorCode::kDimensionMismatch, "KL arguments differ in dimension");
  }
  const auto llt1 = checked_llt(s1, "first covariance");
  const auto llt2 = checked_llt(s2, "second covariance");
  const Vector dmu = mu2 - mu1;
  const double trace = llt2.solve(s1).trace();
  const double quad = dmu.dot(llt2.solve(dmu));
  const double d =
      0.5 * (trace + quad - static_cast<double>(m) + log_det(llt2) - log_det(llt1));
  return std::max(0.0, d);
}

double gaussian_kl(const Matrix& s1, const Matrix& s2) {
  const Vector zero = Vector::Zero(s1.rows());
  return gaussian_kl(s1, s2, zero, zero);
}

PinskerBound pinsker_bound(double d_kl) {
  if (!(d_kl >= -1e-12)) {
    fail(ErrorCode::kInvalidArgument, "KL divergence must be nonnegative");
  }
  PinskerBound b;
  b.raw = std::sqrt(std::max(0.0, d_kl) / 2.0);
  b.clamped = b.raw > 1.0;
  b.value = std::min(b.raw, 1.0);
  return b;
}

double error_probability(double tv) {
  if (!(tv >= 0.0 && tv <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "total variation must lie in [0, 1]");
  }
  return 0.5 * (1.0 - tv);
}

Eigen::Matrix2d sign_scheme_marginal(const CovMatrix& v_pi, double s) {
  if (v_pi.dim() != 4) {
    fail(ErrorCode::kDimensionMismatch, "sign scheme needs a 4x4 measurement");
  }
  const Matrix u = epr_basis();
  const Matrix sigma_q = u * (tmsv_cov(s).data() + v_pi.data()) * u.transpose();
  Eigen::Matrix2d c;
  c << sigma_q(0, 0), sigma_q(0, 3), sigma_q(3, 0), sigma_q(3, 3);
  return c;
}

TVEstimate tv_sign_marginal(const Eigen::Matrix2d& c, double sigma,
                            double quadrature_tol) {
  require_sigma(sigma);
  const double a = c(0, 0);
  const double b = c(1, 1);
  const double cov = 0.5 * (c(0, 1) + c(1, 0));
  if (!(a > 0.0) || !(b > 0.0) || a * b - cov * cov < -1e-12 * a * b) {
    fail(ErrorCode::kSingular, "(Q1, Q4) covariance is not positive definite");
  }
  const double sqrt_a = std::sqrt(a);
  const double slope = cov / sqrt_a;  // E[Q4 | Q1 = √a t] = slope · t
  const double v = std::max(0.0, b - cov * cov / a);

  uint64_t evals = 0;
  // The integrand is even in Q1, so integrate t = Q1/√a over [0, ∞) and double.
  auto integrand = [&](double t) {
    ++evals;
    const double phi = std::exp(-0.5 * t * t) / std::sqrt(2.0 * std::numbers::pi);
    return std::erfc(sqrt_a * t / (kSqrt2 * sigma)) *
           conditional_erfc_mean(slope * t, v, sigma) * phi;
  };

  // Feature scales: the erfc factor (σ/√a), the conditional mean crossing σ
  // (σ/|slope|) and the Gaussian weight (1).
  double upper = 12.0;
  upper = std::min(upper, 9.0 * kSqrt2 * sigma / sqrt_a);
  double finest = std::min({1.0, sigma / sqrt_a,
                            slope != 0.0 ? sigma / std::abs(slope) : 1.0});
  finest = std::max(finest / 8.0, upper * 1e-12);

  using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;
  double total = 0.0;
  double err_total = 0.0;
  double lo = 0.0;
  double hi = std::min(finest, upper);
  while (lo < upper) {
    double err = 0.0;
    // Relative 1e-10: tighter targets sit on Boost's error-estimate noise floor and
    // recurse to full depth.
    total += Kronrod::integrate(integrand, lo, hi, 15, 1e-10, &err);
    err_total += err;
    lo = hi;
    hi = std::min(2.0 * hi, upper);
  }
  total *= 2.0;
  err_total *= 2.0;
  if (!(err_total <= quadrature_tol)) {
    fail(ErrorCode::kNoConvergence,
         "sign-scheme quadrature error estimate " + std::to_string(err_total) +
             " exceeds " + std::to_string(quadrature_tol));
  }
  TVEstimate out;
  out.value = std::clamp(total, 0.0, 1.0);
  out.std_error = err_total;
  out.method = TvMethod::kQuadrature;
  out.n = evals;
  return out;
}

TVEstimate tv_sign_scheme(const CovMatrix& v_pi, double s, double sigma,
                          const SignSchemeOptions& opts) {
  const BonaFideReport bf = is_bona_fide(v_pi, opts.feasibility_tol);
  if (!bf.ok) {
    fail(ErrorCode::kNotBonaFide,
         "measurement covariance is not bona fide (min eig of V+iΩ = " +
             std::to_string(bf.min_eig_v_plus_iomega) + ")");
  }
  switch (opts.method) {
    case TvMethod::kMonteCarlo:
      return tv_monte_carlo_oracle(v_pi, s, sigma, opts.samples, opts.seed,
                                   opts.workers);
    case TvMethod::kQuadrature:
      return tv_sign_marginal(sign_scheme_marginal(v_pi, s), sigma,
                              opts.quadrature_tol);
    case TvMethod::kAnalytic:
      break;
  }
  fail(ErrorCode::kInvalidArgument,
       "sign-scheme TV has no analytic method; use quadrature or monte-carlo");
}

TVEstimate tv_monte_carlo_oracle(const CovMatrix& v_pi, double s, double sigma,
                                 uint64_t n_samples, uint64_t seed,
                                 unsigned workers) {
  require_sigma(sigma);
  if (n_samples < 1000) {
    fail(ErrorCode::kInvalidArgument, "Monte Carlo needs at least 1000 samples");
  }
  if (v_pi.dim() != 4) {
    fail(ErrorCode::kDimensionMismatch, "sign scheme needs a 4x4 measurement");
  }
  const Matrix u = epr_basis();
  const Matrix sigma_q = u * (tmsv_cov(s).data() + v_pi.data()) * u.transpose();
  const Eigen::Matrix4d l = checked_llt(sigma_q, "outcome covariance").matrixL()
                                .toDenseMatrix();
  const double scale = 1.0 / (kSqrt2 * sigma);

  struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  const auto chunks = map_chunks<Moments>(
      n_samples, 1 << 16, resolve_workers(workers),
      [&](uint64_t begin, uint64_t end) {
        Moments m;
        for (uint64_t i = begin; i < end; ++i) {
          CounterRng rng(seed, i);
          Eigen::Vector4d z;
          for (int k = 0; k < 4; ++k) z(k) = rng.normal();
          const Eigen::Vector4d q = l * z;
          const double f =
              std::erfc(std::abs(q(0)) * scale) * std::erfc(std::abs(q(3)) * scale);
          m.sum += f;
          m.sum_sq += f * f;
        }
        return m;
      });
  Moments total;
  for (const auto& c : chunks) {
    total.sum += c.sum;
    total.sum_sq += c.sum_sq;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = total.sum / n;
  const double var = std::max(0.0, total.sum_sq / n - mean * mean);
  return {mean, std::sqrt(var / (n - 1.0)), TvMethod::kMonteCarlo, n_samples};
}

double tv_multi_copy(std::span<const double> per_copy_factors) {
  double p = 1.0;
  for (double f : per_copy_factors) {
    if (!(f >= 0.0 && f <= 1.0)) {
      fail(ErrorCode::kInvalidArgument, "per-copy factors must lie in [0, 1]");
    }
    p *= f;
  }
  return p;
}

double tv_multi_copy(double factor, int n_copies) {
  if (!(factor >= 0.0 && factor <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "per-copy factor must lie in [0, 1]");
  }
  if (n_copies < 1) fail(ErrorCode::kInvalidArgument, "n_copies must be >= 1");
  return std::pow(factor, n_copies);
}

TVEstimate tv_gaussian_monte_carlo(const Matrix& s1, const Matrix& s2,
                                   uint64_t n_samples, uint64_t seed,
                                   unsigned workers) {
  const auto d = s1.rows();
  if (s1.cols() != d || s2.rows() != d || s2.cols() != d) {
    fail(ErrorCode::kDimensionMismatch, "TV arguments differ in dimension");
  }
  if (n_samples < 1000) {
    fail(ErrorCode::kInvalidArgument, "Monte Carlo needs at least 1000 samples");
  }
  const bool diagonal = s1.isDiagonal(0.0) && s2.isDiagonal(0.0);
  const auto llt1 = checked_llt(s1, "first covariance");
  const auto llt2 = checked_llt(s2, "second covariance");
  const Matrix l1 = llt1.matrixL().toDenseMatrix();
  const Matrix l2 = llt2.matrixL().toDenseMatrix();
  const double half_log_ratio = 0.5 * (log_det(llt2) - log_det(llt1));
  const Vector inv1 = s1.diagonal().cwiseInverse();
  const Vector inv2 = s2.diagonal().cwiseInverse();

  struct Moments {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  const auto chunks = map_chunks<Moments>(
      n_samples, 1 << 12, resolve_workers(workers),
      [&](uint64_t begin, uint64_t end) {
        Moments m;
        Vector z(d);
        Vector x(d);
        for (uint64_t i = begin; i < end; ++i) {
          CounterRng rng(seed, i);
          for (Eigen::Index k = 0; k < d; ++k) z(k) = rng.normal();
          // Alternate mixture components for a stratified draw.
          const bool first = (i % 2) == 0;
          double q1;
          double q2;
          if (diagonal) {
            x = (first ? s1 : s2).diagonal().cwiseSqrt().cwiseProduct(z);
            q1 = x.cwiseAbs2().dot(inv1);
            q2 = x.cwiseAbs2().dot(inv2);
          } else {
            x.noalias() = (first ? l1 : l2) * z;
            q1 = l1.triangularView<Eigen::Lower>().solve(x).squaredNorm();
            q2 = l2.triangularView<Eigen::Lower>().solve(x).squaredNorm();
          }
          // log p1 - log p2
          const double llr = -0.5 * (q1 - q2) + half_log_ratio;
          const double f = std::abs(std::tanh(0.5 * llr));
          m.sum += f;
          m.sum_sq += f * f;
        }
        return m;
      });
  Moments total;
  for (const auto& c : chunks) {
    total.sum += c.sum;
    total.sum_sq += c.sum_sq;
  }
  const double n = static_cast<double>(n_samples);
  const double mean = total.sum / n;
  const double var = std::max(0.0, total.sum_sq / n - mean * mean);
  return {mean, std::sqrt(var / (n - 1.0)), TvMethod::kMonteCarlo, n_samples};
}

}  // namespace cvhide
