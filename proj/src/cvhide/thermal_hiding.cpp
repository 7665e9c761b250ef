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

#include "thermal_hiding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "error.hpp"
#include "sampling.hpp"

namespace cvhide {
namespace {

double log_choose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// count · log(p) with 0 · log 0 = 0.
double xlogp(int count, double p) {
  if (count == 0) return 0.0;
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  return count * std::log(p);
}

void require_eps(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) {
    fail(ErrorCode::kInvalidArgument, "eps must lie in (0, 1]");
  }
}

void require_copies(int n_copies) {
  if (n_copies < 1) fail(ErrorCode::kInvalidArgument, "N must be >= 1");
}

// +1 on the components that gain variance 2ε under ρ₊ (Y2, Y4), −1 otherwise.
double d_sign(Eigen::Index index, int n_copies) {
  const Eigen::Index component = index / n_copies;
  return (component == 1 || component == 3) ? 1.0 : -1.0;
}

void require_rotated_dim(const Matrix& m, int n_copies) {
  require_copies(n_copies);
  const Eigen::Index d = 4 * static_cast<Eigen::Index>(n_copies);
  if (m.rows() != d || m.cols() != d) {
    fail(ErrorCode::kDimensionMismatch,
         "measurement covariance must be " + std::to_string(d) + "x" +
             std::to_string(d) + " for N=" + std::to_string(n_copies));
  }
}

}  // namespace

void ThermalParams::check() const {
  require_eps(eps);
  if (!(g >= 0.0 && g <= 1.0)) fail(ErrorCode::kInvalidArgument, "g must lie in [0, 1]");
  if (!std::isfinite(theta)) fail(ErrorCode::kInvalidArgument, "theta must be finite");
  require_copies(n_copies);
}

FockBlock fock_expansion(const ThermalParams& p) {
  p.check();
  const std::complex<double> off = p.g * std::polar(1.0, p.theta);
  FockBlock b;
  b.p_vac = 1.0 - p.eps;
  b.coherence_block << 1.0, off, std::conj(off), 1.0;
  b.coherence_block *= 0.5 * p.eps;
  return b;
}

PovmProbs povm_probs(const ThermalParams& p) {
  p.check();
  const double c = p.g * std::cos(p.theta);
  return {1.0 - p.eps, 0.5 * p.eps * (1.0 + c), 0.5 * p.eps * (1.0 - c)};
}

double counts_log_prob(const CountsOutcome& o, const ThermalParams& p) {
  const PovmProbs pr = povm_probs(p);
  const int n = p.n_copies;
  if (o.k < 0 || o.k > n || o.m < 0 || o.m > n - o.k) {
    fail(ErrorCode::kInvalidArgument,
         "invalid outcome (k=" + std::to_string(o.k) + ", m=" + std::to_string(o.m) +
             ") for N=" + std::to_string(n));
  }
  const int rest = n - o.k - o.m;
  return log_choose(n, o.k) + log_choose(n - o.k, o.m) + xlogp(o.k, pr.vac) +
         xlogp(o.m, pr.plus) + xlogp(rest, pr.minus);
}

double counts_prob(const CountsOutcome& o, const ThermalParams& p) {
  return std::exp(counts_log_prob(o, p));
}

double tv_counts_exact(const ThermalParams& p) {
  p.check();
  ThermalParams plus = p;
  plus.theta = 0.0;
  ThermalParams minus = p;
  minus.theta = std::numbers::pi;
  double total = 0.0;
  for (int k = 0; k <= p.n_copies; ++k) {
    for (int m = 0; m <= p.n_copies - k; ++m) {
      total += std::abs(counts_prob({k, m}, plus) - counts_prob({k, m}, minus));
    }
  }
  return 0.5 * total;
}

double tv_nongaussian(int n_copies, double eps) {
  require_copies(n_copies);
  if (!(eps > 0.0 && eps < 1.0)) {
    fail(ErrorCode::kInvalidArgument, "eps must lie in (0, 1)");
  }
  return -std::expm1(n_copies * std::log1p(-eps));
}

std::vector<CountsOutcome> sample_counts(const ThermalParams& p, int sign,
                                         uint64_t n_trials, uint64_t seed) {
  if (sign != 1 && sign != -1) fail(ErrorCode::kInvalidArgument, "sign must be +1 or -1");
  ThermalParams q = p;
  q.theta = sign > 0 ? 0.0 : std::numbers::pi;
  const PovmProbs pr = povm_probs(q);
  std::vector<CountsOutcome> out(n_trials);
  const uint64_t stream_offset = sign > 0 ? 0 : 1;
  for (uint64_t t = 0; t < n_trials; ++t) {
    CounterRng rng(seed, 2 * t + stream_offset);
    CountsOutcome o;
    for (int c = 0; c < q.n_copies; ++c) {
      const double u = rng.uniform();
      if (u < pr.vac) {
        ++o.k;
      } else if (u < pr.vac + pr.plus) {
        ++o.m;
      }
    }
    out[t] = o;
  }
  return out;
}

TVEstimate simulate_povm(const ThermalParams& p, uint64_t n_trials,
                         uint64_t seed) {
  p.check();
  if (n_trials < 1000) {
    fail(ErrorCode::kInvalidArgument, "simulate_povm needs at least 1000 trials");
  }
  double ok_rate[2] = {0.0, 0.0};
  for (int which = 0; which < 2; ++which) {
    const int sign = which == 0 ? 1 : -1;
    const auto outcomes = sample_counts(p, sign, n_trials, seed);
    uint64_t ok = 0;
    for (uint64_t t = 0; t < n_trials; ++t) {
      const int plus = outcomes[t].m;
      const int minus = p.n_copies - outcomes[t].k - outcomes[t].m;
      int guess;
      if (plus != minus) {
        guess = plus > minus ? 1 : -1;
      } else {
        CounterRng coin(seed ^ 0xc0fec0fec0feULL, 2 * t + which);
        guess = coin.uniform() < 0.5 ? 1 : -1;
      }
      ok += guess == sign;
    }
    ok_rate[which] = static_cast<double>(ok) / static_cast<double>(n_trials);
  }
  const double n = static_cast<double>(n_trials);
  TVEstimate e;
  e.value = std::clamp(ok_rate[0] + ok_rate[1] - 1.0, 0.0, 1.0);
  e.std_error = std::sqrt(ok_rate[0] * (1.0 - ok_rate[0]) / n +
                          ok_rate[1] * (1.0 - ok_rate[1]) / n);
  e.method = TvMethod::kMonteCarlo;
  e.n = 2 * n_trials;
  return e;
}

Matrix rotated_thermal_cov(double eps, int sign, int n_copies) {
  require_copies(n_copies);
  if (sign != 1 && sign != -1) fail(ErrorCode::kInvalidArgument, "sign must be +1 or -1");
  const Matrix block = epr_basis() * thermal_pair_cov(eps, sign).data() *
                       epr_basis().transpose();
  Vector diag(4 * n_copies);
  for (int c = 0; c < 4; ++c) {
    diag.segment(static_cast<Eigen::Index>(c) * n_copies, n_copies).setConstant(block(c, c));
  }
  return diag.asDiagonal();
}

Matrix rotate_measurement(const CovMatrix& v_pi, int n_copies) {
  require_copies(n_copies);
  if (v_pi.dim() != 4 * n_copies) {
    fail(ErrorCode::kDimensionMismatch,
         "measurement covariance does not match N two-mode copies");
  }
  const Matrix u = epr_basis();
  const Eigen::Index d = 4 * static_cast<Eigen::Index>(n_copies);
  Matrix r = Matrix::Zero(d, d);
  for (int i = 0; i < n_copies; ++i) {
    for (int c = 0; c < 4; ++c) {
      for (int j = 0; j < 4; ++j) r(c * n_copies + i, 4 * i + j) = u(c, j);
    }
  }
  return r * v_pi.data() * r.transpose();
}

Matrix rotated_block_measurement(const Eigen::Vector4d& block_diagonal,
                                 int n_copies) {
  require_copies(n_copies);
  Vector diag(4 * n_copies);
  for (int c = 0; c < 4; ++c) {
    diag.segment(static_cast<Eigen::Index>(c) * n_copies, n_copies)
        .setConstant(block_diagonal(c));
  }
  return diag.asDiagonal();
}

double kl_quadratic_diagonal(const Vector& sigma_pi_diag, int n_copies,
                             double eps) {
  require_copies(n_copies);
  if (sigma_pi_diag.size() != 4 * static_cast<Eigen::Index>(n_copies)) {
    fail(ErrorCode::kDimensionMismatch, "diagonal length must be 4N");
  }
  if ((sigma_pi_diag.array() < 0.0).any()) {
    fail(ErrorCode::kInvalidArgument, "Σ_Π must be positive semidefinite");
  }
  const double trace = 4.0 * (1.0 + sigma_pi_diag.array()).inverse().square().sum();
  return 0.25 * eps * eps * trace;
}

double kl_quadratic(const Matrix& sigma_pi, int n_copies, double eps) {
  require_rotated_dim(sigma_pi, n_copies);
  if (sigma_pi.isDiagonal(0.0)) {
    return kl_quadratic_diagonal(sigma_pi.diagonal(), n_copies, eps);
  }
  const Eigen::Index d = sigma_pi.rows();
  Eigen::LLT<Matrix> llt(Matrix::Identity(d, d) + sigma_pi);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kInvalidArgument, "I + Σ_Π is not positive definite");
  }
  const Matrix a_inv = llt.solve(Matrix::Identity(d, d));
  // tr(A⁻¹DA⁻¹D) with D = 2·diag(d_sign).
  double trace = 0.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    for (Eigen::Index j = 0; j < d; ++j) {
      trace += 4.0 * d_sign(j, n_copies) * d_sign(k, n_copies) * a_inv(j, k) * a_inv(j, k);
    }
  }
  return 0.25 * eps * eps * trace;
}

KlComparison kl_exact_vs_quadratic(const Matrix& sigma_pi, int n_copies,
                                   double eps) {
  require_rotated_dim(sigma_pi, n_copies);
  if (!(eps >= 0.0)) fail(ErrorCode::kInvalidArgument, "eps must be >= 0");
  KlComparison out;
  out.quadratic = kl_quadratic(sigma_pi, n_copies, eps);
  const Matrix s1 = rotated_thermal_cov(eps, 1, n_copies) + sigma_pi;
  const Matrix s2 = rotated_thermal_cov(eps, -1, n_copies) + sigma_pi;
  if (sigma_pi.isDiagonal(0.0)) {
    // Σ_j (x_j − log1p(x_j))/2 with x_j = s1_j/s2_j − 1, free of cancellation.
    double total = 0.0;
    for (Eigen::Index j = 0; j < s1.rows(); ++j) {
      const double x = (s1(j, j) - s2(j, j)) / s2(j, j);
      total += x - std::log1p(x);
    }
    out.exact = 0.5 * total;
  } else {
    out.exact = gaussian_kl(s1, s2);
  }
  out.residual = out.exact - out.quadratic;
  return out;
}

double kl_upper_bound(int n_copies, double eps) {
  require_copies(n_copies);
  return 4.0 * n_copies * eps * eps;
}

double tv_upper_bound(int n_copies, double eps) {
  require_copies(n_copies);
  return std::sqrt(2.0 * n_copies) * eps;
}

TVEstimate tv_gaussian_measurement(const Matrix& sigma_pi, int n_copies,
                                   double eps, uint64_t n_samples,
                                   uint64_t seed, unsigned workers) {
  require_rotated_dim(sigma_pi, n_copies);
  return tv_gaussian_monte_carlo(rotated_thermal_cov(eps, 1, n_copies) + sigma_pi,
                                 rotated_thermal_cov(eps, -1, n_copies) + sigma_pi,
                                 n_samples, seed, workers);
}

}  // namespace cvhide
