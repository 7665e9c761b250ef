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

#include "validate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "error.hpp"
#include "info_metrics.hpp"
#include "thermal_hiding.hpp"

namespace cvhide {
namespace {

constexpr double kEps = 2.220446049250313e-16;

class Collector {
 public:
  void add(std::string name, bool passed, double margin, std::string detail = {}) {
    report_.checks.push_back({std::move(name), passed, margin, std::move(detail)});
  }

  // Runs fn and records a failed check if it throws.
  template <typename Fn>
  void guarded(const std::string& name, Fn fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      add(name, false, -1.0, std::string("threw: ") + e.what());
    }
  }

  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

}  // namespace

bool ValidationReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.passed; });
}

CovMatrix random_two_mode_covariance(CounterRng& rng) {
  const double r1 = 1.5 * (rng.uniform() - 0.5);
  const double r2 = 1.5 * (rng.uniform() - 0.5);
  const Eigen::Vector4d squeeze(std::exp(r1), std::exp(-r1), std::exp(r2),
                                std::exp(-r2));
  const Matrix s = passive_symplectic(random_unitary(rng)) * squeeze.asDiagonal() *
                   passive_symplectic(random_unitary(rng));
  const double nu = 1.0 + 2.0 * rng.uniform();
  const double mu = 1.0 + 2.0 * rng.uniform();
  const Eigen::Vector4d williamson(nu, nu, mu, mu);
  const Matrix v = s * williamson.asDiagonal() * s.transpose();
  return CovMatrix(2, 0.5 * (v + v.transpose()));
}

ValidationReport run_validation(double tol, uint64_t seed) {
  Collector out;
  const ModePartition split = ModePartition::split(2, 1);

  out.guarded("constructors are bona fide", [&] {
    const std::vector<std::pair<std::string, CovMatrix>> cases = {
        {"I4", CovMatrix::identity(2)},
        {"tmsv(1)", tmsv_cov(1.0)},
        {"tmsv(3)", tmsv_cov(3.0)},
        {"epr(1e-2)", nonlocal_epr_measurement(1e-2)},
        {"epr(1e-4)", nonlocal_epr_measurement(1e-4)},
        {"homodyne(1e-4)", local_homodyne_measurement(0.0, 0.0, 1e-4)},
        {"thermal+(0.01)", thermal_pair_cov(0.01, 1)},
        {"thermal-(0.01)", thermal_pair_cov(0.01, -1)},
    };
    bool ok = true;
    double margin = 1e300;
    std::string worst;
    for (const auto& [name, v] : cases) {
      const BonaFideReport r = is_bona_fide(v, tol);
      ok = ok && r.ok;
      const double m = r.min_eig_v_plus_iomega + r.threshold;
      if (m < margin) {
        margin = m;
        worst = name;
      }
    }
    out.add("constructors are bona fide", ok, margin, "tightest: " + worst);
  });

  out.guarded("unphysical saturator rejected", [&] {
    const CovMatrix sat(2, std::exp(-6.0) * Matrix::Identity(4, 4));
    const BonaFideReport r = is_bona_fide(sat, tol);
    out.add("unphysical saturator rejected", !r.ok, -r.min_eig_v_plus_iomega,
            "min eig of V+iΩ = " + fmt(r.min_eig_v_plus_iomega));
  });

  out.guarded("EPR measurement violates PPT", [&] {
    const PptReport r = is_ppt(nonlocal_epr_measurement(1e-4), split, tol);
    out.add("EPR measurement violates PPT", !r.ppt, -r.min_eig,
            "PPT margin = " + fmt(r.min_eig));
  });

  out.guarded("heterodyne and thermal pair are PPT", [&] {
    double margin = 1e300;
    bool ok = true;
    for (const CovMatrix& v : {CovMatrix::identity(2), thermal_pair_cov(0.01, 1),
                               thermal_pair_cov(0.01, -1)}) {
      const PptReport r = is_ppt(v, split, tol);
      ok = ok && r.ppt;
      margin = std::min(margin, r.min_eig + tol);
    }
    out.add("heterodyne and thermal pair are PPT", ok, margin);
  });

  out.guarded("PPT verdict: eigensolve vs symplectic", [&] {
    int agree = 0;
    int entangled = 0;
    const int n = 100;
    for (int i = 0; i < n; ++i) {
      CounterRng rng(seed, 1000 + i);
      const CovMatrix v = random_two_mode_covariance(rng);
      const bool a = is_ppt(v, split, tol).ppt;
      const bool b = is_ppt_symplectic(v, split, tol).ppt;
      agree += a == b;
      entangled += !a;
    }
    out.add("PPT verdict: eigensolve vs symplectic", agree == n, agree - n,
            std::to_string(agree) + "/" + std::to_string(n) + " agree, " +
                std::to_string(entangled) + " NPT");
  });

  out.guarded("partial transpose is an involution", [&] {
    const CovMatrix v = tmsv_cov(0.75);
    const CovMatrix back = partial_transpose(partial_transpose(v, split), split);
    const double diff = (back.data() - v.data()).cwiseAbs().maxCoeff();
    out.add("partial transpose is an involution", diff == 0.0, -diff);
  });

  out.guarded("TMSV spectrum projectors", [&] {
    const double s = 2.0;
    const EigSpectrum analytic = tmsv_spectrum(s);
    const EigSpectrum numeric = spectrum(tmsv_cov(s));
    const Matrix pa = analytic.eigenvectors.leftCols(2) *
                      analytic.eigenvectors.leftCols(2).transpose();
    const Matrix pn = numeric.eigenvectors.leftCols(2) *
                      numeric.eigenvectors.leftCols(2).transpose();
    const double diff = (pa - pn).cwiseAbs().maxCoeff();
    out.add("TMSV spectrum projectors", diff <= 1e-9, 1e-9 - diff);
  });

  out.guarded("EPR measurement is pure", [&] {
    // Rounding the stored entries alone moves ν by O(ε κ), κ = 1/δ².
    double worst = 0.0;
    for (double delta : {1e-1, 1e-2, 1e-4, 1e-6}) {
      const Vector nu = symplectic_eigenvalues(nonlocal_epr_measurement(delta));
      const double allowed = 1e-9 + 64.0 * kEps / (delta * delta);
      worst = std::max(worst, (nu.array() - 1.0).abs().maxCoeff() / allowed);
    }
    out.add("EPR measurement is pure", worst <= 1.0, 1.0 - worst,
            "worst |ν − 1| / allowance = " + fmt(worst));
  });

  out.guarded("MI invariant under orthogonal conjugation", [&] {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      CounterRng rng(seed, 2000 + i);
      const CovMatrix v = random_two_mode_covariance(rng);
      Matrix g(4, 4);
      for (int k = 0; k < 16; ++k) g(k / 4, k % 4) = rng.normal();
      const Matrix o = Eigen::HouseholderQR<Matrix>(g).householderQ();
      const Matrix rotated = o * v.data() * o.transpose();
      const CovMatrix w(2, 0.5 * (rotated + rotated.transpose()));
      worst = std::max(worst, std::abs(mutual_information(w, 1.0) -
                                       mutual_information(v, 1.0)));
    }
    out.add("MI invariant under orthogonal conjugation", worst <= 1e-10,
            1e-10 - worst);
  });

  out.guarded("Gaussian KL nonnegative", [&] {
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      CounterRng rng(seed, 3000 + i);
      const CovMatrix a = random_two_mode_covariance(rng);
      const CovMatrix b = random_two_mode_covariance(rng);
      worst = std::min(worst, gaussian_kl(a.data(), b.data()));
    }
    out.add("Gaussian KL nonnegative", worst >= 0.0, worst);
  });

  out.guarded("sign-scheme quadrature vs Monte Carlo", [&] {
    const TVEstimate q = tv_sign_scheme(CovMatrix::identity(2), 0.0, 1.0);
    const TVEstimate mc = tv_monte_carlo_oracle(CovMatrix::identity(2), 0.0, 1.0,
                                                200'000, seed);
    const double gap = std::abs(q.value - mc.value);
    const double allowed = 3.0 * std::hypot(mc.std_error, q.std_error);
    out.add("sign-scheme quadrature vs Monte Carlo", gap <= allowed, allowed - gap,
            "quadrature " + fmt(q.value) + ", MC " + fmt(mc.value) + " ± " +
                fmt(mc.std_error));
  });

  out.guarded("counts distribution normalized", [&] {
    ThermalParams p{0.05, 1.0, std::numbers::pi / 3.0, 200};
    double total = 0.0;
    for (int k = 0; k <= p.n_copies; ++k) {
      for (int m = 0; m <= p.n_copies - k; ++m) total += counts_prob({k, m}, p);
    }
    const double err = std::abs(total - 1.0);
    out.add("counts distribution normalized", err <= 1e-10, 1e-10 - err);
  });

  out.guarded("KL bound chain", [&] {
    double worst = 1e300;
    for (int i = 0; i < 20; ++i) {
      CounterRng rng(seed, 4000 + i);
      const int n = 1 + static_cast<int>(rng.uniform() * 4);
      Matrix g(4 * n, 4 * n);
      for (Eigen::Index k = 0; k < g.size(); ++k) g.data()[k] = rng.normal();
      const Matrix sigma_pi = g * g.transpose() * rng.uniform();
      const double q = kl_quadratic(sigma_pi, n, 0.01);
      worst = std::min(worst, kl_upper_bound(n, 0.01) + 1e-12 - q);
    }
    out.add("KL bound chain", worst >= 0.0, worst);
  });

  out.guarded("thermal separation witness", [&] {
    const double ng = tv_nongaussian(100, 0.01);
    const double bound = tv_upper_bound(100, 0.01);
    out.add("thermal separation witness", ng > bound, ng - bound,
            "non-Gaussian " + fmt(ng) + " vs Gaussian bound " + fmt(bound));
  });

  return out.take();
}

}  // namespace cvhide
