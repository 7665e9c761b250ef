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

#include "nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cvhide {
namespace {

double sanitize(double v) {
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

NelderMeadResult nelder_mead(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& x0, const NelderMeadOptions& opts) {
  const auto n = x0.size();
  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / dn;
  const double gamma = 0.75 - 1.0 / (2.0 * dn);
  const double shrink = 1.0 - 1.0 / dn;

  NelderMeadResult out;
  out.x = x0;
  out.value = sanitize(f(x0));

  std::vector<Eigen::VectorXd> pts(n + 1);
  std::vector<double> vals(n + 1);
  std::vector<int> order(n + 1);
  int iter = 0;

  for (int rebuild = 0; rebuild <= opts.max_rebuilds && iter < opts.max_iters;
       ++rebuild) {
    const double start_value = out.value;
    pts[0] = out.x;
    vals[0] = out.value;
    for (Eigen::Index i = 0; i < n; ++i) {
      pts[i + 1] = out.x;
      pts[i + 1](i) += opts.initial_step * std::max(1.0, std::abs(out.x(i)));
      vals[i + 1] = sanitize(f(pts[i + 1]));
    }

    while (iter < opts.max_iters) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int a, int b) { return vals[a] < vals[b]; });
      const int best = order.front();
      const int worst = order.back();
      const int second = order[n - 1];

      if (vals[best] < out.value) {
        out.value = vals[best];
        out.x = pts[best];
      }
      if (opts.trace_every > 0 && iter % opts.trace_every == 0) {
        out.trace.emplace_back(iter, out.value);
      }

      double diameter = 0.0;
      for (const auto& p : pts) {
        diameter = std::max(diameter, (p - pts[best]).lpNorm<Eigen::Infinity>());
      }
      const double spread = vals[worst] - vals[best];
      if ((std::isfinite(spread) && spread <= opts.f_tol && diameter <= 1e3 * opts.x_tol) ||
          diameter <= opts.x_tol) {
        break;
      }
      ++iter;

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
      for (Eigen::Index i = 0; i <= n; ++i) {
        if (i != worst) centroid += pts[i];
      }
      centroid /= dn;

      const Eigen::VectorXd xr = centroid + alpha * (centroid - pts[worst]);
      const double fr = sanitize(f(xr));
      if (fr < vals[best]) {
        const Eigen::VectorXd xe = centroid + beta * (xr - centroid);
        const double fe = sanitize(f(xe));
        if (fe < fr) {
          pts[worst] = xe;
          vals[worst] = fe;
        } else {
          pts[worst] = xr;
          vals[worst] = fr;
        }
        continue;
      }
      if (fr < vals[second]) {
        pts[worst] = xr;
        vals[worst] = fr;
        continue;
      }
      const bool outside = fr < vals[worst];
      const Eigen::VectorXd xc =
          outside ? Eigen::VectorXd(centroid + gamma * (xr - centroid))
                  : Eigen::VectorXd(centroid + gamma * (pts[worst] - centroid));
      const double fc = sanitize(f(xc));
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
        continue;
      }
      for (Eigen::Index i = 0; i <= n; ++i) {
        if (i == best) continue;
        pts[i] = pts[best] + shrink * (pts[i] - pts[best]);
        vals[i] = sanitize(f(pts[i]));
      }
    }

    for (Eigen::Index i = 0; i <= n; ++i) {
      if (vals[i] < out.value) {
        out.value = vals[i];
        out.x = pts[i];
      }
    }
    // A rebuild that gained nothing means the incumbent is a genuine stall.
    if (rebuild > 0 && !(out.value < start_value - opts.f_tol)) break;
  }
  out.iterations = iter;
  out.trace.emplace_back(iter, out.value);
  return out;
}

}  // namespace cvhide
