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

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace cvhide {

struct NelderMeadOptions {
  int max_iters = 4000;
  double f_tol = 1e-12;     // stop when the simplex value spread falls below
  double x_tol = 1e-10;     // ... and the simplex diameter falls below
  int max_rebuilds = 4;     // fresh simplices around the incumbent after a stall
  double initial_step = 0.25;  // relative to max(1, |x_i|)
  int trace_every = 50;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  std::vector<std::pair<int, double>> trace;  // (iteration, best value)
};

// Minimizes f with the adaptive-coefficient Nelder–Mead simplex method.
// Non-finite values are treated as +inf.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0,
                             const NelderMeadOptions& opts = {});

}  // namespace cvhide
