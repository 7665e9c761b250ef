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

// Self-check suite: feasibility predicates, oracle agreements and the bound
// chains, each reported with its margin.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gauss_core.hpp"
#include "sampling.hpp"

namespace cvhide {

struct CheckResult {
  std::string name;
  bool passed = false;
  double margin = 0.0;  // >= 0 when passing, for every check
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool all_passed() const;
};

ValidationReport run_validation(double tol = kDefaultTol, uint64_t seed = 0);

// S diag(ν, ν, μ, μ) Sᵀ with S a random two-mode symplectic (passive ·
// squeezing · passive) and ν, μ ≥ 1.
CovMatrix random_two_mode_covariance(CounterRng& rng);

}  // namespace cvhide
