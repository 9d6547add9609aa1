// Copyright 2026 The QViT Authors.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
/**
 * @file
 * Circuit identity suite: the invariants tying the unary fast path, the
 * dense reference simulator, loaders, pyramid layers and the attention
 * circuit together. Also the random generators the suite draws from.
 */
#pragma once

#include "qvit/linalg.hpp"
#include "qvit/qsim.hpp"
#include "qvit/random.hpp"

#include <string>
#include <vector>

namespace qvit::verify {

/// Random circuit of RBS gates on arbitrary distinct qubit pairs.
[[nodiscard]] qsim::Circuit random_rbs_circuit(int n, int depth, Rng &rng);
/// Uniform on the unit sphere in R^n.
[[nodiscard]] std::vector<double> random_unit_vector(int n, Rng &rng);
/// Haar-distributed orthogonal matrix with determinant +1.
[[nodiscard]] Matrix random_special_orthogonal(int n, Rng &rng);

struct CheckResult {
    std::string name;
    bool passed = false;
    double max_error = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 2024;
    /// Scales the number of random trials; 1.0 is the full suite.
    double effort = 1.0;
    /// Negates every RBS angle on the unary fast path, which the suite
    /// must detect.
    bool inject_sign_fault = false;
};

[[nodiscard]] std::vector<CheckResult> run_suite(const VerifyOptions &opts = {});
[[nodiscard]] bool all_passed(const std::vector<CheckResult> &results);

} // namespace qvit::verify
