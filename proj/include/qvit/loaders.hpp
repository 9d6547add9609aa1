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
 * Unary amplitude-encoding loaders: X on qubit 0 followed by a cascade of
 * n-1 adjacent RBS gates whose angles follow the recursive arccos rule.
 */
#pragma once

#include "qvit/qsim.hpp"

#include <span>
#include <vector>

namespace qvit::loaders {

/// Tolerance on |‖x‖ - 1| accepted by compute_loader_angles.
inline constexpr double kUnitTolerance = 1e-9;

/// Once the running product of sines falls below this, the remaining
/// amplitudes are numerically zero and their angles are pinned to 0.
inline constexpr double kDegenerateProduct = 1e-12;

struct LoaderProgram {
    std::vector<double> angles; ///< α_0 .. α_{n-2}, each in [0, π]
    /// The loader encodes sign * x. The arccos recursion cannot produce a
    /// negative last nonzero component, so such vectors are flipped and the
    /// flip is carried here.
    int sign = 1;

    [[nodiscard]] int dim() const noexcept {
        return static_cast<int>(angles.size()) + 1;
    }
};

/// Angles for a unit vector of dimension >= 2.
/// Throws DomainError on NaN, zero, or non-unit input.
[[nodiscard]] LoaderProgram compute_loader_angles(std::span<const double> x);

/// Amplitudes produced by the circuit (sign * x), via the product formula.
[[nodiscard]] std::vector<double> decode(const LoaderProgram &prog);

/// The source vector x = sign * decode(prog).
[[nodiscard]] std::vector<double> recover(const LoaderProgram &prog);

/// X(0), then RBS(α_k) on (k, k+1) for k = 0..n-2.
[[nodiscard]] qsim::Circuit build_loader_circuit(const LoaderProgram &prog);

enum class AdjointForm {
    /// Exact inverse of build_loader_circuit, ending with X(0):
    /// maps the loaded state back to |0...0>.
    kFull,
    /// Inverse RBS cascade only. Applied to a unary state y, the amplitude
    /// on e_0 is sign * <x, y>, so P(qubit 0 = 1) = <x, y>^2.
    kRotationsOnly,
};

[[nodiscard]] qsim::Circuit build_adjoint_loader(const LoaderProgram &prog,
                                                 AdjointForm form = AdjointForm::kFull);

/// Runs the RBS cascade on e_0 on the unary fast path; yields sign * x.
[[nodiscard]] qsim::UnaryState load_unary(const LoaderProgram &prog);

} // namespace qvit::loaders
