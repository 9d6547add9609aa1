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
 * Pyramid quantum orthogonal layers.
 *
 * A pyramid on n qubits has n(n-1)/2 RBS gates on adjacent pairs spread over
 * 2n-3 time steps. At step t the pairs (i, i+1) with i = t (mod 2) and
 * i <= min(t, 2n-4-t) are active; within one step pairs are listed top to
 * bottom. For n = 4 this gives (0,1) (1,2) (0,1) (2,3) (1,2) (0,1).
 *
 * On the unary subspace every gate is a Givens rotation, so the layer is an
 * element of SO(n) that can be applied to a vector in O(n^2) without ever
 * touching a 2^n register.
 */
#pragma once

#include "qvit/linalg.hpp"
#include "qvit/qsim.hpp"

#include <random>
#include <span>
#include <vector>

namespace qvit::ortho {

struct RbsPair {
    int q1;
    int q2;
    friend bool operator==(const RbsPair &, const RbsPair &) = default;
};

[[nodiscard]] constexpr int pyramid_size(int n) noexcept { return n * (n - 1) / 2; }

/// Deterministic gate layout; throws DimensionError for n < 2.
[[nodiscard]] std::vector<RbsPair> pyramid_wiring(int n);

/// Time step of each gate in pyramid_wiring(n).
[[nodiscard]] std::vector<int> pyramid_time_steps(int n);

class PyramidLayer {
  public:
    /// Identity layer (all angles zero).
    explicit PyramidLayer(int n);
    PyramidLayer(int n, std::vector<double> angles);

    [[nodiscard]] int dim() const noexcept { return n_; }
    [[nodiscard]] std::size_t num_angles() const noexcept { return angles_.size(); }
    [[nodiscard]] std::span<const double> angles() const noexcept { return angles_; }
    std::span<double> angles() noexcept { return angles_; }
    [[nodiscard]] const std::vector<RbsPair> &wiring() const noexcept {
        return wiring_;
    }

  private:
    int n_;
    std::vector<double> angles_;
    std::vector<RbsPair> wiring_;
};

/// Angles drawn i.i.d. from N(0, stddev^2).
[[nodiscard]] PyramidLayer random_layer(int n, std::mt19937_64 &rng,
                                        double stddev = 0.1);

/// The layer as an RBS circuit on n qubits.
[[nodiscard]] qsim::Circuit layer_circuit(const PyramidLayer &layer);

/// M with layer(x) = M x on the unary subspace.
[[nodiscard]] Matrix extract_matrix(const PyramidLayer &layer);

void apply_layer_inplace(const PyramidLayer &layer, std::span<double> x);
[[nodiscard]] std::vector<double> apply_layer(const PyramidLayer &layer,
                                              std::span<const double> x);
/// Mᵀ x (the inverse layer).
[[nodiscard]] std::vector<double> apply_layer_transposed(const PyramidLayer &layer,
                                                         std::span<const double> x);

/// Tolerances for compile_matrix.
inline constexpr double kCompileOrthTolerance = 1e-8;
inline constexpr double kCompileDetTolerance = 1e-6;

/// Pyramid angles reproducing an SO(n) matrix.
///
/// Column n-1 is pushed onto e_{n-1} by the last diagonal of the pyramid
/// (rotations on (0,1), (1,2), ..., (n-2,n-1) applied as transposes from the
/// left), which leaves an (n-1)-dimensional problem solved by the sub-pyramid.
/// Throws NotOrthogonalError, or NegativeDeterminantError for det = -1.
[[nodiscard]] PyramidLayer compile_matrix(const Matrix &m);

struct LayerGrad {
    std::vector<double> angles;
    std::vector<double> x;
};

/// Gradients of upstreamᵀ · apply_layer(layer, x) w.r.t. the angles and x.
[[nodiscard]] LayerGrad layer_grad(const PyramidLayer &layer,
                                   std::span<const double> x,
                                   std::span<const double> upstream);

/// Accumulating form of layer_grad: adds into grad_angles and grad_x.
void layer_grad_accumulate(const PyramidLayer &layer, std::span<const double> x,
                           std::span<const double> upstream,
                           std::span<double> grad_angles,
                           std::span<double> grad_x);

} // namespace qvit::ortho
