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
 * Classical layers shared by both model variants. Every forward has a
 * matching backward that consumes the cached activations.
 */
#pragma once

#include "qvit/linalg.hpp"
#include "qvit/random.hpp"

#include <cmath>
#include <span>
#include <vector>

namespace qvit::layers {

inline constexpr double kLayerNormEps = 1e-5;

struct LayerNormCache {
    Matrix normalized;          // (x - mean) * rstd
    std::vector<double> rstd;
};

/// Row-wise layer normalization with affine gamma/beta.
[[nodiscard]] Matrix layer_norm_forward(const Matrix &x, std::span<const double> gamma,
                                        std::span<const double> beta,
                                        LayerNormCache *cache = nullptr);

/// Returns dx; accumulates into d_gamma and d_beta.
[[nodiscard]] Matrix layer_norm_backward(const LayerNormCache &cache,
                                         std::span<const double> gamma,
                                         const Matrix &dy, std::span<double> d_gamma,
                                         std::span<double> d_beta);

/// Exact GELU, x * Φ(x).
[[nodiscard]] double gelu(double x) noexcept;
[[nodiscard]] double gelu_grad(double x) noexcept;

[[nodiscard]] Matrix gelu(const Matrix &x);
/// dy * gelu'(x) elementwise.
[[nodiscard]] Matrix gelu_backward(const Matrix &x, const Matrix &dy);

/// x Wᵀ + b, rows of x are samples.
[[nodiscard]] Matrix linear_forward(const Matrix &x, const Matrix &w,
                                    std::span<const double> b);

/// Returns dx; accumulates dW and db.
[[nodiscard]] Matrix linear_backward(const Matrix &x, const Matrix &w, const Matrix &dy,
                                     Matrix &dw, std::span<double> db);

/// Inverted-dropout scale factors: 0 with probability rate, 1/(1-rate) otherwise.
[[nodiscard]] Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate,
                                  Rng &rng);

/// x ⊙ mask, or x itself for an empty mask.
[[nodiscard]] Matrix apply_mask(const Matrix &x, const Matrix &mask);

[[nodiscard]] inline double sigmoid(double z) noexcept {
    return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

} // namespace qvit::layers
