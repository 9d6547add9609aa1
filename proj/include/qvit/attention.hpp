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
 * Single-head self-attention: the quantum block built from pyramid layers and
 * the classical scaled dot-product baseline.
 *
 * Quantum block, for tokens t_1..t_S:
 *   x_i   = t_i / ‖t_i‖
 *   A_ij  = (x_iᵀ W_qk x_j)^2      probability read out by the circuit
 *   P     = row-softmax(A)          no 1/sqrt(d) factor, A is already in [0, 1]
 *   v_j   = W_v x_j
 *   out_i = Σ_j P_ij v_j
 */
#pragma once

#include "qvit/linalg.hpp"
#include "qvit/ortho.hpp"
#include "qvit/qsim.hpp"
#include "qvit/random.hpp"

#include <span>
#include <vector>

namespace qvit::attention {

/// S tokens x D dims, one token per row.
using TokenSequence = Matrix;

/// Accepted deviation of ‖x‖ from 1 in attention_coefficient.
inline constexpr double kUnitTolerance = 1e-6;
/// Tokens with smaller norm are rejected by the quantum block.
inline constexpr double kMinTokenNorm = 1e-12;

struct QuantumAttentionParams {
    ortho::PyramidLayer w_qk;
    ortho::PyramidLayer w_v;
};

struct ClassicalAttentionParams {
    Matrix wq;
    Matrix wk;
    Matrix wv;
};

struct AttentionOptions {
    bool training = false;
    /// Dropout on the post-softmax map; only active when training.
    double dropout_rate = 0.0;
    Rng *rng = nullptr;
    /// Forces the attention map to the identity (isolation tests).
    bool self_only = false;
};

/// (x_iᵀ W x_j)^2 on the fast path.
[[nodiscard]] double attention_coefficient(std::span<const double> xi,
                                           std::span<const double> xj,
                                           const ortho::PyramidLayer &w);

/// load(x_j) -> pyramid(w) -> inverse cascade of load(x_i); measuring qubit 0
/// in |1> yields the coefficient.
[[nodiscard]] qsim::Circuit attention_circuit(std::span<const double> xi,
                                              std::span<const double> xj,
                                              const ortho::PyramidLayer &w);

/// Coefficient by dense simulation of attention_circuit.
[[nodiscard]] double attention_coefficient_dense(std::span<const double> xi,
                                                 std::span<const double> xj,
                                                 const ortho::PyramidLayer &w);

struct QuantumAttentionCache {
    Matrix normalized;          // x
    std::vector<double> norms;  // ‖t_i‖
    Matrix keys;                // W_qk x_j
    Matrix inner;               // x_iᵀ W_qk x_j
    Matrix scores;              // A
    Matrix map;                 // softmax(A)
    Matrix mask;                // dropout scale per entry; empty when inactive
    Matrix map_used;            // map after dropout
    Matrix values;              // W_v x_j
    bool self_only = false;
};

struct QuantumAttentionGrad {
    Matrix tokens;
    std::vector<double> w_qk;
    std::vector<double> w_v;
};

[[nodiscard]] TokenSequence quantum_attention_forward(
    const TokenSequence &tokens, const QuantumAttentionParams &params,
    const AttentionOptions &opts = {}, QuantumAttentionCache *cache = nullptr);

[[nodiscard]] QuantumAttentionGrad quantum_attention_backward(
    const QuantumAttentionCache &cache, const QuantumAttentionParams &params,
    const Matrix &d_out);

struct ClassicalAttentionCache {
    Matrix tokens;
    Matrix queries;
    Matrix keys;
    Matrix values;
    Matrix map;
    Matrix mask;
    Matrix map_used;
    bool self_only = false;
};

struct ClassicalAttentionGrad {
    Matrix tokens;
    Matrix wq;
    Matrix wk;
    Matrix wv;
};

/// softmax(Q Kᵀ / sqrt(D)) V with Q = T Wqᵀ, K = T Wkᵀ, V = T Wvᵀ.
[[nodiscard]] TokenSequence classical_attention_forward(
    const TokenSequence &tokens, const ClassicalAttentionParams &params,
    const AttentionOptions &opts = {}, ClassicalAttentionCache *cache = nullptr);

[[nodiscard]] ClassicalAttentionGrad classical_attention_backward(
    const ClassicalAttentionCache &cache, const ClassicalAttentionParams &params,
    const Matrix &d_out);

/// Numerically stable softmax of every row.
[[nodiscard]] Matrix softmax_rows(const Matrix &scores);

} // namespace qvit::attention
