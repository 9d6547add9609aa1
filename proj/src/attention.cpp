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
#include "qvit/attention.hpp"

#include "qvit/errors.hpp"
#include "qvit/loaders.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qvit::attention {

namespace {

void check_unit(std::span<const double> x, const char *what) {
    const double n = norm2(x);
    if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTolerance) {
        throw DomainError(std::string(what) + ": input is not a unit vector (norm " +
                          std::to_string(n) + ")");
    }
}

/// Fills cache mask/map_used from map according to the options.
void apply_map_dropout(const AttentionOptions &opts, const Matrix &map,
                       Matrix &mask, Matrix &map_used) {
    map_used = map;
    mask = Matrix{};
    if (!opts.training || opts.dropout_rate <= 0.0) {
        return;
    }
    if (opts.rng == nullptr) {
        throw DomainError("attention: dropout in training mode needs an rng");
    }
    const double keep = 1.0 - opts.dropout_rate;
    mask = Matrix(map.rows(), map.cols());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t i = 0; i < mask.size(); ++i) {
        mask.data()[i] = u(*opts.rng) < keep ? 1.0 / keep : 0.0;
        map_used.data()[i] *= mask.data()[i];
    }
}

Matrix identity_map(std::size_t s) { return Matrix::identity(s); }

/// out = map · values
Matrix mix(const Matrix &map, const Matrix &values) { return matmul(map, values); }

/// d(map) from d(out) and the (possibly masked) map used in the forward.
Matrix map_grad(const Matrix &d_out, const Matrix &values, const Matrix &mask) {
    Matrix d_map = matmul(d_out, values.transposed());
    if (mask.size() != 0) {
        for (std::size_t i = 0; i < d_map.size(); ++i) {
            d_map.data()[i] *= mask.data()[i];
        }
    }
    return d_map;
}

/// Backward through row softmax: dS_ij = P_ij (dP_ij - Σ_k P_ik dP_ik).
Matrix softmax_backward(const Matrix &p, const Matrix &dp) {
    Matrix ds(p.rows(), p.cols());
    for (std::size_t i = 0; i < p.rows(); ++i) {
        const double inner = dot(p.row(i), dp.row(i));
        for (std::size_t j = 0; j < p.cols(); ++j) {
            ds(i, j) = p(i, j) * (dp(i, j) - inner);
        }
    }
    return ds;
}

void check_tokens(const TokenSequence &tokens, std::size_t d, const char *what) {
    if (tokens.rows() == 0 || tokens.cols() != d) {
        throw DimensionError(std::string(what) + ": tokens must be S x " +
                             std::to_string(d));
    }
}

} // namespace

Matrix softmax_rows(const Matrix &scores) {
    Matrix p(scores.rows(), scores.cols());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        const auto row = scores.row(i);
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            p(i, j) = std::exp(row[j] - mx);
            z += p(i, j);
        }
        for (std::size_t j = 0; j < row.size(); ++j) {
            p(i, j) /= z;
        }
    }
    return p;
}

double attention_coefficient(std::span<const double> xi, std::span<const double> xj,
                             const ortho::PyramidLayer &w) {
    const std::size_t d = static_cast<std::size_t>(w.dim());
    if (xi.size() != d || xj.size() != d) {
        throw DimensionError("attention_coefficient: dimension mismatch");
    }
    check_unit(xi, "attention_coefficient");
    check_unit(xj, "attention_coefficient");
    const std::vector<double> y = ortho::apply_layer(w, xj);
    const double b = dot(xi, y);
    return b * b;
}

qsim::Circuit attention_circuit(std::span<const double> xi, std::span<const double> xj,
                                const ortho::PyramidLayer &w) {
    const std::size_t d = static_cast<std::size_t>(w.dim());
    if (xi.size() != d || xj.size() != d) {
        throw DimensionError("attention_circuit: dimension mismatch");
    }
    const auto load_j = loaders::compute_loader_angles(xj);
    const auto load_i = loaders::compute_loader_angles(xi);
    qsim::Circuit c = loaders::build_loader_circuit(load_j);
    c.append(ortho::layer_circuit(w));
    c.append(loaders::build_adjoint_loader(load_i, loaders::AdjointForm::kRotationsOnly));
    return c;
}

double attention_coefficient_dense(std::span<const double> xi,
                                   std::span<const double> xj,
                                   const ortho::PyramidLayer &w) {
    const qsim::DenseState out = qsim::simulate_dense(attention_circuit(xi, xj, w));
    return qsim::prob_one(out, 0);
}

TokenSequence quantum_attention_forward(const TokenSequence &tokens,
                                        const QuantumAttentionParams &params,
                                        const AttentionOptions &opts,
                                        QuantumAttentionCache *cache) {
    const std::size_t d = static_cast<std::size_t>(params.w_qk.dim());
    if (params.w_v.dim() != params.w_qk.dim() || d < 2) {
        throw DimensionError("quantum_attention: W_qk and W_v must share dimension >= 2");
    }
    check_tokens(tokens, d, "quantum_attention");
    const std::size_t s = tokens.rows();

    QuantumAttentionCache local;
    QuantumAttentionCache &c = cache ? *cache : local;
    c.self_only = opts.self_only;
    c.normalized = tokens;
    c.norms.assign(s, 0.0);
    for (std::size_t i = 0; i < s; ++i) {
        const double n = norm2(tokens.row(i));
        if (!std::isfinite(n) || n < kMinTokenNorm) {
            throw DomainError("quantum_attention: token " + std::to_string(i) +
                              " has zero norm");
        }
        c.norms[i] = n;
        for (double &v : c.normalized.row(i)) {
            v /= n;
        }
    }

    c.keys = Matrix(s, d);
    c.values = Matrix(s, d);
    for (std::size_t j = 0; j < s; ++j) {
        const auto x = c.normalized.row(j);
        std::copy(x.begin(), x.end(), c.keys.row(j).begin());
        ortho::apply_layer_inplace(params.w_qk, c.keys.row(j));
        std::copy(x.begin(), x.end(), c.values.row(j).begin());
        ortho::apply_layer_inplace(params.w_v, c.values.row(j));
    }

    c.inner = matmul(c.normalized, c.keys.transposed());
    c.scores = c.inner;
    for (double &v : c.scores.data()) {
        v *= v;
    }
    c.map = opts.self_only ? identity_map(s) : softmax_rows(c.scores);
    apply_map_dropout(opts, c.map, c.mask, c.map_used);
    return mix(c.map_used, c.values);
}

QuantumAttentionGrad quantum_attention_backward(const QuantumAttentionCache &c,
                                                const QuantumAttentionParams &params,
                                                const Matrix &d_out) {
    const std::size_t s = c.normalized.rows();
    const std::size_t d = c.normalized.cols();
    if (d_out.rows() != s || d_out.cols() != d) {
        throw DimensionError("quantum_attention_backward: d_out shape mismatch");
    }
    QuantumAttentionGrad g;
    g.w_qk.assign(params.w_qk.num_angles(), 0.0);
    g.w_v.assign(params.w_v.num_angles(), 0.0);

    Matrix d_x(s, d);
    // values: out = map_used · V
    const Matrix d_values = matmul(c.map_used.transposed(), d_out);
    for (std::size_t j = 0; j < s; ++j) {
        ortho::layer_grad_accumulate(params.w_v, c.normalized.row(j), d_values.row(j),
                                     g.w_v, d_x.row(j));
    }

    if (!c.self_only) {
        const Matrix d_map = map_grad(d_out, c.values, c.mask);
        const Matrix d_scores = softmax_backward(c.map, d_map);
        // A = b^2, b_ij = x_i · k_j
        Matrix d_inner(s, s);
        for (std::size_t k = 0; k < d_inner.size(); ++k) {
            d_inner.data()[k] = 2.0 * c.inner.data()[k] * d_scores.data()[k];
        }
        const Matrix dx_direct = matmul(d_inner, c.keys);
        const Matrix d_keys = matmul(d_inner.transposed(), c.normalized);
        for (std::size_t i = 0; i < s; ++i) {
            auto row = d_x.row(i);
            const auto direct = dx_direct.row(i);
            for (std::size_t k = 0; k < d; ++k) {
                row[k] += direct[k];
            }
            ortho::layer_grad_accumulate(params.w_qk, c.normalized.row(i),
                                         d_keys.row(i), g.w_qk, row);
        }
    }

    // x = t / ‖t‖  =>  dt = (dx - x (x · dx)) / ‖t‖
    g.tokens = Matrix(s, d);
    for (std::size_t i = 0; i < s; ++i) {
        const auto x = c.normalized.row(i);
        const auto dx = d_x.row(i);
        const double proj = dot(x, dx);
        auto dt = g.tokens.row(i);
        for (std::size_t k = 0; k < d; ++k) {
            dt[k] = (dx[k] - x[k] * proj) / c.norms[i];
        }
    }
    return g;
}

TokenSequence classical_attention_forward(const TokenSequence &tokens,
                                          const ClassicalAttentionParams &params,
                                          const AttentionOptions &opts,
                                          ClassicalAttentionCache *cache) {
    const std::size_t d = params.wq.rows();
    for (const Matrix *w : {&params.wq, &params.wk, &params.wv}) {
        if (w->rows() != d || w->cols() != d) {
            throw DimensionError("classical_attention: projections must be D x D");
        }
    }
    check_tokens(tokens, d, "classical_attention");
    const std::size_t s = tokens.rows();

    ClassicalAttentionCache local;
    ClassicalAttentionCache &c = cache ? *cache : local;
    c.self_only = opts.self_only;
    c.tokens = tokens;
    c.queries = matmul(tokens, params.wq.transposed());
    c.keys = matmul(tokens, params.wk.transposed());
    c.values = matmul(tokens, params.wv.transposed());
    if (opts.self_only) {
        c.map = identity_map(s);
    } else {
        Matrix scores = matmul(c.queries, c.keys.transposed());
        const double scale = 1.0 / std::sqrt(static_cast<double>(d));
        for (double &v : scores.data()) {
            v *= scale;
        }
        c.map = softmax_rows(scores);
    }
    apply_map_dropout(opts, c.map, c.mask, c.map_used);
    return mix(c.map_used, c.values);
}

ClassicalAttentionGrad classical_attention_backward(const ClassicalAttentionCache &c,
                                                    const ClassicalAttentionParams &params,
                                                    const Matrix &d_out) {
    const std::size_t s = c.tokens.rows();
    const std::size_t d = c.tokens.cols();
    if (d_out.rows() != s || d_out.cols() != d) {
        throw DimensionError("classical_attention_backward: d_out shape mismatch");
    }
    const Matrix d_values = matmul(c.map_used.transposed(), d_out);
    Matrix d_queries(s, d);
    Matrix d_keys(s, d);
    if (!c.self_only) {
        const Matrix d_map = map_grad(d_out, c.values, c.mask);
        Matrix d_scores = softmax_backward(c.map, d_map);
        const double scale = 1.0 / std::sqrt(static_cast<double>(d));
        for (double &v : d_scores.data()) {
            v *= scale;
        }
        d_queries = matmul(d_scores, c.keys);
        d_keys = matmul(d_scores.transposed(), c.queries);
    }
    ClassicalAttentionGrad g;
    g.wq = matmul(d_queries.transposed(), c.tokens);
    g.wk = matmul(d_keys.transposed(), c.tokens);
    g.wv = matmul(d_values.transposed(), c.tokens);
    g.tokens = matmul(d_queries, params.wq);
    const Matrix tk = matmul(d_keys, params.wk);
    const Matrix tv = matmul(d_values, params.wv);
    for (std::size_t k = 0; k < g.tokens.size(); ++k) {
        g.tokens.data()[k] += tk.data()[k] + tv.data()[k];
    }
    return g;
}

} // namespace qvit::attention
