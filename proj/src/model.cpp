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
#include "qvit/model.hpp"

#include "qvit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qvit::model {

namespace {

std::vector<double> ones(int n) { return std::vector<double>(static_cast<std::size_t>(n), 1.0); }
std::vector<double> zeros(int n) { return std::vector<double>(static_cast<std::size_t>(n), 0.0); }

Matrix add(const Matrix &a, const Matrix &b) {
    Matrix c = a;
    for (std::size_t k = 0; k < c.size(); ++k) {
        c.data()[k] += b.data()[k];
    }
    return c;
}

void add_into(Matrix &a, const Matrix &b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
        a.data()[k] += b.data()[k];
    }
}

void add_into(std::span<double> a, std::span<const double> b) {
    for (std::size_t k = 0; k < a.size(); ++k) {
        a[k] += b[k];
    }
}

void glorot(std::span<double> w, std::size_t fan_in, std::size_t fan_out, Rng &rng) {
    const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    std::uniform_real_distribution<double> u(-a, a);
    for (double &v : w) {
        v = u(rng);
    }
}

void normal(std::span<double> w, double stddev, Rng &rng) {
    std::normal_distribution<double> n(0.0, stddev);
    for (double &v : w) {
        v = n(rng);
    }
}

bool dropout_active(const ModelConfig &cfg, const ForwardOptions &opts) {
    return opts.training && cfg.dropout > 0.0;
}

Matrix maybe_mask(const ModelConfig &cfg, const ForwardOptions &opts, std::size_t rows,
                  std::size_t cols) {
    if (!dropout_active(cfg, opts)) {
        return {};
    }
    if (opts.rng == nullptr) {
        throw DomainError("model: dropout in training mode needs an rng");
    }
    return layers::dropout_mask(rows, cols, cfg.dropout, *opts.rng);
}

} // namespace

std::string to_string(AttentionKind k) {
    return k == AttentionKind::kQuantum ? "quantum" : "classical";
}

AttentionKind parse_attention_kind(std::string_view s) {
    if (s == "quantum" || s == "qvit") {
        return AttentionKind::kQuantum;
    }
    if (s == "classical" || s == "vit") {
        return AttentionKind::kClassical;
    }
    throw DomainError("unknown attention kind '" + std::string(s) +
                      "' (expected quantum|qvit|classical|vit)");
}

void ModelConfig::validate() const {
    auto fail = [](const std::string &m) { throw DomainError("ModelConfig: " + m); };
    if (image_size <= 0 || channels <= 0 || patch_size <= 0) {
        fail("image_size, channels and patch_size must be positive");
    }
    if (image_size % patch_size != 0) {
        fail("image_size " + std::to_string(image_size) + " is not divisible by patch_size " +
             std::to_string(patch_size));
    }
    if (dim < 2) {
        fail("dim must be >= 2");
    }
    if (n_blocks < 1) {
        fail("n_blocks must be >= 1");
    }
    if (n_heads != 1) {
        fail("only a single attention head is supported");
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
        fail("dropout must be in [0, 1)");
    }
}

ModelParams::ModelParams(const ModelConfig &cfg) : config(cfg) {
    cfg.validate();
    const std::size_t d = static_cast<std::size_t>(cfg.dim);
    embed = Matrix(d, static_cast<std::size_t>(cfg.patch_len()));
    pos = Matrix(static_cast<std::size_t>(cfg.seq_len()), d);
    cls = zeros(cfg.dim);
    blocks.resize(static_cast<std::size_t>(cfg.n_blocks));
    for (auto &b : blocks) {
        b.ln1_gamma = ones(cfg.dim);
        b.ln1_beta = zeros(cfg.dim);
        b.quantum = {ortho::PyramidLayer(cfg.dim), ortho::PyramidLayer(cfg.dim)};
        b.classical = {Matrix(d, d), Matrix(d, d), Matrix(d, d)};
        b.ln2_gamma = ones(cfg.dim);
        b.ln2_beta = zeros(cfg.dim);
        b.ffn_w1 = Matrix(static_cast<std::size_t>(cfg.ffn_hidden()), d);
        b.ffn_b1 = zeros(cfg.ffn_hidden());
        b.ffn_w2 = Matrix(d, static_cast<std::size_t>(cfg.ffn_hidden()));
        b.ffn_b2 = zeros(cfg.dim);
    }
    head_w1 = Matrix(static_cast<std::size_t>(cfg.head_hidden()), d + 2);
    head_b1 = zeros(cfg.head_hidden());
    head_w2 = zeros(cfg.head_hidden());
    head_b2 = zeros(1);
}

std::size_t ModelParams::num_values() const {
    std::size_t n = 0;
    for_each([&](std::string_view, const auto &, auto values) { n += values.size(); });
    return n;
}

std::vector<double> ModelParams::flatten() const {
    std::vector<double> flat;
    flat.reserve(num_values());
    for_each([&](std::string_view, const auto &, auto values) {
        flat.insert(flat.end(), values.begin(), values.end());
    });
    return flat;
}

void ModelParams::unflatten(std::span<const double> flat) {
    if (flat.size() != num_values()) {
        throw DimensionError("ModelParams::unflatten: expected " +
                             std::to_string(num_values()) + " values, got " +
                             std::to_string(flat.size()));
    }
    std::size_t off = 0;
    for_each([&](std::string_view, const auto &, std::span<double> values) {
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(off), values.size(),
                    values.begin());
        off += values.size();
    });
}

void ModelParams::set_zero() {
    for_each([](std::string_view, const auto &, std::span<double> values) {
        std::fill(values.begin(), values.end(), 0.0);
    });
}

void ModelParams::add(const ModelParams &other) {
    const std::vector<double> o = other.flatten();
    std::size_t off = 0;
    for_each([&](std::string_view, const auto &, std::span<double> values) {
        for (double &v : values) {
            v += o[off++];
        }
    });
}

ModelParams init_params(const ModelConfig &cfg, std::uint64_t seed) {
    ModelParams p(cfg);
    Rng rng(seed);
    const std::size_t d = static_cast<std::size_t>(cfg.dim);
    glorot(p.embed.data(), p.embed.cols(), p.embed.rows(), rng);
    normal(p.pos.data(), 0.02, rng);
    normal(p.cls, 0.02, rng);
    for (auto &b : p.blocks) {
        if (cfg.attention == AttentionKind::kQuantum) {
            normal(b.quantum.w_qk.angles(), 0.1, rng);
            normal(b.quantum.w_v.angles(), 0.1, rng);
        } else {
            glorot(b.classical.wq.data(), d, d, rng);
            glorot(b.classical.wk.data(), d, d, rng);
            glorot(b.classical.wv.data(), d, d, rng);
        }
        glorot(b.ffn_w1.data(), b.ffn_w1.cols(), b.ffn_w1.rows(), rng);
        glorot(b.ffn_w2.data(), b.ffn_w2.cols(), b.ffn_w2.rows(), rng);
    }
    glorot(p.head_w1.data(), p.head_w1.cols(), p.head_w1.rows(), rng);
    glorot(p.head_w2, p.head_w2.size(), 1, rng);
    return p;
}

Matrix extract_patches(std::span<const double> image, const ModelConfig &cfg) {
    if (image.size() != cfg.image_len()) {
        throw DimensionError("extract_patches: expected " + std::to_string(cfg.image_len()) +
                             " values for a " + std::to_string(cfg.image_size) + "x" +
                             std::to_string(cfg.image_size) + "x" +
                             std::to_string(cfg.channels) + " image, got " +
                             std::to_string(image.size()));
    }
    const std::size_t side = static_cast<std::size_t>(cfg.patches_per_side());
    const std::size_t p = static_cast<std::size_t>(cfg.patch_size);
    const std::size_t c = static_cast<std::size_t>(cfg.channels);
    const std::size_t w = static_cast<std::size_t>(cfg.image_size);
    Matrix out(side * side, static_cast<std::size_t>(cfg.patch_len()));
    for (std::size_t pr = 0; pr < side; ++pr) {
        for (std::size_t pc = 0; pc < side; ++pc) {
            auto row = out.row(pr * side + pc);
            std::size_t k = 0;
            for (std::size_t r = 0; r < p; ++r) {
                const std::size_t base = ((pr * p + r) * w + pc * p) * c;
                for (std::size_t j = 0; j < p * c; ++j) {
                    row[k++] = image[base + j];
                }
            }
        }
    }
    return out;
}

Matrix embed(const Matrix &patches, const ModelParams &params) {
    const auto &cfg = params.config;
    if (patches.rows() != static_cast<std::size_t>(cfg.n_patches()) ||
        patches.cols() != static_cast<std::size_t>(cfg.patch_len())) {
        throw DimensionError("embed: patch matrix shape mismatch");
    }
    const std::size_t d = static_cast<std::size_t>(cfg.dim);
    Matrix tokens(patches.rows() + 1, d);
    for (std::size_t k = 0; k < d; ++k) {
        tokens(0, k) = params.cls[k] + params.pos(0, k);
    }
    for (std::size_t i = 0; i < patches.rows(); ++i) {
        const auto x = patches.row(i);
        for (std::size_t k = 0; k < d; ++k) {
            tokens(i + 1, k) = dot(params.embed.row(k), x) + params.pos(i + 1, k);
        }
    }
    return tokens;
}

Matrix encoder_block(const Matrix &tokens, const BlockParams &block, const ModelConfig &cfg,
                     const ForwardOptions &opts, BlockTrace *trace) {
    BlockTrace local;
    BlockTrace &t = trace ? *trace : local;
    t.input = tokens;
    t.h1 = layers::layer_norm_forward(tokens, block.ln1_gamma, block.ln1_beta, &t.ln1);

    attention::AttentionOptions aopts;
    aopts.training = opts.training;
    aopts.dropout_rate = cfg.dropout;
    aopts.rng = opts.rng;
    aopts.self_only = opts.self_attention_only;
    const Matrix attn = cfg.attention == AttentionKind::kQuantum
                            ? attention::quantum_attention_forward(t.h1, block.quantum, aopts,
                                                                   &t.quantum)
                            : attention::classical_attention_forward(t.h1, block.classical,
                                                                     aopts, &t.classical);
    t.attn_mask = maybe_mask(cfg, opts, attn.rows(), attn.cols());
    t.residual1 = add(tokens, layers::apply_mask(attn, t.attn_mask));

    t.h2 = layers::layer_norm_forward(t.residual1, block.ln2_gamma, block.ln2_beta, &t.ln2);
    t.ffn_pre = layers::linear_forward(t.h2, block.ffn_w1, block.ffn_b1);
    const Matrix act = layers::gelu(t.ffn_pre);
    t.ffn_mask = maybe_mask(cfg, opts, act.rows(), act.cols());
    t.ffn_act = layers::apply_mask(act, t.ffn_mask);
    const Matrix ffn_out = layers::linear_forward(t.ffn_act, block.ffn_w2, block.ffn_b2);
    return add(t.residual1, ffn_out);
}

Matrix encoder_block_backward(const BlockTrace &t, const BlockParams &block,
                              const ModelConfig &cfg, const Matrix &d_out, BlockParams &grad) {
    Matrix d_res1 = d_out;
    const Matrix d_act_used =
        layers::linear_backward(t.ffn_act, block.ffn_w2, d_out, grad.ffn_w2, grad.ffn_b2);
    const Matrix d_act = layers::apply_mask(d_act_used, t.ffn_mask);
    const Matrix d_pre = layers::gelu_backward(t.ffn_pre, d_act);
    const Matrix d_h2 = layers::linear_backward(t.h2, block.ffn_w1, d_pre, grad.ffn_w1,
                                                grad.ffn_b1);
    add_into(d_res1, layers::layer_norm_backward(t.ln2, block.ln2_gamma, d_h2,
                                                 grad.ln2_gamma, grad.ln2_beta));

    const Matrix d_attn = layers::apply_mask(d_res1, t.attn_mask);
    Matrix d_h1;
    if (cfg.attention == AttentionKind::kQuantum) {
        auto g = attention::quantum_attention_backward(t.quantum, block.quantum, d_attn);
        add_into(grad.quantum.w_qk.angles(), g.w_qk);
        add_into(grad.quantum.w_v.angles(), g.w_v);
        d_h1 = std::move(g.tokens);
    } else {
        auto g = attention::classical_attention_backward(t.classical, block.classical, d_attn);
        add_into(grad.classical.wq, g.wq);
        add_into(grad.classical.wk, g.wk);
        add_into(grad.classical.wv, g.wv);
        d_h1 = std::move(g.tokens);
    }
    Matrix d_tokens = d_res1;
    add_into(d_tokens, layers::layer_norm_backward(t.ln1, block.ln1_gamma, d_h1,
                                                   grad.ln1_gamma, grad.ln1_beta));
    return d_tokens;
}

double classify(const Matrix &tokens, double m0, double pt, const ModelParams &params,
                const ForwardOptions &opts, ForwardTrace *trace) {
    const auto &cfg = params.config;
    const std::size_t d = static_cast<std::size_t>(cfg.dim);
    if (tokens.cols() != d || tokens.rows() == 0) {
        throw DimensionError("classify: token width mismatch");
    }
    ForwardTrace local;
    ForwardTrace &t = trace ? *trace : local;
    t.head_in = Matrix(1, d + 2);
    std::copy_n(tokens.row(0).begin(), d, t.head_in.row(0).begin());
    t.head_in(0, d) = m0;
    t.head_in(0, d + 1) = pt;
    t.head_pre = layers::linear_forward(t.head_in, params.head_w1, params.head_b1);
    const Matrix act = layers::gelu(t.head_pre);
    t.head_mask = maybe_mask(cfg, opts, act.rows(), act.cols());
    t.head_act = layers::apply_mask(act, t.head_mask);
    t.logit = dot(t.head_act.row(0), params.head_w2) + params.head_b2[0];
    t.prob = layers::sigmoid(t.logit);
    return t.prob;
}

ForwardTrace model_forward(const ModelParams &params, std::span<const double> image, double m0,
                           double pt, const ForwardOptions &opts) {
    const auto &cfg = params.config;
    ForwardTrace t;
    t.patches = extract_patches(image, cfg);
    Matrix tokens = embed(t.patches, params);
    t.blocks.resize(params.blocks.size());
    for (std::size_t b = 0; b < params.blocks.size(); ++b) {
        tokens = encoder_block(tokens, params.blocks[b], cfg, opts, &t.blocks[b]);
    }
    t.encoded = std::move(tokens);
    t.prob = classify(t.encoded, m0, pt, params, opts, &t);
    return t;
}

void model_backward_logit(const ModelParams &params, const ForwardTrace &t, double d_logit,
                          ModelParams &grad) {
    const auto &cfg = params.config;
    const std::size_t d = static_cast<std::size_t>(cfg.dim);

    // head
    grad.head_b2[0] += d_logit;
    Matrix d_act(1, d);
    for (std::size_t k = 0; k < d; ++k) {
        grad.head_w2[k] += d_logit * t.head_act(0, k);
        d_act(0, k) = d_logit * params.head_w2[k];
    }
    const Matrix d_pre = layers::gelu_backward(t.head_pre, layers::apply_mask(d_act, t.head_mask));
    const Matrix d_in =
        layers::linear_backward(t.head_in, params.head_w1, d_pre, grad.head_w1, grad.head_b1);

    Matrix d_tokens(t.encoded.rows(), d);
    std::copy_n(d_in.row(0).begin(), d, d_tokens.row(0).begin());
    for (std::size_t b = params.blocks.size(); b-- > 0;) {
        d_tokens = encoder_block_backward(t.blocks[b], params.blocks[b], cfg, d_tokens,
                                          grad.blocks[b]);
    }

    // embedding
    for (std::size_t k = 0; k < d; ++k) {
        grad.cls[k] += d_tokens(0, k);
    }
    add_into(grad.pos, d_tokens);
    for (std::size_t i = 0; i < t.patches.rows(); ++i) {
        const auto x = t.patches.row(i);
        for (std::size_t k = 0; k < d; ++k) {
            const double g = d_tokens(i + 1, k);
            auto row = grad.embed.row(k);
            for (std::size_t j = 0; j < x.size(); ++j) {
                row[j] += g * x[j];
            }
        }
    }
}

void model_backward(const ModelParams &params, const ForwardTrace &trace, double d_prob,
                    ModelParams &grad) {
    model_backward_logit(params, trace, d_prob * trace.prob * (1.0 - trace.prob), grad);
}

} // namespace qvit::model
