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
 * The vision transformer used for jet classification, in a quantum variant
 * (pyramid-layer attention) and a classical variant (scaled dot-product).
 *
 * Per sample:
 *   patches -> E · patch, class token prepended, positional vectors added
 *   L x [ pre-LN -> attention -> dropout -> residual,
 *         pre-LN -> Linear(D, 2D) -> GELU -> dropout -> Linear(2D, D) -> residual ]
 *   [cls; m0; pT] -> Linear(D+2, D) -> GELU -> dropout -> Linear(D, 1) -> sigmoid
 */
#pragma once

#include "qvit/attention.hpp"
#include "qvit/layers.hpp"
#include "qvit/linalg.hpp"
#include "qvit/ortho.hpp"
#include "qvit/random.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qvit::model {

enum class AttentionKind { kQuantum, kClassical };

[[nodiscard]] std::string to_string(AttentionKind k);
/// Accepts "quantum"/"qvit" and "classical"/"vit".
[[nodiscard]] AttentionKind parse_attention_kind(std::string_view s);

struct ModelConfig {
    int image_size = 16;
    int channels = 3;
    int patch_size = 4;
    int dim = 8;
    int n_blocks = 1;
    int n_heads = 1;
    double dropout = 0.5;
    AttentionKind attention = AttentionKind::kQuantum;

    void validate() const;
    [[nodiscard]] int patches_per_side() const { return image_size / patch_size; }
    [[nodiscard]] int n_patches() const { return patches_per_side() * patches_per_side(); }
    [[nodiscard]] int patch_len() const { return patch_size * patch_size * channels; }
    [[nodiscard]] int seq_len() const { return n_patches() + 1; }
    [[nodiscard]] int ffn_hidden() const { return 2 * dim; }
    [[nodiscard]] int head_hidden() const { return dim; }
    [[nodiscard]] std::size_t image_len() const {
        return static_cast<std::size_t>(image_size) * image_size * channels;
    }

    friend bool operator==(const ModelConfig &, const ModelConfig &) = default;
};

struct BlockParams {
    std::vector<double> ln1_gamma, ln1_beta;
    attention::QuantumAttentionParams quantum{ortho::PyramidLayer(2), ortho::PyramidLayer(2)};
    attention::ClassicalAttentionParams classical;
    std::vector<double> ln2_gamma, ln2_beta;
    Matrix ffn_w1;
    std::vector<double> ffn_b1;
    Matrix ffn_w2;
    std::vector<double> ffn_b2;
};

struct ModelParams {
    ModelConfig config;
    Matrix embed;              // D x P²C
    Matrix pos;                // (N+1) x D, row 0 is the class-token position
    std::vector<double> cls;   // D
    std::vector<BlockParams> blocks;
    Matrix head_w1;            // D x (D+2)
    std::vector<double> head_b1;
    std::vector<double> head_w2; // D
    std::vector<double> head_b2; // 1

    /// Shapes from the config; layer-norm gains are one, everything else zero.
    explicit ModelParams(const ModelConfig &cfg);

    /// Visits every trainable tensor in registry order with its stable name:
    /// f(std::string_view name, const std::vector<std::size_t>& shape, span values).
    template <class F> void for_each(F &&f) { visit(*this, f); }
    template <class F> void for_each(F &&f) const { visit(*this, f); }

    [[nodiscard]] std::size_t num_values() const;
    [[nodiscard]] std::vector<double> flatten() const;
    void unflatten(std::span<const double> flat);
    void set_zero();
    /// this += other (same config).
    void add(const ModelParams &other);

  private:
    template <class Self, class F> static void visit(Self &self, F &f);
};

/// Glorot-uniform weights, zero biases, unit LN gains, N(0, 0.02²) positional
/// and class vectors, pyramid angles N(0, 0.1²).
[[nodiscard]] ModelParams init_params(const ModelConfig &cfg, std::uint64_t seed);

/// N x P²C; patches scanned row-major, each flattened in (row, col, channel)
/// order. The image is H x W x C, channel fastest.
[[nodiscard]] Matrix extract_patches(std::span<const double> image, const ModelConfig &cfg);

/// (N+1) x D token sequence; row 0 is the class token.
[[nodiscard]] Matrix embed(const Matrix &patches, const ModelParams &params);

struct ForwardOptions {
    bool training = false;
    Rng *rng = nullptr;                ///< required when training with dropout
    bool self_attention_only = false;  ///< isolation hook, see AttentionOptions
};

struct BlockTrace {
    Matrix input;
    layers::LayerNormCache ln1;
    Matrix h1;
    attention::QuantumAttentionCache quantum;
    attention::ClassicalAttentionCache classical;
    Matrix attn_mask;
    Matrix residual1;
    layers::LayerNormCache ln2;
    Matrix h2;
    Matrix ffn_pre;
    Matrix ffn_mask;
    Matrix ffn_act;  // GELU output after dropout
};

struct ForwardTrace {
    Matrix patches;
    std::vector<BlockTrace> blocks;
    Matrix encoded;                 // output of the last block
    Matrix head_in;                 // 1 x (D+2)
    Matrix head_pre;                // 1 x D
    Matrix head_mask;
    Matrix head_act;                // after dropout
    double logit = 0.0;
    double prob = 0.5;
};

struct BlockOutput {
    Matrix tokens;
    BlockTrace trace;
};

[[nodiscard]] Matrix encoder_block(const Matrix &tokens, const BlockParams &block,
                                   const ModelConfig &cfg, const ForwardOptions &opts,
                                   BlockTrace *trace = nullptr);

/// Returns d(tokens); accumulates parameter gradients into grad.
[[nodiscard]] Matrix encoder_block_backward(const BlockTrace &trace, const BlockParams &block,
                                            const ModelConfig &cfg, const Matrix &d_out,
                                            BlockParams &grad);

/// Head on the class-token row of `tokens`; returns ŷ.
[[nodiscard]] double classify(const Matrix &tokens, double m0, double pt,
                              const ModelParams &params, const ForwardOptions &opts = {},
                              ForwardTrace *trace = nullptr);

[[nodiscard]] ForwardTrace model_forward(const ModelParams &params,
                                         std::span<const double> image, double m0,
                                         double pt, const ForwardOptions &opts = {});

/// Adds dŷ-weighted gradients of every parameter into grad.
void model_backward(const ModelParams &params, const ForwardTrace &trace, double d_prob,
                    ModelParams &grad);

/// Same as model_backward but seeded with d(logit) directly.
void model_backward_logit(const ModelParams &params, const ForwardTrace &trace,
                          double d_logit, ModelParams &grad);

// ---------------------------------------------------------------------------

template <class Self, class F> void ModelParams::visit(Self &self, F &f) {
    using S = std::vector<std::size_t>;
    const std::size_t d = static_cast<std::size_t>(self.config.dim);
    f(std::string_view("embed.E"), S{self.embed.rows(), self.embed.cols()}, self.embed.data());
    f(std::string_view("embed.pos"), S{self.pos.rows(), self.pos.cols()}, self.pos.data());
    f(std::string_view("embed.cls"), S{d}, std::span(self.cls));
    for (std::size_t b = 0; b < self.blocks.size(); ++b) {
        auto &blk = self.blocks[b];
        const std::string p = "block" + std::to_string(b) + ".";
        f(std::string_view(p + "ln1.gamma"), S{d}, std::span(blk.ln1_gamma));
        f(std::string_view(p + "ln1.beta"), S{d}, std::span(blk.ln1_beta));
        if (self.config.attention == AttentionKind::kQuantum) {
            f(std::string_view(p + "attn.w_qk"), S{blk.quantum.w_qk.num_angles()},
              blk.quantum.w_qk.angles());
            f(std::string_view(p + "attn.w_v"), S{blk.quantum.w_v.num_angles()},
              blk.quantum.w_v.angles());
        } else {
            f(std::string_view(p + "attn.wq"), S{d, d}, blk.classical.wq.data());
            f(std::string_view(p + "attn.wk"), S{d, d}, blk.classical.wk.data());
            f(std::string_view(p + "attn.wv"), S{d, d}, blk.classical.wv.data());
        }
        f(std::string_view(p + "ln2.gamma"), S{d}, std::span(blk.ln2_gamma));
        f(std::string_view(p + "ln2.beta"), S{d}, std::span(blk.ln2_beta));
        f(std::string_view(p + "ffn.w1"), S{blk.ffn_w1.rows(), blk.ffn_w1.cols()},
          blk.ffn_w1.data());
        f(std::string_view(p + "ffn.b1"), S{blk.ffn_b1.size()}, std::span(blk.ffn_b1));
        f(std::string_view(p + "ffn.w2"), S{blk.ffn_w2.rows(), blk.ffn_w2.cols()},
          blk.ffn_w2.data());
        f(std::string_view(p + "ffn.b2"), S{blk.ffn_b2.size()}, std::span(blk.ffn_b2));
    }
    f(std::string_view("head.w1"), S{self.head_w1.rows(), self.head_w1.cols()},
      self.head_w1.data());
    f(std::string_view("head.b1"), S{self.head_b1.size()}, std::span(self.head_b1));
    f(std::string_view("head.w2"), S{self.head_w2.size()}, std::span(self.head_w2));
    f(std::string_view("head.b2"), S{self.head_b2.size()}, std::span(self.head_b2));
}

} // namespace qvit::model
