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
#include "oracles.hpp"

#include "qvit/errors.hpp"
#include "qvit/layers.hpp"
#include "qvit/model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace qvit;
using namespace qvit::model;

namespace {

ModelConfig toy_config(AttentionKind kind) {
    ModelConfig c;
    c.image_size = 16;
    c.channels = 3;
    c.patch_size = 8; // 4 patches, S = 5
    c.dim = 4;
    c.dropout = 0.5;
    c.attention = kind;
    return c;
}

std::vector<double> random_image(oracle::Gen &g, const ModelConfig &c) {
    std::vector<double> img(c.image_len());
    for (auto &v : img) {
        v = g.uniform(0.0, 1.0);
    }
    return img;
}

/// Every parameter perturbed with a five-point stencil on the output
/// probability, compared against model_backward with d_prob = 1.
double full_model_fd_error(ModelParams params, const std::vector<double> &img, bool training,
                           double *worst_abs = nullptr) {
    auto forward = [&](ModelParams &p) {
        Rng rng(7);
        ForwardOptions o{training, &rng, false};
        return model_forward(p, img, 0.3, 0.7, o).prob;
    };
    Rng rng(7);
    ForwardOptions o{training, &rng, false};
    const auto trace = model_forward(params, img, 0.3, 0.7, o);
    ModelParams grad(params.config);
    grad.set_zero();
    model_backward(params, trace, 1.0, grad);
    const auto analytic = grad.flatten();
    auto flat = params.flatten();
    double worst = 0.0;
    double worst_a = 0.0;
    for (std::size_t k = 0; k < flat.size(); ++k) {
        const double keep = flat[k];
        auto at = [&](double offset) {
            flat[k] = keep + offset;
            params.unflatten(flat);
            return forward(params);
        };
        const double h = 1e-4;
        const double fd = (8.0 * (at(h) - at(-h)) - (at(2 * h) - at(-2 * h))) / (12.0 * h);
        flat[k] = keep;
        params.unflatten(flat);
        worst = std::max(worst, oracle::rel_err(analytic[k], fd, 1e-6));
        worst_a = std::max(worst_a, std::abs(analytic[k] - fd));
    }
    if (worst_abs) {
        *worst_abs = worst_a;
    }
    return worst;
}

} // namespace

TEST_SUITE("layers") {

TEST_CASE("layer norm output has zero mean and unit variance per row") {
    oracle::Gen g(50);
    const Matrix x = g.matrix(3, 6, 4.0);
    const std::vector<double> gamma(6, 1.0), beta(6, 0.0);
    const Matrix y = layers::layer_norm_forward(x, gamma, beta);
    for (std::size_t i = 0; i < 3; ++i) {
        double m = 0, v = 0;
        for (double e : y.row(i)) {
            m += e;
        }
        m /= 6;
        for (double e : y.row(i)) {
            v += (e - m) * (e - m);
        }
        v /= 6;
        CHECK(std::abs(m) < 1e-14);
        CHECK(std::abs(v - 1.0) < 1e-5);
    }
}

TEST_CASE("layer norm gradients match central differences") {
    oracle::Gen g(51);
    Matrix x = g.matrix(3, 5);
    auto gamma = g.vec(5), beta = g.vec(5);
    const Matrix w = g.matrix(3, 5);
    auto loss = [&] {
        const Matrix y = layers::layer_norm_forward(x, gamma, beta);
        double s = 0;
        for (std::size_t k = 0; k < y.size(); ++k) {
            s += y.data()[k] * w.data()[k];
        }
        return s;
    };
    layers::LayerNormCache cache;
    (void)layers::layer_norm_forward(x, gamma, beta, &cache);
    std::vector<double> dg(5, 0.0), db(5, 0.0);
    const Matrix dx = layers::layer_norm_backward(cache, gamma, w, dg, db);
    for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(oracle::rel_err(dx.data()[k], oracle::central_difference(loss, x.data()[k], 1e-5), 1e-6) < 1e-6);
    }
    for (std::size_t k = 0; k < 5; ++k) {
        CHECK(oracle::rel_err(dg[k], oracle::central_difference(loss, gamma[k], 1e-5), 1e-6) < 1e-6);
        CHECK(oracle::rel_err(db[k], oracle::central_difference(loss, beta[k], 1e-5), 1e-6) < 1e-6);
    }
}

TEST_CASE("gelu values and derivative") {
    CHECK(layers::gelu(0.0) == 0.0);
    CHECK(layers::gelu(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
    CHECK(layers::gelu(-1.0) == doctest::Approx(-0.15865525393145707).epsilon(1e-14));
    for (double x : {-3.0, -0.5, 0.0, 0.4, 2.5}) {
        const double fd = (layers::gelu(x + 1e-6) - layers::gelu(x - 1e-6)) / 2e-6;
        CHECK(std::abs(layers::gelu_grad(x) - fd) < 1e-8);
    }
}

TEST_CASE("linear layer matches loops and its gradients") {
    oracle::Gen g(52);
    Matrix x = g.matrix(2, 3);
    Matrix w = g.matrix(4, 3);
    auto b = g.vec(4);
    const Matrix y = layers::linear_forward(x, w, b);
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t o = 0; o < 4; ++o) {
            double ref = b[o];
            for (std::size_t k = 0; k < 3; ++k) {
                ref += w(o, k) * x(i, k);
            }
            CHECK(std::abs(y(i, o) - ref) < 1e-14);
        }
    }
    const Matrix up = g.matrix(2, 4);
    Matrix dw(4, 3);
    std::vector<double> db(4, 0.0);
    const Matrix dx = layers::linear_backward(x, w, up, dw, db);
    auto loss = [&] {
        const Matrix out = layers::linear_forward(x, w, b);
        double s = 0;
        for (std::size_t k = 0; k < out.size(); ++k) {
            s += out.data()[k] * up.data()[k];
        }
        return s;
    };
    for (std::size_t k = 0; k < x.size(); ++k) {
        CHECK(oracle::rel_err(dx.data()[k], oracle::central_difference(loss, x.data()[k], 1e-5)) < 1e-8);
    }
    for (std::size_t k = 0; k < w.size(); ++k) {
        CHECK(oracle::rel_err(dw.data()[k], oracle::central_difference(loss, w.data()[k], 1e-5)) < 1e-8);
    }
    CHECK_THROWS_AS((void)layers::linear_forward(x, Matrix(4, 2), b), DimensionError);
}

TEST_CASE("dropout mask keeps the expected fraction and scales survivors") {
    Rng rng(3);
    const Matrix m = layers::dropout_mask(100, 100, 0.5, rng);
    std::size_t kept = 0;
    for (double v : m.data()) {
        CHECK((v == 0.0 || v == 2.0));
        kept += v > 0 ? 1 : 0;
    }
    CHECK(kept > 4700);
    CHECK(kept < 5300);
}

TEST_CASE("sigmoid is stable at the extremes") {
    CHECK(layers::sigmoid(0.0) == 0.5);
    CHECK(layers::sigmoid(800.0) == 1.0);
    CHECK(layers::sigmoid(-800.0) == 0.0);
    CHECK(std::isfinite(layers::sigmoid(-800.0)));
}

} // TEST_SUITE

TEST_SUITE("model") {

TEST_CASE("config validation and derived sizes") {
    ModelConfig c;
    CHECK(c.n_patches() == 16);
    CHECK(c.patch_len() == 48);
    CHECK(c.seq_len() == 17);
    c.patch_size = 5;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.patch_size = 4;
    c.n_heads = 2;
    CHECK_THROWS_AS(c.validate(), DomainError);
    c.n_heads = 1;
    c.dim = 1;
    CHECK_THROWS_AS(c.validate(), DomainError);
    CHECK(parse_attention_kind("vit") == AttentionKind::kClassical);
    CHECK(parse_attention_kind("qvit") == AttentionKind::kQuantum);
    CHECK_THROWS_AS((void)parse_attention_kind("mlp"), DomainError);
}

TEST_CASE("125-pixel images give 25 patches of 1875 values") {
    ModelConfig c;
    c.image_size = 125;
    c.patch_size = 25;
    std::vector<double> img(c.image_len(), 0.0);
    const Matrix p = extract_patches(img, c);
    CHECK(p.rows() == 25);
    CHECK(p.cols() == 1875);
}

TEST_CASE("patch layout is row-major with channel fastest") {
    ModelConfig c; // 16 x 16 x 3, patch 4
    std::vector<double> img(c.image_len());
    for (std::size_t k = 0; k < img.size(); ++k) {
        img[k] = static_cast<double>(k);
    }
    const Matrix p = extract_patches(img, c);
    CHECK(p.rows() == 16);
    CHECK(p.cols() == 48);
    for (std::size_t pr = 0; pr < 4; ++pr) {
        for (std::size_t pc = 0; pc < 4; ++pc) {
            for (std::size_t r = 0; r < 4; ++r) {
                for (std::size_t q = 0; q < 4; ++q) {
                    for (std::size_t ch = 0; ch < 3; ++ch) {
                        const std::size_t y = pr * 4 + r, x = pc * 4 + q;
                        CHECK(p(pr * 4 + pc, (r * 4 + q) * 3 + ch) == img[(y * 16 + x) * 3 + ch]);
                    }
                }
            }
        }
    }
    const std::vector<double> constant(c.image_len(), 0.25);
    for (double v : extract_patches(constant, c).data()) {
        CHECK(v == 0.25);
    }
    CHECK_THROWS_AS((void)extract_patches(std::vector<double>(10), c), DimensionError);
}

TEST_CASE("embedding matches a per-patch reference") {
    oracle::Gen g(53);
    const auto cfg = toy_config(AttentionKind::kQuantum);
    const auto params = init_params(cfg, 5);
    const auto img = random_image(g, cfg);
    const Matrix patches = extract_patches(img, cfg);
    const Matrix t = embed(patches, params);
    REQUIRE(t.rows() == 5);
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(t(0, k) == params.cls[k] + params.pos(0, k));
    }
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t k = 0; k < 4; ++k) {
            double ref = params.pos(i + 1, k);
            for (std::size_t j = 0; j < patches.cols(); ++j) {
                ref += params.embed(k, j) * patches(i, j);
            }
            CHECK(std::abs(t(i + 1, k) - ref) < 1e-13);
        }
    }
}

TEST_CASE("one-hot embedding rows select single pixels") {
    auto cfg = toy_config(AttentionKind::kClassical);
    ModelParams p(cfg);
    for (std::size_t k = 0; k < 4; ++k) {
        p.embed(k, 5 * k + 1) = 1.0;
    }
    oracle::Gen g(54);
    const Matrix patches = extract_patches(random_image(g, cfg), cfg);
    const Matrix t = embed(patches, p);
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(t(i + 1, k) == patches(i, 5 * k + 1));
        }
    }
}

TEST_CASE("all-zero embedding parameters") {
    auto cfg = toy_config(AttentionKind::kClassical);
    ModelParams p(cfg);
    oracle::Gen g(55);
    const Matrix t = embed(extract_patches(random_image(g, cfg), cfg), p);
    for (double v : t.data()) {
        CHECK(v == 0.0);
    }
    // Classical path passes zeros through; the quantum block refuses them.
    ModelParams q(toy_config(AttentionKind::kQuantum));
    CHECK_THROWS_AS((void)encoder_block(t, q.blocks[0], q.config, {}), DomainError);
    CHECK_NOTHROW((void)encoder_block(t, p.blocks[0], p.config, {}));
}

TEST_CASE("parameter registry names and sizes") {
    for (auto kind : {AttentionKind::kQuantum, AttentionKind::kClassical}) {
        const auto cfg = toy_config(kind);
        const auto p = init_params(cfg, 1);
        std::vector<std::string> names;
        std::size_t total = 0;
        p.for_each([&](std::string_view n, const std::vector<std::size_t> &shape, auto values) {
            names.emplace_back(n);
            std::size_t prod = 1;
            for (auto s : shape) {
                prod *= s;
            }
            CHECK(prod == values.size());
            total += values.size();
        });
        CHECK(total == p.num_values());
        CHECK(names.front() == "embed.E");
        CHECK(names.back() == "head.b2");
        CHECK(std::set<std::string>(names.begin(), names.end()).size() == names.size());
        const bool has_pyramid = std::find(names.begin(), names.end(), "block0.attn.w_qk") != names.end();
        CHECK(has_pyramid == (kind == AttentionKind::kQuantum));
        auto flat = p.flatten();
        ModelParams q(cfg);
        q.unflatten(flat);
        CHECK(q.flatten() == flat);
        CHECK_THROWS_AS(q.unflatten(std::vector<double>(3)), DimensionError);
    }
}

TEST_CASE("classify with zero head is one half, with a huge bias is one") {
    const auto cfg = toy_config(AttentionKind::kQuantum);
    ModelParams p(cfg);
    oracle::Gen g(56);
    const Matrix tokens = g.matrix(5, 4);
    CHECK(classify(tokens, 0.2, 0.9, p) == 0.5);
    p.head_b2[0] = 50.0;
    CHECK(classify(tokens, 0.2, 0.9, p) > 1.0 - 1e-15);
}

TEST_CASE("classify matches a reference MLP") {
    oracle::Gen g(57);
    const auto cfg = toy_config(AttentionKind::kQuantum);
    auto p = init_params(cfg, 9);
    for (auto &v : p.head_b1) {
        v = g.normal();
    }
    p.head_b2[0] = g.normal();
    const Matrix tokens = g.matrix(5, 4);
    const double m0 = 0.4, pt = -0.2;
    std::vector<double> h = {tokens(0, 0), tokens(0, 1), tokens(0, 2), tokens(0, 3), m0, pt};
    double z = p.head_b2[0];
    for (std::size_t o = 0; o < 4; ++o) {
        double a = p.head_b1[o];
        for (std::size_t k = 0; k < 6; ++k) {
            a += p.head_w1(o, k) * h[k];
        }
        z += p.head_w2[o] * 0.5 * a * (1 + std::erf(a / std::sqrt(2.0)));
    }
    CHECK(std::abs(classify(tokens, m0, pt, p) - 1 / (1 + std::exp(-z))) < 1e-14);
}

TEST_CASE("eval mode is deterministic and training mode depends only on the seed") {
    oracle::Gen g(58);
    for (auto kind : {AttentionKind::kQuantum, AttentionKind::kClassical}) {
        const auto cfg = toy_config(kind);
        const auto p = init_params(cfg, 2);
        const auto img = random_image(g, cfg);
        CHECK(model_forward(p, img, 0.1, 0.2).prob == model_forward(p, img, 0.1, 0.2).prob);
        Rng a(11), b(11), c(12);
        const double pa = model_forward(p, img, 0.1, 0.2, {true, &a, false}).prob;
        const double pb = model_forward(p, img, 0.1, 0.2, {true, &b, false}).prob;
        const double pc = model_forward(p, img, 0.1, 0.2, {true, &c, false}).prob;
        CHECK(pa == pb);
        CHECK(pa != pc);
        CHECK_THROWS_AS((void)model_forward(p, img, 0.1, 0.2, {true, nullptr, false}), DomainError);
    }
}

TEST_CASE("both attention kinds share the config and output shapes") {
    oracle::Gen g(59);
    const auto img = random_image(g, toy_config(AttentionKind::kQuantum));
    for (auto kind : {AttentionKind::kQuantum, AttentionKind::kClassical}) {
        const auto p = init_params(toy_config(kind), 3);
        const auto t = model_forward(p, img, 0.5, 0.5);
        CHECK(t.encoded.rows() == 5);
        CHECK(t.encoded.cols() == 4);
        CHECK(t.prob > 0.0);
        CHECK(t.prob < 1.0);
    }
}

TEST_CASE("block with zero FFN output and self-only attention") {
    oracle::Gen g(60);
    const auto cfg = toy_config(AttentionKind::kQuantum);
    auto p = init_params(cfg, 4);
    auto &blk = p.blocks[0];
    blk.ffn_w2.fill(0.0);
    const Matrix tokens = g.matrix(5, 4);
    ForwardOptions o;
    o.self_attention_only = true;
    BlockTrace t;
    const Matrix out = encoder_block(tokens, blk, cfg, o, &t);
    // out = tokens + W_v (LN(tokens) / |LN(tokens)|)
    for (std::size_t i = 0; i < 5; ++i) {
        auto x = std::vector<double>(t.h1.row(i).begin(), t.h1.row(i).end());
        const double n = norm2(x);
        for (auto &v : x) {
            v /= n;
        }
        const auto v = ortho::apply_layer(blk.quantum.w_v, x);
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(std::abs(out(i, k) - tokens(i, k) - v[k]) < 1e-14);
        }
    }
}

TEST_CASE("class token output is isolated from patches under self-only attention") {
    oracle::Gen g(61);
    for (auto kind : {AttentionKind::kQuantum, AttentionKind::kClassical}) {
        const auto cfg = toy_config(kind);
        const auto p = init_params(cfg, 6);
        ForwardOptions o;
        o.self_attention_only = true;
        const double a = model_forward(p, random_image(g, cfg), 0.3, 0.3, o).prob;
        const double b = model_forward(p, random_image(g, cfg), 0.3, 0.3, o).prob;
        CHECK(a == b);
        const double c = model_forward(p, random_image(g, cfg), 0.3, 0.3).prob;
        const double d = model_forward(p, random_image(g, cfg), 0.3, 0.3).prob;
        CHECK(c != d);
    }
}

TEST_CASE("block gradients match central differences") {
    oracle::Gen g(62);
    for (auto kind : {AttentionKind::kQuantum, AttentionKind::kClassical}) {
        auto cfg = toy_config(kind);
        auto p = init_params(cfg, 8);
        Matrix tokens = g.matrix(3, 4);
        const Matrix w = g.matrix(3, 4);
        auto &blk = p.blocks[0];
        auto loss = [&] {
            const Matrix out = encoder_block(tokens, blk, cfg, {});
            double s = 0;
            for (std::size_t k = 0; k < out.size(); ++k) {
                s += out.data()[k] * w.data()[k];
            }
            return s;
        };
        BlockTrace t;
        (void)encoder_block(tokens, blk, cfg, {}, &t);
        ModelParams gp(cfg);
        gp.set_zero();
        const Matrix dx = encoder_block_backward(t, blk, cfg, w, gp.blocks[0]);
        for (std::size_t k = 0; k < tokens.size(); ++k) {
            CHECK(oracle::rel_err(dx.data()[k], oracle::central_difference(loss, tokens.data()[k], 1e-5), 1e-6) < 1e-5);
        }
        for (std::size_t k = 0; k < blk.ffn_w1.size(); ++k) {
            CHECK(oracle::rel_err(gp.blocks[0].ffn_w1.data()[k],
                                  oracle::central_difference(loss, blk.ffn_w1.data()[k], 1e-5), 1e-6) < 1e-5);
        }
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(oracle::rel_err(gp.blocks[0].ln1_gamma[k],
                                  oracle::central_difference(loss, blk.ln1_gamma[k], 1e-5), 1e-6) < 1e-5);
        }
    }
}

TEST_CASE("full model gradients match central differences") {
    oracle::Gen g(63);
    for (auto kind : {AttentionKind::kQuantum, AttentionKind::kClassical}) {
        const auto cfg = toy_config(kind);
        auto p = init_params(cfg, 10);
        p.cls = g.vec(4);
        const auto img = random_image(g, cfg);
        double abs_err = 0.0;
        CHECK(full_model_fd_error(p, img, false, &abs_err) < 1e-5);
        CHECK(abs_err < 1e-8);
        CHECK(full_model_fd_error(p, img, true) < 1e-5);
    }
}

TEST_CASE("two-block models are differentiable as well") {
    oracle::Gen g(64);
    auto cfg = toy_config(AttentionKind::kQuantum);
    cfg.n_blocks = 2;
    auto p = init_params(cfg, 12);
    p.cls = g.vec(4);
    CHECK(full_model_fd_error(p, random_image(g, cfg), false) < 1e-5);
}

TEST_CASE("backward is repeatable and accumulates") {
    oracle::Gen g(65);
    const auto cfg = toy_config(AttentionKind::kQuantum);
    const auto p = init_params(cfg, 13);
    const auto img = random_image(g, cfg);
    const auto t = model_forward(p, img, 0.2, 0.1);
    ModelParams a(cfg), b(cfg), c(cfg);
    a.set_zero();
    b.set_zero();
    c.set_zero();
    model_backward(p, t, 0.7, a);
    model_backward(p, t, 0.7, b);
    CHECK(a.flatten() == b.flatten());
    model_backward(p, t, 0.7, c);
    model_backward(p, t, 0.7, c);
    const auto fa = a.flatten(), fc = c.flatten();
    for (std::size_t k = 0; k < fa.size(); ++k) {
        CHECK(fc[k] == doctest::Approx(2 * fa[k]).epsilon(1e-14));
    }
}

TEST_CASE("initialization statistics") {
    auto cfg = toy_config(AttentionKind::kQuantum);
    cfg.dim = 8;
    const auto p = init_params(cfg, 14);
    const double limit = std::sqrt(6.0 / (48.0 + 8.0));
    for (double v : p.embed.data()) {
        CHECK(std::abs(v) <= limit);
    }
    CHECK(p.blocks[0].ln1_gamma == std::vector<double>(8, 1.0));
    CHECK(p.head_b1 == std::vector<double>(8, 0.0));
    CHECK(init_params(cfg, 14).flatten() == p.flatten());
    CHECK(init_params(cfg, 15).flatten() != p.flatten());
}

} // TEST_SUITE
