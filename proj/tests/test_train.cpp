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
#include "qvit/io.hpp"
#include "qvit/train.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

using namespace qvit;
using namespace qvit::train;

namespace {

/// Two classes that differ in total intensity and in m0.
data::Dataset toy_dataset(std::size_t n, std::uint64_t seed) {
    oracle::Gen g(seed);
    data::Dataset d;
    d.image_size = 8;
    for (std::size_t i = 0; i < n; ++i) {
        data::JetSample s;
        s.label = static_cast<int>(i % 2);
        s.image.resize(8 * 8 * 3);
        const double level = s.label ? 0.7 : 0.2;
        for (auto &v : s.image) {
            v = static_cast<float>(std::max(0.0, level + g.normal(0.1)));
        }
        s.m0 = (s.label ? 0.7 : 0.3) + g.normal(0.05);
        s.pt = g.uniform(0.0, 1.0);
        d.push_back(s);
    }
    return d;
}

model::ModelConfig toy_model(model::AttentionKind kind) {
    model::ModelConfig c;
    c.image_size = 8;
    c.patch_size = 4;
    c.dim = 4;
    c.attention = kind;
    return c;
}

GradSample toy_sample(std::uint64_t seed, int image_size) {
    oracle::Gen g(seed);
    GradSample s;
    s.image.resize(static_cast<std::size_t>(image_size * image_size * 3));
    for (auto &v : s.image) {
        v = g.uniform(0.0, 1.0);
    }
    s.m0 = 0.4;
    s.pt = 0.6;
    s.label = 1;
    return s;
}

} // namespace

TEST_SUITE("train") {

TEST_CASE("binary cross-entropy values") {
    CHECK(bce_loss(0.5, 1).loss == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    CHECK(bce_loss(0.5, 0).loss == doctest::Approx(std::numbers::ln2).epsilon(1e-15));
    CHECK(bce_loss(0.9, 1).loss == doctest::Approx(-std::log(0.9)).epsilon(1e-15));
    CHECK(bce_loss(0.9, 0).loss == doctest::Approx(-std::log(0.1)).epsilon(1e-13));
    CHECK(bce_loss(0.0, 1).loss == doctest::Approx(-std::log(kProbClamp)).epsilon(1e-12));
    CHECK(std::isfinite(bce_loss(1.0, 0).loss));
    CHECK(bce_loss(1.0, 0).loss == doctest::Approx(-std::log(kProbClamp)).epsilon(1e-6));
}

TEST_CASE("binary cross-entropy gradient") {
    for (double p : {0.05, 0.3, 0.5, 0.81, 0.99}) {
        for (int y : {0, 1}) {
            const double h = 1e-7;
            const double fd = (bce_loss(p + h, y).loss - bce_loss(p - h, y).loss) / (2 * h);
            CHECK(oracle::rel_err(bce_loss(p, y).grad, fd) < 1e-6);
        }
    }
    CHECK(std::isfinite(bce_loss(0.0, 1).grad));
}

TEST_CASE("adam with zero gradient leaves parameters in place") {
    std::vector<double> p = {1.0, -2.0, 0.5};
    const std::vector<double> g(3, 0.0);
    AdamState s(3);
    adam_step(p, g, s, {});
    CHECK(p == std::vector<double>{1.0, -2.0, 0.5});
    CHECK(s.step == 1);
}

TEST_CASE("first adam step moves each parameter by the learning rate") {
    std::vector<double> p = {1.0, -2.0, 0.5};
    const std::vector<double> g = {3.0, -0.01, 200.0};
    AdamState s(3);
    AdamConfig c;
    c.learning_rate = 1e-3;
    adam_step(p, g, s, c);
    CHECK(p[0] == doctest::Approx(1.0 - 1e-3).epsilon(1e-9));
    CHECK(p[1] == doctest::Approx(-2.0 + 1e-3).epsilon(1e-8));
    CHECK(p[2] == doctest::Approx(0.5 - 1e-3).epsilon(1e-9));
}

TEST_CASE("adam matches a hand-rolled update over several steps") {
    oracle::Gen gen(70);
    std::vector<double> p = gen.vec(5), ref = p;
    std::vector<double> m(5, 0.0), v(5, 0.0);
    AdamState s(5);
    const AdamConfig c{0.01, 0.8, 0.95, 1e-6};
    for (int t = 1; t <= 6; ++t) {
        const auto g = gen.vec(5);
        adam_step(p, g, s, c);
        for (std::size_t i = 0; i < 5; ++i) {
            m[i] = 0.8 * m[i] + 0.2 * g[i];
            v[i] = 0.95 * v[i] + 0.05 * g[i] * g[i];
            const double mh = m[i] / (1 - std::pow(0.8, t));
            const double vh = v[i] / (1 - std::pow(0.95, t));
            ref[i] -= 0.01 * mh / (std::sqrt(vh) + 1e-6);
        }
    }
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(std::abs(p[i] - ref[i]) < 1e-14);
    }
    std::vector<double> wrong(4);
    CHECK_THROWS_AS(adam_step(wrong, std::vector<double>(5), s, c), DimensionError);
}

TEST_CASE("roc auc on small cases") {
    const std::vector<double> s = {0.1, 0.4, 0.35, 0.8};
    const std::vector<int> y = {0, 0, 1, 1};
    CHECK(roc_auc(s, y) == doctest::Approx(0.75));
    CHECK(roc_auc(std::vector<double>{0.1, 0.2, 0.3, 0.4}, std::vector<int>{0, 0, 1, 1}) == 1.0);
    CHECK(roc_auc(std::vector<double>{0.4, 0.3, 0.2, 0.1}, std::vector<int>{0, 0, 1, 1}) == 0.0);
    CHECK(roc_auc(std::vector<double>{0.5, 0.5, 0.5, 0.5}, std::vector<int>{0, 1, 0, 1}) == 0.5);
    CHECK_THROWS_AS((void)roc_auc(std::vector<double>{0.1, 0.2}, std::vector<int>{1, 1}),
                    DomainError);
    CHECK_THROWS_AS((void)roc_auc(std::vector<double>{0.1}, std::vector<int>{1, 0}),
                    DimensionError);
}

TEST_CASE("roc auc agrees with pair counting") {
    oracle::Gen g(71);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = g.integer(2, 50);
        std::vector<double> s(static_cast<std::size_t>(n));
        std::vector<int> y(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            // Coarse scores so ties occur.
            s[static_cast<std::size_t>(i)] = std::round(g.uniform(0, 1) * 8) / 8;
            y[static_cast<std::size_t>(i)] = g.integer(0, 1);
        }
        y[0] = 0;
        y[1] = 1;
        CHECK(std::abs(roc_auc(s, y) - oracle::brute_force_auc(s, y)) < 1e-12);
    }
}

TEST_CASE("accuracy at the default threshold") {
    CHECK(accuracy(std::vector<double>{0.2, 0.7, 0.5, 0.4}, std::vector<int>{0, 1, 1, 1}) ==
          0.75);
    CHECK(accuracy(std::vector<double>{0.9}, std::vector<int>{0}) == 0.0);
    CHECK(accuracy(std::vector<double>{0.9}, std::vector<int>{0}, 0.95) == 1.0);
    CHECK_THROWS_AS((void)accuracy(std::vector<double>{}, std::vector<int>{}), DimensionError);
}

TEST_CASE("metrics csv round trip") {
    const auto dir = std::filesystem::temp_directory_path() / "qvit_test_metrics";
    std::filesystem::create_directories(dir);
    const auto path = dir / "metrics.csv";
    std::filesystem::remove(path);
    const std::vector<MetricsRecord> recs = {{1, "train", 0.69, 0.5, 0.51},
                                             {1, "val", 0.6, 0.625, 0.7}};
    write_metrics_csv(path, recs);
    append_metrics_csv(path, {2, "train", 0.5, 0.75, 0.8});
    const auto back = read_metrics_csv(path);
    REQUIRE(back.size() == 3);
    CHECK(back[1].split == "val");
    CHECK(back[1].accuracy == 0.625);
    CHECK(back[2].epoch == 2);
    CHECK(metrics_csv_header() == "epoch,split,loss,accuracy,auc");
    CHECK(metrics_csv_row(recs[0]) == "1,train,0.690000,0.500000,0.510000");
    io::write_text_file(path, "epoch,loss\n1,2\n");
    CHECK_THROWS_AS((void)read_metrics_csv(path), FormatError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("gradient check passes for both models") {
    for (auto kind : {model::AttentionKind::kQuantum, model::AttentionKind::kClassical}) {
        const auto cfg = toy_model(kind);
        const auto p = model::init_params(cfg, 21);
        const auto s = toy_sample(22, cfg.image_size);
        const auto r = grad_check(p, s);
        CHECK(r.passed);
        CHECK(r.worst < r.tolerance);
        CHECK(!r.groups.empty());
        GradCheckOptions o;
        o.training = true;
        o.dropout_seed = 5;
        CHECK(grad_check(p, s, o).passed);
    }
}

TEST_CASE("gradient check catches a corrupted gradient") {
    const auto cfg = toy_model(model::AttentionKind::kQuantum);
    const auto p = model::init_params(cfg, 23);
    GradCheckOptions o;
    o.corrupt = [](model::ModelParams &g) { g.head_b2[0] += 1e-2; };
    const auto r = grad_check(p, toy_sample(24, cfg.image_size), o);
    CHECK_FALSE(r.passed);
    bool flagged = false;
    for (const auto &grp : r.groups) {
        if (grp.name == "head.b2") {
            flagged = grp.max_rel_err > o.tolerance;
        }
    }
    CHECK(flagged);
}

TEST_CASE("training records two rows per epoch and keeps the best model") {
    const auto tr = toy_dataset(40, 30), va = toy_dataset(20, 31);
    TrainConfig c;
    c.epochs = 2;
    c.batch_size = 8;
    int calls = 0;
    const auto r = train_loop(model::init_params(toy_model(model::AttentionKind::kQuantum), 1),
                              tr, va, c, [&](const MetricsRecord &a, const MetricsRecord &b) {
                                  ++calls;
                                  CHECK(a.split == "train");
                                  CHECK(b.split == "val");
                              });
    CHECK(calls == 2);
    REQUIRE(r.records.size() == 4);
    CHECK(r.records[2].epoch == 2);
    CHECK(r.best_epoch >= 1);
    CHECK(r.best_val_auc == r.records[static_cast<std::size_t>(2 * r.best_epoch - 1)].auc);
    CHECK(evaluate(r.best, va).auc == doctest::Approx(r.best_val_auc).epsilon(1e-12));
}

TEST_CASE("training is deterministic for a seed and independent of threads") {
    const auto tr = toy_dataset(30, 32), va = toy_dataset(10, 33);
    TrainConfig c;
    c.epochs = 2;
    c.batch_size = 7;
    const auto init = model::init_params(toy_model(model::AttentionKind::kClassical), 2);
    const auto a = train_loop(init, tr, va, c);
    const auto b = train_loop(init, tr, va, c);
    c.threads = 3;
    const auto t = train_loop(init, tr, va, c);
    c.threads = 1;
    c.seed = 99;
    const auto d = train_loop(init, tr, va, c);
    CHECK(a.last.flatten() == b.last.flatten());
    CHECK(a.last.flatten() == t.last.flatten());
    CHECK(a.last.flatten() != d.last.flatten());
}

TEST_CASE("loss decreases on a separable problem") {
    const auto tr = toy_dataset(64, 34), va = toy_dataset(32, 35);
    for (auto kind : {model::AttentionKind::kQuantum, model::AttentionKind::kClassical}) {
        TrainConfig c;
        c.epochs = 12;
        c.batch_size = 8;
        c.adam.learning_rate = 1e-2;
        const auto r = train_loop(model::init_params(toy_model(kind), 3), tr, va, c);
        CHECK(r.records.back().loss < r.records[1].loss);
        CHECK(r.records[4].loss < r.records[0].loss);
        CHECK(r.best_val_auc > 0.9);
    }
}

TEST_CASE("invalid training configurations are rejected") {
    const auto tr = toy_dataset(4, 36);
    const auto p = model::init_params(toy_model(model::AttentionKind::kQuantum), 4);
    TrainConfig c;
    c.epochs = 0;
    CHECK_THROWS_AS((void)train_loop(p, tr, tr, c), DomainError);
    c = {};
    c.adam.beta1 = 1.0;
    CHECK_THROWS_AS((void)train_loop(p, tr, tr, c), DomainError);
    c = {};
    CHECK_THROWS_AS((void)train_loop(p, tr, data::Dataset{}, c), DomainError);
}

} // TEST_SUITE
