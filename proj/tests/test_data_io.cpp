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

#include "qvit/checkpoint.hpp"
#include "qvit/data.hpp"
#include "qvit/errors.hpp"
#include "qvit/io.hpp"
#include "qvit/run_config.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

using namespace qvit;
using namespace qvit::data;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string &name)
        : path(fs::temp_directory_path() / ("qvit_test_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

/// Sample identity across splits: the first pixels plus the aux pair.
std::vector<double> fingerprint(const Dataset &d, std::size_t i) {
    std::vector<double> f(d.image(i).begin(), d.image(i).begin() + 8);
    f.push_back(d.m0[i]);
    f.push_back(d.pt[i]);
    return f;
}

/// Logistic regression on (m0, pT) by full-batch gradient descent.
double aux_only_auc(const Dataset &train, const Dataset &test) {
    double w0 = 0, w1 = 0, b = 0;
    for (int it = 0; it < 3000; ++it) {
        double g0 = 0, g1 = 0, gb = 0;
        for (std::size_t i = 0; i < train.size(); ++i) {
            const double p = 1 / (1 + std::exp(-(w0 * train.m0[i] + w1 * train.pt[i] + b)));
            const double e = p - train.labels[i];
            g0 += e * train.m0[i];
            g1 += e * train.pt[i];
            gb += e;
        }
        const double s = 1.0 / static_cast<double>(train.size());
        w0 -= 2.0 * g0 * s;
        w1 -= 2.0 * g1 * s;
        b -= 2.0 * gb * s;
    }
    std::vector<double> scores;
    std::vector<int> labels;
    for (std::size_t i = 0; i < test.size(); ++i) {
        scores.push_back(w0 * test.m0[i] + w1 * test.pt[i] + b);
        labels.push_back(test.labels[i]);
    }
    return oracle::brute_force_auc(scores, labels);
}

} // namespace

TEST_SUITE("data") {

TEST_CASE("generator balances classes and is reproducible") {
    const GeneratorConfig cfg{100, 16, 7};
    const Dataset a = generate_samples(cfg);
    REQUIRE(a.size() == 100);
    CHECK(std::count(a.labels.begin(), a.labels.end(), 1) == 50);
    CHECK(a.images.size() == 100u * 16 * 16 * 3);
    CHECK(generate_samples(cfg) == a);
    CHECK_FALSE(generate_samples({100, 16, 8}) == a);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto img = a.image(i);
        CHECK(*std::min_element(img.begin(), img.end()) >= 0.0f);
        CHECK(*std::max_element(img.begin(), img.end()) > 0.0f);
        CHECK(*std::max_element(img.begin(), img.end()) <= 1.0f);
        CHECK(a.m0[i] > 0.0);
        CHECK(a.pt[i] > 0.0);
    }
    CHECK_THROWS_AS((void)generate_samples({5, 16, 1}), DomainError);
    CHECK_THROWS_AS((void)generate_samples({100, 2, 1}), DomainError);
}

TEST_CASE("samples do not depend on the total count") {
    const Dataset small = generate_samples({20, 8, 3});
    const Dataset large = generate_samples({40, 8, 3});
    for (std::size_t i = 0; i < small.size(); ++i) {
        CHECK(fingerprint(small, i) == fingerprint(large, i));
    }
}

TEST_CASE("split sizes") {
    auto c = split_counts(100);
    CHECK(c.train == 70);
    CHECK(c.val == 15);
    CHECK(c.test == 15);
    c = split_counts(10);
    CHECK(c.train == 7);
    CHECK(c.val == 1);
    CHECK(c.test == 2);
    c = split_counts(2000);
    CHECK(c.train + c.val + c.test == 2000);
    CHECK(c.train == 1400);
}

TEST_CASE("splits are a disjoint cover of the samples") {
    const Dataset all = generate_samples({100, 8, 4});
    const Splits s = split_dataset(all, 4);
    CHECK(s.train.size() == 70);
    CHECK(s.val.size() == 15);
    CHECK(s.test.size() == 15);
    std::set<std::vector<double>> seen;
    for (const Dataset *d : {&s.train, &s.val, &s.test}) {
        for (std::size_t i = 0; i < d->size(); ++i) {
            CHECK(seen.insert(fingerprint(*d, i)).second);
        }
    }
    std::set<std::vector<double>> original;
    for (std::size_t i = 0; i < all.size(); ++i) {
        original.insert(fingerprint(all, i));
    }
    CHECK(seen == original);
    const Splits again = split_dataset(all, 4);
    CHECK(again.train == s.train);
    CHECK_FALSE(split_dataset(all, 5).train == s.train);
}

TEST_CASE("min-max scaling uses training bounds") {
    Dataset d;
    d.image_size = 4;
    for (double v : {10.0, 20.0, 30.0}) {
        JetSample s;
        s.image.assign(4 * 4 * 3, 0.0f);
        s.m0 = v;
        s.pt = v * 2;
        d.push_back(s);
    }
    const MinMaxParams p = fit_minmax(d);
    CHECK(p.m0_min == 10.0);
    CHECK(p.m0_max == 30.0);
    const Dataset scaled = apply_minmax(d, p);
    CHECK(scaled.m0 == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(scaled.pt == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(apply_minmax(35.0, 10.0, 30.0) == 1.25);
    CHECK(apply_minmax(5.0, 10.0, 30.0) == -0.25);
    d.m0 = {3.0, 3.0, 3.0};
    CHECK_THROWS_AS((void)fit_minmax(d), DomainError);
    CHECK_THROWS_AS((void)fit_minmax(Dataset{}), DomainError);
}

TEST_CASE("push_back rejects a wrongly sized image") {
    Dataset d;
    d.image_size = 4;
    JetSample s;
    s.image.assign(10, 0.0f);
    CHECK_THROWS_AS(d.push_back(s), DimensionError);
}

TEST_CASE("dataset directory round trip is bit exact") {
    TempDir tmp("dataset");
    const auto m = generate_dataset(tmp.path / "ds", {60, 8, 11});
    CHECK(m.n_train == 42);
    CHECK(m.n_val == 9);
    CHECK(m.n_test == 9);
    REQUIRE(m.scaling.has_value());
    const auto loaded = load_dataset(tmp.path / "ds");
    const Splits expect = split_dataset(generate_samples({60, 8, 11}), 11);
    CHECK(loaded.raw.train == expect.train);
    CHECK(loaded.raw.val == expect.val);
    CHECK(loaded.raw.test == expect.test);
    CHECK(loaded.manifest.scaling == fit_minmax(expect.train));
    CHECK(loaded.manifest.seed == 11);
    const Splits sc = loaded.scaled();
    CHECK(*std::min_element(sc.train.m0.begin(), sc.train.m0.end()) == 0.0);
    CHECK(*std::max_element(sc.train.m0.begin(), sc.train.m0.end()) == 1.0);
    CHECK(fs::file_size(tmp.path / "ds" / "images.bin") == 60u * 8 * 8 * 3 * 4);
    CHECK(fs::file_size(tmp.path / "ds" / "aux.bin") == 60u * 2 * 4);
    CHECK(fs::file_size(tmp.path / "ds" / "labels.bin") == 60u);

    TempDir again("dataset_again");
    (void)generate_dataset(again.path / "ds", {60, 8, 11});
    for (const char *f : {"manifest", "images.bin", "aux.bin", "labels.bin"}) {
        CHECK(io::read_binary_file(tmp.path / "ds" / f) ==
              io::read_binary_file(again.path / "ds" / f));
    }
}

TEST_CASE("corrupted datasets are rejected") {
    TempDir tmp("dataset_bad");
    const fs::path ds = tmp.path / "ds";
    (void)generate_dataset(ds, {20, 8, 12});
    const auto manifest = io::read_text_file(ds / "manifest");

    CHECK_THROWS_AS((void)load_dataset(tmp.path / "missing"), IoError);

    auto images = io::read_binary_file(ds / "images.bin");
    images.pop_back();
    io::write_binary_file(ds / "images.bin", images);
    CHECK_THROWS_AS((void)load_dataset(ds), FormatError);
    (void)generate_dataset(ds, {20, 8, 12});

    std::string bad = manifest;
    bad.replace(bad.find("n_train = 14"), 12, "n_train = 15");
    io::write_text_file(ds / "manifest", bad);
    CHECK_THROWS_AS((void)load_dataset(ds), FormatError);

    bad = manifest;
    bad.replace(bad.find("version = 1"), 11, "version = 9");
    io::write_text_file(ds / "manifest", bad);
    CHECK_THROWS_AS((void)load_dataset(ds), FormatError);

    io::write_text_file(ds / "manifest", manifest);
    auto labels = io::read_binary_file(ds / "labels.bin");
    labels[0] = 7;
    io::write_binary_file(ds / "labels.bin", labels);
    CHECK_THROWS_AS((void)load_dataset(ds), FormatError);
}

TEST_CASE("auxiliary features alone carry partial information") {
    const auto all = generate_samples({2000, 16, 1});
    const auto s = split_dataset(all, 1);
    const auto p = fit_minmax(s.train);
    const double auc = aux_only_auc(apply_minmax(s.train, p), apply_minmax(s.test, p));
    CHECK(auc > 0.6);
    CHECK(auc < 0.9);
}

} // TEST_SUITE

TEST_SUITE("io") {

TEST_CASE("key-value text round trip") {
    io::KeyValues kv;
    kv.set("b", "2");
    kv.set("a", "x y");
    kv.set("b", "3");
    CHECK(kv.entries().size() == 2);
    CHECK(kv.at("b") == "3");
    const auto back = io::KeyValues::parse(kv.to_text(), "test");
    CHECK(back.entries() == kv.entries());
    CHECK(back.get_int("b") == 3);
    CHECK_THROWS_AS((void)back.at("c"), FormatError);
    CHECK_THROWS_AS((void)back.get_double("a"), FormatError);
    const auto parsed = io::KeyValues::parse("# comment\n\n k = v \n", "test");
    CHECK(parsed.at("k") == "v");
    CHECK_THROWS_AS((void)io::KeyValues::parse("novalue\n", "test"), FormatError);
}

TEST_CASE("numbers survive text formatting exactly") {
    oracle::Gen g(80);
    for (int i = 0; i < 100; ++i) {
        const double v = g.normal(1e3);
        CHECK(io::parse_double(io::format_double(v), "v") == v);
    }
    CHECK_THROWS_AS((void)io::parse_double("1.5x", "v"), FormatError);
    CHECK_THROWS_AS((void)io::parse_int("4.2", "v"), FormatError);
}

TEST_CASE("little-endian encodings") {
    std::vector<std::uint8_t> b;
    io::append_f32_le(b, 1.0f);
    CHECK(b == std::vector<std::uint8_t>{0x00, 0x00, 0x80, 0x3f});
    io::append_f64_le(b, -2.0);
    CHECK(io::read_f32_le(b.data()) == 1.0f);
    CHECK(io::read_f64_le(b.data() + 4) == -2.0);
    CHECK(b[11] == 0xc0);
}

TEST_CASE("missing files raise I/O errors") {
    CHECK_THROWS_AS((void)io::read_text_file("/nonexistent/qvit/file"), IoError);
    CHECK_THROWS_AS((void)io::read_binary_file("/nonexistent/qvit/file"), IoError);
}

} // TEST_SUITE

TEST_SUITE("checkpoint") {

TEST_CASE("checkpoints round trip bit exactly for both models") {
    TempDir tmp("checkpoint");
    for (auto kind : {model::AttentionKind::kQuantum, model::AttentionKind::kClassical}) {
        model::ModelConfig c;
        c.attention = kind;
        c.n_blocks = 2;
        const auto p = model::init_params(c, 40);
        io::KeyValues meta;
        meta.set("epoch", "3");
        const auto dir = tmp.path / model::to_string(kind);
        model::save_checkpoint(dir, p, meta);
        const auto ck = model::load_checkpoint(dir);
        CHECK(ck.params.config == c);
        CHECK(ck.params.flatten() == p.flatten());
        CHECK(ck.metadata.at("epoch") == "3");
        CHECK(fs::file_size(dir / "params.bin") == p.num_values() * 8);
    }
}

TEST_CASE("damaged checkpoints are rejected") {
    TempDir tmp("checkpoint_bad");
    const auto p = model::init_params(model::ModelConfig{}, 41);
    model::save_checkpoint(tmp.path, p);
    auto bin = io::read_binary_file(tmp.path / "params.bin");
    bin.resize(bin.size() - 8);
    io::write_binary_file(tmp.path / "params.bin", bin);
    CHECK_THROWS_AS((void)model::load_checkpoint(tmp.path), FormatError);
    CHECK_THROWS_AS((void)model::load_checkpoint(tmp.path / "nope"), IoError);
}

} // TEST_SUITE

TEST_SUITE("run_config") {

TEST_CASE("run configuration round trip and overrides") {
    cli::RunConfig rc;
    rc.model.attention = model::AttentionKind::kClassical;
    rc.train.adam.learning_rate = 2.5e-3;
    rc.data = "some/dir";
    const auto kv = rc.to_key_values();
    CHECK(kv.at("model") == "vit");
    std::vector<std::string> keys;
    for (const auto &[k, v] : kv.entries()) {
        keys.push_back(k);
    }
    CHECK(keys == cli::run_config_keys());
    cli::RunConfig back;
    back.apply(kv);
    CHECK(back.to_text() == rc.to_text());
    back.apply_text("dim = 16\nepochs = 3\n", "override");
    CHECK(back.model.dim == 16);
    CHECK(back.train.epochs == 3);
    CHECK_THROWS_AS(back.apply_text("colour = red\n", "override"), FormatError);
    CHECK_THROWS_AS(back.apply_text("dim = many\n", "override"), FormatError);
}

} // TEST_SUITE
