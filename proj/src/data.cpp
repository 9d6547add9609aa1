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
#include "qvit/data.hpp"

#include "qvit/errors.hpp"
#include "qvit/io.hpp"
#include "qvit/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace qvit::data {

namespace fs = std::filesystem;

namespace {

/// Class-conditional shape of the synthetic jets. Quark-like jets have fewer,
/// narrower deposits near the axis; gluon-like jets have more, broader ones
/// and a larger hadronic share.
struct JetProfile {
    int min_deposits;
    double extra_deposits;    // Poisson mean
    double spread;            // deposit offset stddev, pixels at 16 px
    double width;             // blob stddev, pixels at 16 px
    double core_boost;        // energy multiplier of the leading deposit
    std::array<double, kChannels> mix;
    double log_m0_mean, log_m0_sd;
    double log_pt_mean, log_pt_sd;
};

constexpr JetProfile kQuark{2, 2.5, 1.4, 0.85, 2.2, {0.50, 0.30, 0.20},
                            2.08, 0.40, 4.09, 0.35};
constexpr JetProfile kGluon{2, 3.5, 1.7, 0.95, 1.7, {0.42, 0.30, 0.28},
                            2.30, 0.40, 4.20, 0.35};

JetSample make_jet(int image_size, int label, Rng &rng) {
    const JetProfile &p = label ? kGluon : kQuark;
    const double scale = image_size / 16.0;
    const double centre = 0.5 * (image_size - 1);
    std::normal_distribution<double> jitter(0.0, 0.4 * scale);
    const double cx = centre + jitter(rng);
    const double cy = centre + jitter(rng);

    std::poisson_distribution<int> extra(p.extra_deposits);
    const int n_dep = p.min_deposits + extra(rng);
    std::normal_distribution<double> offset(0.0, p.spread * scale);
    std::exponential_distribution<double> energy(1.0);
    std::uniform_real_distribution<double> width_jitter(0.85, 1.15);

    const std::size_t w = static_cast<std::size_t>(image_size);
    std::vector<double> img(w * w * kChannels, 0.0);
    for (int d = 0; d < n_dep; ++d) {
        const double x = std::clamp(cx + (d == 0 ? 0.0 : offset(rng)), 0.0, image_size - 1.0);
        const double y = std::clamp(cy + (d == 0 ? 0.0 : offset(rng)), 0.0, image_size - 1.0);
        const double e = (0.2 + energy(rng)) * (d == 0 ? p.core_boost : 1.0);
        const double sigma = p.width * scale * width_jitter(rng);

        // Per-deposit channel fractions: Dirichlet around the class mix.
        std::array<double, kChannels> mix{};
        double total = 0.0;
        for (int c = 0; c < kChannels; ++c) {
            std::gamma_distribution<double> g(10.0 * p.mix[static_cast<std::size_t>(c)], 1.0);
            mix[static_cast<std::size_t>(c)] = g(rng);
            total += mix[static_cast<std::size_t>(c)];
        }
        const int reach = static_cast<int>(std::ceil(3.0 * sigma));
        const int x0 = static_cast<int>(std::lround(x));
        const int y0 = static_cast<int>(std::lround(y));
        for (int r = std::max(0, y0 - reach); r <= std::min(image_size - 1, y0 + reach); ++r) {
            for (int col = std::max(0, x0 - reach); col <= std::min(image_size - 1, x0 + reach);
                 ++col) {
                const double d2 = (r - y) * (r - y) + (col - x) * (col - x);
                const double k = e * std::exp(-0.5 * d2 / (sigma * sigma));
                const std::size_t base =
                    (static_cast<std::size_t>(r) * w + static_cast<std::size_t>(col)) * kChannels;
                for (int c = 0; c < kChannels; ++c) {
                    img[base + static_cast<std::size_t>(c)] +=
                        k * mix[static_cast<std::size_t>(c)] / total;
                }
            }
        }
    }
    // Intensities in [0, ~1]: brightest pixel lands in [0.7, 1].
    const double peak = *std::max_element(img.begin(), img.end());
    std::uniform_real_distribution<double> level(0.7, 1.0);
    const double norm = level(rng) / peak;

    JetSample s;
    s.label = label;
    s.image.resize(img.size());
    for (std::size_t i = 0; i < img.size(); ++i) {
        s.image[i] = static_cast<float>(img[i] * norm);
    }
    std::normal_distribution<double> log_m0(p.log_m0_mean, p.log_m0_sd);
    std::normal_distribution<double> log_pt(p.log_pt_mean, p.log_pt_sd);
    s.m0 = static_cast<float>(std::exp(log_m0(rng)));
    s.pt = static_cast<float>(std::exp(log_pt(rng)));
    return s;
}

std::string join(const std::vector<std::string> &v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + v[i];
    }
    return s;
}

std::vector<std::string> split_list(const std::string &s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        out.push_back(item);
    }
    return out;
}

} // namespace

void Dataset::push_back(const JetSample &s) {
    if (s.image.size() != image_len()) {
        throw DimensionError("Dataset::push_back: image has " + std::to_string(s.image.size()) +
                             " values, expected " + std::to_string(image_len()));
    }
    images.insert(images.end(), s.image.begin(), s.image.end());
    m0.push_back(s.m0);
    pt.push_back(s.pt);
    labels.push_back(static_cast<std::uint8_t>(s.label));
}

JetSample Dataset::sample(std::size_t i) const {
    const auto img = image(i);
    return {{img.begin(), img.end()}, m0.at(i), pt.at(i), labels.at(i)};
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.image_size = image_size;
    out.channels = channels;
    out.images.reserve(indices.size() * image_len());
    for (std::size_t i : indices) {
        out.push_back(sample(i));
    }
    return out;
}

Dataset generate_samples(const GeneratorConfig &cfg) {
    if (cfg.n_samples < 10) {
        throw DomainError("generate_samples: need at least 10 samples");
    }
    if (cfg.image_size < 4) {
        throw DomainError("generate_samples: image_size must be >= 4");
    }
    Dataset d;
    d.image_size = cfg.image_size;
    d.channels = kChannels;
    for (int i = 0; i < cfg.n_samples; ++i) {
        Rng rng(derive_seed(cfg.seed, 0x4A4554ULL, static_cast<std::uint64_t>(i)));
        d.push_back(make_jet(cfg.image_size, i % 2, rng));
    }
    return d;
}

SplitCounts split_counts(std::size_t n) {
    const std::size_t train = n * 70 / 100;
    const std::size_t val = n * 15 / 100;
    return {train, val, n - train - val};
}

Splits split_dataset(const Dataset &all, std::uint64_t seed) {
    std::vector<std::size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(derive_seed(seed, 0x53504C4954ULL));
    std::shuffle(order.begin(), order.end(), rng);
    const auto c = split_counts(all.size());
    const std::span<const std::size_t> o(order);
    return {all.subset(o.subspan(0, c.train)), all.subset(o.subspan(c.train, c.val)),
            all.subset(o.subspan(c.train + c.val))};
}

MinMaxParams fit_minmax(const Dataset &train) {
    if (train.size() == 0) {
        throw DomainError("fit_minmax: empty training set");
    }
    const auto [m0_lo, m0_hi] = std::minmax_element(train.m0.begin(), train.m0.end());
    const auto [pt_lo, pt_hi] = std::minmax_element(train.pt.begin(), train.pt.end());
    MinMaxParams p{*m0_lo, *m0_hi, *pt_lo, *pt_hi};
    if (!(p.m0_max > p.m0_min) || !(p.pt_max > p.pt_min)) {
        throw DomainError("fit_minmax: constant auxiliary feature cannot be scaled");
    }
    return p;
}

double apply_minmax(double v, double lo, double hi) noexcept { return (v - lo) / (hi - lo); }

Dataset apply_minmax(const Dataset &d, const MinMaxParams &p) {
    Dataset out = d;
    for (double &v : out.m0) {
        v = apply_minmax(v, p.m0_min, p.m0_max);
    }
    for (double &v : out.pt) {
        v = apply_minmax(v, p.pt_min, p.pt_max);
    }
    return out;
}

void write_dataset(const fs::path &dir, const Splits &splits, const DatasetManifest &m) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create dataset directory '" + dir.string() + "': " + ec.message());
    }
    io::KeyValues kv;
    kv.set("format", "qvit-jet-dataset");
    kv.set("version", std::to_string(m.version));
    kv.set("generator_seed", std::to_string(m.seed));
    kv.set("image_size", std::to_string(m.image_size));
    kv.set("channels", std::to_string(m.channels));
    kv.set("channel_names", join(m.channel_names));
    kv.set("n_train", std::to_string(m.n_train));
    kv.set("n_val", std::to_string(m.n_val));
    kv.set("n_test", std::to_string(m.n_test));
    kv.set("aux_features", "m0,pT");
    kv.set("scaled", m.scaling ? "minmax" : "none");
    if (m.scaling) {
        kv.set("m0_min", io::format_double(m.scaling->m0_min));
        kv.set("m0_max", io::format_double(m.scaling->m0_max));
        kv.set("pT_min", io::format_double(m.scaling->pt_min));
        kv.set("pT_max", io::format_double(m.scaling->pt_max));
    }
    kv.set("images", "images.bin");
    kv.set("aux", "aux.bin");
    kv.set("labels", "labels.bin");

    std::vector<std::uint8_t> images, aux, labels;
    for (const Dataset *d : {&splits.train, &splits.val, &splits.test}) {
        if (d->size() && (d->image_size != m.image_size || d->channels != m.channels)) {
            throw DimensionError("write_dataset: split shape disagrees with manifest");
        }
        for (float v : d->images) {
            io::append_f32_le(images, v);
        }
        for (std::size_t i = 0; i < d->size(); ++i) {
            io::append_f32_le(aux, static_cast<float>(d->m0[i]));
            io::append_f32_le(aux, static_cast<float>(d->pt[i]));
        }
        labels.insert(labels.end(), d->labels.begin(), d->labels.end());
    }
    io::write_binary_file(dir / "images.bin", images);
    io::write_binary_file(dir / "aux.bin", aux);
    io::write_binary_file(dir / "labels.bin", labels);
    io::write_text_file(dir / "manifest", kv.to_text());
}

DatasetManifest generate_dataset(const fs::path &dir, const GeneratorConfig &cfg) {
    const Dataset all = generate_samples(cfg);
    const Splits splits = split_dataset(all, cfg.seed);
    DatasetManifest m;
    m.seed = cfg.seed;
    m.image_size = cfg.image_size;
    m.channels = kChannels;
    m.channel_names.assign(kChannelNames.begin(), kChannelNames.end());
    m.n_train = splits.train.size();
    m.n_val = splits.val.size();
    m.n_test = splits.test.size();
    m.scaling = fit_minmax(splits.train);
    write_dataset(dir, splits, m);
    return m;
}

Splits LoadedDataset::scaled() const {
    if (!manifest.scaling) {
        return raw;
    }
    return {apply_minmax(raw.train, *manifest.scaling), apply_minmax(raw.val, *manifest.scaling),
            apply_minmax(raw.test, *manifest.scaling)};
}

LoadedDataset load_dataset(const fs::path &dir) {
    const fs::path mpath = dir / "manifest";
    if (!fs::exists(mpath)) {
        throw IoError("no dataset at '" + dir.string() + "' (missing manifest)");
    }
    const auto kv = io::KeyValues::parse(io::read_text_file(mpath), mpath.string());
    auto fail = [&](const std::string &why) { return FormatError(mpath.string() + ": " + why); };
    if (kv.at("format") != "qvit-jet-dataset") {
        throw fail("not a qvit jet dataset");
    }
    LoadedDataset out;
    DatasetManifest &m = out.manifest;
    m.version = static_cast<int>(kv.get_int("version"));
    if (m.version != kFormatVersion) {
        throw fail("unsupported format version " + std::to_string(m.version));
    }
    m.seed = static_cast<std::uint64_t>(kv.get_int("generator_seed"));
    m.image_size = static_cast<int>(kv.get_int("image_size"));
    m.channels = static_cast<int>(kv.get_int("channels"));
    m.channel_names = split_list(kv.at("channel_names"));
    const auto counts = std::array{kv.get_int("n_train"), kv.get_int("n_val"), kv.get_int("n_test")};
    if (m.image_size <= 0 || m.channels <= 0) {
        throw fail("image_size and channels must be positive");
    }
    if (static_cast<int>(m.channel_names.size()) != m.channels) {
        throw fail("channel_names lists " + std::to_string(m.channel_names.size()) +
                   " names for " + std::to_string(m.channels) + " channels");
    }
    for (long long c : counts) {
        if (c < 0) {
            throw fail("negative split count");
        }
    }
    m.n_train = static_cast<std::size_t>(counts[0]);
    m.n_val = static_cast<std::size_t>(counts[1]);
    m.n_test = static_cast<std::size_t>(counts[2]);
    const std::string scaled = kv.at("scaled");
    if (scaled == "minmax") {
        m.scaling = MinMaxParams{kv.get_double("m0_min"), kv.get_double("m0_max"),
                                 kv.get_double("pT_min"), kv.get_double("pT_max")};
    } else if (scaled != "none") {
        throw fail("unknown scaling '" + scaled + "'");
    } else if (kv.contains("m0_min") || kv.contains("pT_min")) {
        throw fail("scaling parameters present but scaled = none");
    }

    const std::size_t n = m.total();
    const std::size_t img_len = static_cast<std::size_t>(m.image_size) * m.image_size * m.channels;
    const auto images = io::read_binary_file(dir / kv.at("images"));
    const auto aux = io::read_binary_file(dir / kv.at("aux"));
    const auto labels = io::read_binary_file(dir / kv.at("labels"));
    auto check_size = [&](const std::string &name, std::size_t got, std::size_t want) {
        if (got != want) {
            throw FormatError((dir / name).string() + ": expected " + std::to_string(want) +
                              " bytes for " + std::to_string(n) + " samples, found " +
                              std::to_string(got));
        }
    };
    check_size(kv.at("images"), images.size(), n * img_len * 4);
    check_size(kv.at("aux"), aux.size(), n * 8);
    check_size(kv.at("labels"), labels.size(), n);

    std::size_t cursor = 0;
    for (auto [split, count] : {std::pair{&out.raw.train, m.n_train},
                                std::pair{&out.raw.val, m.n_val},
                                std::pair{&out.raw.test, m.n_test}}) {
        split->image_size = m.image_size;
        split->channels = m.channels;
        split->images.resize(count * img_len);
        for (std::size_t i = 0; i < count; ++i, ++cursor) {
            const std::uint8_t *src = images.data() + cursor * img_len * 4;
            for (std::size_t k = 0; k < img_len; ++k) {
                split->images[i * img_len + k] = io::read_f32_le(src + 4 * k);
            }
            split->m0.push_back(io::read_f32_le(aux.data() + cursor * 8));
            split->pt.push_back(io::read_f32_le(aux.data() + cursor * 8 + 4));
            const std::uint8_t label = labels[cursor];
            if (label > 1) {
                throw FormatError((dir / kv.at("labels")).string() + ": sample " +
                                  std::to_string(cursor) + " has label " +
                                  std::to_string(label));
            }
            split->labels.push_back(label);
        }
    }
    return out;
}

} // namespace qvit::data
