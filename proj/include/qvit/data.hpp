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
 * Synthetic jet images standing in for the three-channel detector data,
 * the on-disk dataset format, splits and auxiliary-feature scaling.
 *
 * On disk a dataset is a directory with
 *   manifest     key = value text (counts, dims, scaling, seed, version)
 *   images.bin   float32 LE, sample-major, each sample H x W x C (channel fastest)
 *   aux.bin      float32 LE, per sample (m0, pT), unscaled
 *   labels.bin   one byte per sample, 0 = quark-like, 1 = gluon-like
 * Samples are stored as train, then val, then test.
 */
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qvit::data {

inline constexpr int kFormatVersion = 1;
inline constexpr int kChannels = 3;
inline constexpr std::array<std::string_view, kChannels> kChannelNames = {"tracks", "ecal",
                                                                          "hcal"};

struct JetSample {
    std::vector<float> image; // H x W x C
    double m0 = 0.0;
    double pt = 0.0;
    int label = 0;
};

struct Dataset {
    int image_size = 0;
    int channels = kChannels;
    std::vector<float> images;
    std::vector<double> m0;
    std::vector<double> pt;
    std::vector<std::uint8_t> labels;

    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
    [[nodiscard]] std::size_t image_len() const noexcept {
        return static_cast<std::size_t>(image_size) * image_size * channels;
    }
    [[nodiscard]] std::span<const float> image(std::size_t i) const {
        return {images.data() + i * image_len(), image_len()};
    }
    void push_back(const JetSample &s);
    [[nodiscard]] JetSample sample(std::size_t i) const;
    [[nodiscard]] Dataset subset(std::span<const std::size_t> indices) const;

    friend bool operator==(const Dataset &, const Dataset &) = default;
};

struct GeneratorConfig {
    int n_samples = 2000;
    int image_size = 16;
    std::uint64_t seed = 1;
};

/// Balanced (label = index mod 2), fully determined by the seed. Image values
/// and auxiliary features are rounded to float32 so they survive the disk
/// format bit-exactly.
[[nodiscard]] Dataset generate_samples(const GeneratorConfig &cfg);

struct SplitCounts {
    std::size_t train, val, test;
};

/// train = floor(0.70 n), val = floor(0.15 n), test = the rest.
[[nodiscard]] SplitCounts split_counts(std::size_t n);

struct Splits {
    Dataset train, val, test;
};

/// Seeded shuffle, then partition per split_counts.
[[nodiscard]] Splits split_dataset(const Dataset &all, std::uint64_t seed);

struct MinMaxParams {
    double m0_min = 0.0, m0_max = 1.0;
    double pt_min = 0.0, pt_max = 1.0;
    friend bool operator==(const MinMaxParams &, const MinMaxParams &) = default;
};

/// Throws DomainError for an empty train set or a constant feature.
[[nodiscard]] MinMaxParams fit_minmax(const Dataset &train);
[[nodiscard]] double apply_minmax(double v, double lo, double hi) noexcept;
/// Scales m0 and pT with train parameters; out-of-range values are kept as is.
[[nodiscard]] Dataset apply_minmax(const Dataset &d, const MinMaxParams &p);

struct DatasetManifest {
    int version = kFormatVersion;
    std::uint64_t seed = 0;
    int image_size = 0;
    int channels = kChannels;
    std::vector<std::string> channel_names;
    std::size_t n_train = 0, n_val = 0, n_test = 0;
    std::optional<MinMaxParams> scaling;

    [[nodiscard]] std::size_t total() const noexcept { return n_train + n_val + n_test; }
};

void write_dataset(const std::filesystem::path &dir, const Splits &splits,
                   const DatasetManifest &manifest);

/// generate -> split -> fit scaling on train -> write. Returns the manifest.
DatasetManifest generate_dataset(const std::filesystem::path &dir, const GeneratorConfig &cfg);

struct LoadedDataset {
    DatasetManifest manifest;
    Splits raw;
    /// Splits with m0/pT scaled by the manifest's train parameters.
    [[nodiscard]] Splits scaled() const;
};

/// Throws IoError for missing files, FormatError for inconsistent contents.
[[nodiscard]] LoadedDataset load_dataset(const std::filesystem::path &dir);

} // namespace qvit::data
