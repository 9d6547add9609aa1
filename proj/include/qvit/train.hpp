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
 * Loss, optimizer, metrics, gradient checking and the training loop.
 */
#pragma once

#include "qvit/data.hpp"
#include "qvit/model.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace qvit::train {

inline constexpr double kProbClamp = 1e-7;

struct BceResult {
    double loss;
    double grad; ///< d loss / d ŷ at the clamped ŷ
};

/// Binary cross-entropy with ŷ clamped to [1e-7, 1 - 1e-7].
[[nodiscard]] BceResult bce_loss(double prob, int label);

struct AdamConfig {
    double learning_rate = 5e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    long long step = 0;
    explicit AdamState(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

/// One bias-corrected Adam update; increments state.step first.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState &state,
               const AdamConfig &cfg);

/// Mann-Whitney U / (n+ n-), ties count one half. Throws DomainError when a
/// class is missing.
[[nodiscard]] double roc_auc(std::span<const double> scores, std::span<const int> labels);
[[nodiscard]] double accuracy(std::span<const double> scores, std::span<const int> labels,
                              double threshold = 0.5);

struct MetricsRecord {
    int epoch = 0;
    std::string split;
    double loss = 0.0;
    double accuracy = 0.0;
    double auc = 0.0;
};

[[nodiscard]] std::string metrics_csv_header();
[[nodiscard]] std::string metrics_csv_row(const MetricsRecord &r);
void write_metrics_csv(const std::filesystem::path &path, std::span<const MetricsRecord> records);
/// Appends, writing the header first when the file is new.
void append_metrics_csv(const std::filesystem::path &path, const MetricsRecord &r);
[[nodiscard]] std::vector<MetricsRecord> read_metrics_csv(const std::filesystem::path &path);

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
    double auc = 0.0;
    std::vector<double> scores;
};

/// Eval-mode pass over an already-scaled dataset.
[[nodiscard]] Evaluation evaluate(const model::ModelParams &params, const data::Dataset &d);

struct GradSample {
    std::vector<double> image;
    double m0 = 0.0;
    double pt = 0.0;
    int label = 0;
};

struct GradCheckOptions {
    double step = 1e-5;
    double tolerance = 1e-4;
    /// Entries whose gradients are both below this are compared absolutely.
    double denominator_floor = 1e-6;
    /// Check with dropout active; every evaluation replays the same masks.
    bool training = false;
    std::uint64_t dropout_seed = 0;
    /// Applied to the analytic gradient before comparison (fault injection).
    std::function<void(model::ModelParams &)> corrupt;
};

struct GroupError {
    std::string name;
    std::size_t count = 0;
    double max_rel_err = 0.0;
    double max_abs_err = 0.0;
};

struct GradCheckReport {
    std::vector<GroupError> groups;
    double tolerance = 0.0;
    double worst = 0.0;
    bool passed = false;
};

/// Central differences of the BCE loss for every parameter vs model_backward.
[[nodiscard]] GradCheckReport grad_check(const model::ModelParams &params,
                                         const GradSample &sample,
                                         const GradCheckOptions &opts = {});

struct TrainConfig {
    int epochs = 15;
    int batch_size = 32;
    AdamConfig adam;
    std::uint64_t seed = 1;
    /// Per-sample gradients are summed in sample order, so results do not
    /// depend on the thread count.
    int threads = 1;

    void validate() const;
};

struct TrainResult {
    std::vector<MetricsRecord> records; ///< (train, val) per epoch
    model::ModelParams best;
    model::ModelParams last;
    int best_epoch = 0;
    double best_val_auc = 0.0;
};

using EpochCallback =
    std::function<void(const MetricsRecord &train, const MetricsRecord &val)>;

/// Datasets must already be scaled. Dropout is on for training passes and off
/// for validation; train metrics come from the training-mode predictions.
[[nodiscard]] TrainResult train_loop(model::ModelParams params, const data::Dataset &train,
                                     const data::Dataset &val, const TrainConfig &cfg,
                                     const EpochCallback &on_epoch = {});

/// Image of sample i as doubles.
[[nodiscard]] std::vector<double> image_as_double(const data::Dataset &d, std::size_t i);

} // namespace qvit::train
