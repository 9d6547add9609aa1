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
 * Checkpoints: `manifest.txt` (key = value) describing every tensor by name,
 * shape and element offset, plus `params.bin`, the tensors concatenated in
 * registry order as little-endian float64.
 */
#pragma once

#include "qvit/io.hpp"
#include "qvit/model.hpp"

#include <filesystem>

namespace qvit::model {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
    ModelParams params;
    /// Free-form `meta.*` entries (epoch, seed, metrics) without the prefix.
    io::KeyValues metadata;
};

void save_checkpoint(const std::filesystem::path &dir, const ModelParams &params,
                     const io::KeyValues &metadata = {});

/// Throws IoError for missing files and FormatError for inconsistent ones.
[[nodiscard]] Checkpoint load_checkpoint(const std::filesystem::path &dir);

/// Config as `config.*` keys (shared by checkpoints and run configs).
void write_model_config(io::KeyValues &kv, const ModelConfig &cfg, std::string_view prefix);
[[nodiscard]] ModelConfig read_model_config(const io::KeyValues &kv, std::string_view prefix);

} // namespace qvit::model
