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
 * Resolved run configuration: model, training and path settings as one flat
 * `key = value` file.
 */
#pragma once

#include "qvit/io.hpp"
#include "qvit/model.hpp"
#include "qvit/train.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace qvit::cli {

struct RunConfig {
    model::ModelConfig model;
    train::TrainConfig train;
    std::string data;
    std::string out;

    /// Every key in a fixed order.
    [[nodiscard]] io::KeyValues to_key_values() const;
    [[nodiscard]] std::string to_text() const { return to_key_values().to_text(); }

    /// Overrides fields named in kv. Unknown keys and malformed values throw
    /// FormatError.
    void apply(const io::KeyValues &kv);
    void apply_text(std::string_view text, std::string_view source);
};

[[nodiscard]] const std::vector<std::string> &run_config_keys();

} // namespace qvit::cli
