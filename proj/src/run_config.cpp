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
#include "qvit/run_config.hpp"

#include "qvit/errors.hpp"

#include <algorithm>

namespace qvit::cli {

const std::vector<std::string> &run_config_keys() {
    static const std::vector<std::string> keys = {
        "model",      "image_size", "channels",  "patch_size",    "dim",
        "n_blocks",   "n_heads",    "dropout",   "epochs",        "batch_size",
        "learning_rate", "adam_beta1", "adam_beta2", "adam_epsilon", "seed",
        "threads",    "data",       "out"};
    return keys;
}

io::KeyValues RunConfig::to_key_values() const {
    io::KeyValues kv;
    kv.set("model", model.attention == model::AttentionKind::kQuantum ? "qvit" : "vit");
    kv.set("image_size", std::to_string(model.image_size));
    kv.set("channels", std::to_string(model.channels));
    kv.set("patch_size", std::to_string(model.patch_size));
    kv.set("dim", std::to_string(model.dim));
    kv.set("n_blocks", std::to_string(model.n_blocks));
    kv.set("n_heads", std::to_string(model.n_heads));
    kv.set("dropout", io::format_double(model.dropout));
    kv.set("epochs", std::to_string(train.epochs));
    kv.set("batch_size", std::to_string(train.batch_size));
    kv.set("learning_rate", io::format_double(train.adam.learning_rate));
    kv.set("adam_beta1", io::format_double(train.adam.beta1));
    kv.set("adam_beta2", io::format_double(train.adam.beta2));
    kv.set("adam_epsilon", io::format_double(train.adam.epsilon));
    kv.set("seed", std::to_string(train.seed));
    kv.set("threads", std::to_string(train.threads));
    kv.set("data", data);
    kv.set("out", out);
    return kv;
}

void RunConfig::apply(const io::KeyValues &kv) {
    const auto &keys = run_config_keys();
    for (const auto &[key, value] : kv.entries()) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw FormatError("unknown config key '" + key + "'");
        }
    }
    auto int_field = [&](const char *key, int &dst) {
        if (kv.contains(key)) {
            dst = static_cast<int>(kv.get_int(key));
        }
    };
    auto double_field = [&](const char *key, double &dst) {
        if (kv.contains(key)) {
            dst = kv.get_double(key);
        }
    };
    if (auto v = kv.find("model")) {
        try {
            model.attention = model::parse_attention_kind(*v);
        } catch (const Error &e) {
            throw FormatError(e.what());
        }
    }
    int_field("image_size", model.image_size);
    int_field("channels", model.channels);
    int_field("patch_size", model.patch_size);
    int_field("dim", model.dim);
    int_field("n_blocks", model.n_blocks);
    int_field("n_heads", model.n_heads);
    double_field("dropout", model.dropout);
    int_field("epochs", train.epochs);
    int_field("batch_size", train.batch_size);
    double_field("learning_rate", train.adam.learning_rate);
    double_field("adam_beta1", train.adam.beta1);
    double_field("adam_beta2", train.adam.beta2);
    double_field("adam_epsilon", train.adam.epsilon);
    if (kv.contains("seed")) {
        const long long s = kv.get_int("seed");
        if (s < 0) {
            throw FormatError("seed must be non-negative");
        }
        train.seed = static_cast<std::uint64_t>(s);
    }
    int_field("threads", train.threads);
    if (auto v = kv.find("data")) {
        data = *v;
    }
    if (auto v = kv.find("out")) {
        out = *v;
    }
}

void RunConfig::apply_text(std::string_view text, std::string_view source) {
    apply(io::KeyValues::parse(text, source));
}

} // namespace qvit::cli
