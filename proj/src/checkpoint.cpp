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
#include "qvit/checkpoint.hpp"

#include "qvit/errors.hpp"

#include <sstream>
#include <string>

namespace qvit::model {

namespace fs = std::filesystem;

namespace {

std::string shape_text(const std::vector<std::size_t> &shape) {
    std::string s;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        s += (i ? "x" : "") + std::to_string(shape[i]);
    }
    return s;
}

} // namespace

void write_model_config(io::KeyValues &kv, const ModelConfig &cfg, std::string_view prefix) {
    const std::string p(prefix);
    kv.set(p + "image_size", std::to_string(cfg.image_size));
    kv.set(p + "channels", std::to_string(cfg.channels));
    kv.set(p + "patch_size", std::to_string(cfg.patch_size));
    kv.set(p + "dim", std::to_string(cfg.dim));
    kv.set(p + "n_blocks", std::to_string(cfg.n_blocks));
    kv.set(p + "n_heads", std::to_string(cfg.n_heads));
    kv.set(p + "dropout", io::format_double(cfg.dropout));
    kv.set(p + "attention", to_string(cfg.attention));
}

ModelConfig read_model_config(const io::KeyValues &kv, std::string_view prefix) {
    const std::string p(prefix);
    ModelConfig cfg;
    cfg.image_size = static_cast<int>(kv.get_int(p + "image_size"));
    cfg.channels = static_cast<int>(kv.get_int(p + "channels"));
    cfg.patch_size = static_cast<int>(kv.get_int(p + "patch_size"));
    cfg.dim = static_cast<int>(kv.get_int(p + "dim"));
    cfg.n_blocks = static_cast<int>(kv.get_int(p + "n_blocks"));
    cfg.n_heads = static_cast<int>(kv.get_int(p + "n_heads"));
    cfg.dropout = kv.get_double(p + "dropout");
    cfg.attention = parse_attention_kind(kv.at(p + "attention"));
    try {
        cfg.validate();
    } catch (const DomainError &e) {
        throw FormatError(e.what());
    }
    return cfg;
}

void save_checkpoint(const fs::path &dir, const ModelParams &params,
                     const io::KeyValues &metadata) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create checkpoint directory '" + dir.string() + "': " +
                      ec.message());
    }
    io::KeyValues kv;
    kv.set("format", "qvit-checkpoint");
    kv.set("version", std::to_string(kCheckpointVersion));
    kv.set("blob", "params.bin");
    write_model_config(kv, params.config, "config.");
    for (const auto &[k, v] : metadata.entries()) {
        kv.set("meta." + k, v);
    }

    std::vector<std::uint8_t> blob;
    blob.reserve(params.num_values() * 8);
    std::size_t offset = 0;
    params.for_each([&](std::string_view name, const auto &shape, auto values) {
        kv.set("param." + std::string(name), shape_text(shape) + " @ " + std::to_string(offset));
        for (double v : values) {
            io::append_f64_le(blob, v);
        }
        offset += values.size();
    });
    kv.set("total_values", std::to_string(offset));
    io::write_binary_file(dir / "params.bin", blob);
    io::write_text_file(dir / "manifest.txt", kv.to_text());
}

Checkpoint load_checkpoint(const fs::path &dir) {
    const fs::path manifest = dir / "manifest.txt";
    if (!fs::exists(manifest)) {
        throw IoError("no checkpoint at '" + dir.string() + "' (missing manifest.txt)");
    }
    const io::KeyValues kv = io::KeyValues::parse(io::read_text_file(manifest), manifest.string());
    if (kv.at("format") != "qvit-checkpoint") {
        throw FormatError(manifest.string() + ": not a qvit checkpoint");
    }
    if (kv.get_int("version") != kCheckpointVersion) {
        throw FormatError(manifest.string() + ": unsupported version " + kv.at("version"));
    }
    Checkpoint ck{ModelParams(read_model_config(kv, "config.")), {}};
    for (const auto &[k, v] : kv.entries()) {
        if (k.rfind("meta.", 0) == 0) {
            ck.metadata.set(k.substr(5), v);
        }
    }

    const auto blob = io::read_binary_file(dir / kv.at("blob"));
    const std::size_t total = static_cast<std::size_t>(kv.get_int("total_values"));
    if (total != ck.params.num_values()) {
        throw FormatError(manifest.string() + ": total_values " + std::to_string(total) +
                          " does not match the configured model (" +
                          std::to_string(ck.params.num_values()) + ")");
    }
    if (blob.size() != total * 8) {
        throw FormatError((dir / kv.at("blob")).string() + ": expected " +
                          std::to_string(total * 8) + " bytes, found " +
                          std::to_string(blob.size()));
    }
    std::size_t expected_offset = 0;
    ck.params.for_each([&](std::string_view name, const auto &shape, std::span<double> values) {
        const std::string key = "param." + std::string(name);
        const std::string want = shape_text(shape) + " @ " + std::to_string(expected_offset);
        if (kv.at(key) != want) {
            throw FormatError(manifest.string() + ": " + key + " is '" + kv.at(key) +
                              "', expected '" + want + "'");
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            values[i] = io::read_f64_le(blob.data() + 8 * (expected_offset + i));
        }
        expected_offset += values.size();
    });
    return ck;
}

} // namespace qvit::model
