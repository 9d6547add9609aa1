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
 * Small I/O helpers: ordered `key = value` text files and little-endian
 * float blobs.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qvit::io {

/// Ordered key/value pairs; duplicate keys are rejected on parse.
class KeyValues {
  public:
    void set(std::string key, std::string value);
    [[nodiscard]] std::optional<std::string> find(std::string_view key) const;
    /// Throws FormatError when missing.
    [[nodiscard]] const std::string &at(std::string_view key) const;
    [[nodiscard]] bool contains(std::string_view key) const { return find(key).has_value(); }

    [[nodiscard]] long long get_int(std::string_view key) const;
    [[nodiscard]] double get_double(std::string_view key) const;

    [[nodiscard]] const std::vector<std::pair<std::string, std::string>> &entries() const {
        return entries_;
    }

    /// `key = value` lines; `#` starts a comment line.
    [[nodiscard]] std::string to_text() const;
    [[nodiscard]] static KeyValues parse(std::string_view text, std::string_view source);

  private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// %.17g, which round-trips every double exactly.
[[nodiscard]] std::string format_double(double v);
[[nodiscard]] double parse_double(std::string_view s, std::string_view what);
[[nodiscard]] long long parse_int(std::string_view s, std::string_view what);

[[nodiscard]] std::string read_text_file(const std::filesystem::path &p);
void write_text_file(const std::filesystem::path &p, std::string_view text);
[[nodiscard]] std::vector<std::uint8_t> read_binary_file(const std::filesystem::path &p);
void write_binary_file(const std::filesystem::path &p, std::span<const std::uint8_t> bytes);

void append_f64_le(std::vector<std::uint8_t> &out, double v);
void append_f32_le(std::vector<std::uint8_t> &out, float v);
[[nodiscard]] double read_f64_le(const std::uint8_t *p);
[[nodiscard]] float read_f32_le(const std::uint8_t *p);

} // namespace qvit::io
