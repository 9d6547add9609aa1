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
#include "qvit/io.hpp"

#include "qvit/errors.hpp"

#include <bit>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace qvit::io {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

void KeyValues::set(std::string key, std::string value) {
    for (auto &kv : entries_) {
        if (kv.first == key) {
            kv.second = std::move(value);
            return;
        }
    }
    entries_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> KeyValues::find(std::string_view key) const {
    for (const auto &kv : entries_) {
        if (kv.first == key) {
            return kv.second;
        }
    }
    return std::nullopt;
}

const std::string &KeyValues::at(std::string_view key) const {
    for (const auto &kv : entries_) {
        if (kv.first == key) {
            return kv.second;
        }
    }
    throw FormatError("missing key '" + std::string(key) + "'");
}

long long KeyValues::get_int(std::string_view key) const {
    return parse_int(at(key), key);
}

double KeyValues::get_double(std::string_view key) const {
    return parse_double(at(key), key);
}

std::string KeyValues::to_text() const {
    std::string out;
    for (const auto &[k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

KeyValues KeyValues::parse(std::string_view text, std::string_view source) {
    KeyValues kv;
    std::istringstream in{std::string(text)};
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw FormatError(std::string(source) + ":" + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) {
            throw FormatError(std::string(source) + ":" + std::to_string(line_no) +
                              ": empty key");
        }
        if (kv.contains(key)) {
            throw FormatError(std::string(source) + ":" + std::to_string(line_no) +
                              ": duplicate key '" + key + "'");
        }
        kv.entries_.emplace_back(std::move(key), std::move(value));
    }
    return kv;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(std::string_view s, std::string_view what) {
    double v = 0.0;
    const auto *end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc{} || r.ptr != end) {
        throw FormatError("'" + std::string(what) + "': not a number: '" + std::string(s) + "'");
    }
    return v;
}

long long parse_int(std::string_view s, std::string_view what) {
    long long v = 0;
    const auto *end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc{} || r.ptr != end) {
        throw FormatError("'" + std::string(what) + "': not an integer: '" + std::string(s) +
                          "'");
    }
    return v;
}

std::string read_text_file(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + p.string() + "' for reading");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path &p, std::string_view text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + p.string() + "' for writing");
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) {
        throw IoError("write to '" + p.string() + "' failed");
    }
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + p.string() + "' for reading");
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_binary_file(const std::filesystem::path &p, std::span<const std::uint8_t> bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + p.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char *>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("write to '" + p.string() + "' failed");
    }
}

void append_f64_le(std::vector<std::uint8_t> &out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) {
        out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
}

void append_f32_le(std::vector<std::uint8_t> &out, float v) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    for (int i = 0; i < 4; ++i) {
        out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
}

double read_f64_le(const std::uint8_t *p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
        bits |= std::uint64_t{p[i]} << (8 * i);
    }
    return std::bit_cast<double>(bits);
}

float read_f32_le(const std::uint8_t *p) {
    std::uint32_t bits = 0;
    for (int i = 0; i < 4; ++i) {
        bits |= std::uint32_t{p[i]} << (8 * i);
    }
    return std::bit_cast<float>(bits);
}

} // namespace qvit::io
