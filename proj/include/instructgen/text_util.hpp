// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace instructgen {

std::string_view trim(std::string_view s);
std::string to_lower_ascii(std::string_view s);
bool iequals_ascii(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);

/// Splits on '\n', dropping a trailing '\r' from each line.
std::vector<std::string_view> split_lines(std::string_view s);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

bool is_valid_utf8(std::string_view s);

std::string read_file(const std::filesystem::path& path);

/// Writes `content` to `path.tmp` and renames it over `path`; the temp file is
/// removed if anything fails.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// Shortest decimal representation that round-trips through strtod.
std::string format_double(double v);

} // namespace instructgen
