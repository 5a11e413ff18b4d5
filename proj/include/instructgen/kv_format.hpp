// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Flat `key = value` text format shared by task and config files.
//
//   # comment
//   name = gsm8k
//   description = "quoted values may contain \"escapes\", \n and # signs"
//
// Keys are [a-z0-9_]+. Nesting is not supported; a key may appear once.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace instructgen {

struct KvEntry {
    std::string key;
    std::string value;
    int line = 0;
};

/// Throws ParseError on malformed lines, bad quoting or duplicate keys.
std::vector<KvEntry> parse_kv(std::string_view text);

/// Renders one `key = value` line (with trailing newline), quoting when needed.
std::string format_kv(std::string_view key, std::string_view value);

} // namespace instructgen
