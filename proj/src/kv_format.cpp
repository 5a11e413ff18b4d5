// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/kv_format.hpp"

#include "instructgen/errors.hpp"
#include "instructgen/text_util.hpp"

#include <set>

namespace instructgen {

namespace {

bool valid_key(std::string_view k)
{
    if (k.empty()) return false;
    for (char c : k) {
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
    }
    return true;
}

std::string unquote(std::string_view v, int line)
{
    std::string out;
    std::size_t i = 1;
    for (; i < v.size(); ++i) {
        char c = v[i];
        if (c == '"') break;
        if (c == '\\') {
            if (++i >= v.size()) break;
            switch (v[i]) {
            case 'n': out += '\n'; break;
            case 't': out += '\t'; break;
            case 'r': out += '\r'; break;
            case '"': out += '"'; break;
            case '\\': out += '\\'; break;
            default:
                throw ParseError("line " + std::to_string(line) + ": unknown escape \\" + std::string(1, v[i]));
            }
            continue;
        }
        out += c;
    }
    if (i >= v.size()) throw ParseError("line " + std::to_string(line) + ": unterminated quoted value");
    if (!trim(v.substr(i + 1)).empty()) {
        throw ParseError("line " + std::to_string(line) + ": trailing characters after quoted value");
    }
    return out;
}

bool needs_quotes(std::string_view v)
{
    if (v.empty() || trim(v).size() != v.size() || v.front() == '"') return true;
    for (char c : v) {
        if (c == '\n' || c == '\r' || c == '\t' || c == '#' || c == '\\' || c == '"') return true;
    }
    return false;
}

} // namespace

std::vector<KvEntry> parse_kv(std::string_view text)
{
    std::vector<KvEntry> entries;
    std::set<std::string, std::less<>> seen;
    int lineno = 0;
    for (auto raw : split_lines(text)) {
        ++lineno;
        auto line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError("line " + std::to_string(lineno) + ": expected `key = value`");
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (!valid_key(key)) {
            throw ParseError("line " + std::to_string(lineno) + ": invalid key '" + std::string(key) + "'");
        }
        if (!seen.insert(std::string(key)).second) {
            throw ParseError("line " + std::to_string(lineno) + ": duplicate key '" + std::string(key) + "'");
        }
        KvEntry e;
        e.key = std::string(key);
        e.value = (!value.empty() && value.front() == '"') ? unquote(value, lineno) : std::string(value);
        e.line = lineno;
        entries.push_back(std::move(e));
    }
    return entries;
}

std::string format_kv(std::string_view key, std::string_view value)
{
    std::string out(key);
    out += " = ";
    if (!needs_quotes(value)) {
        out += value;
    } else {
        out += '"';
        for (char c : value) {
            switch (c) {
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            default: out += c;
            }
        }
        out += '"';
    }
    out += '\n';
    return out;
}

} // namespace instructgen
