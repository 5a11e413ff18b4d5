// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/transcript.hpp"

#include "instructgen/errors.hpp"
#include "instructgen/text_util.hpp"

#include <json.hpp>

namespace instructgen {

using ojson = nlohmann::ordered_json;

std::string prompt_hash(const std::string& prompt)
{
    return hex64(fnv1a64(prompt));
}

std::string to_json_line(const TranscriptRecord& r)
{
    ojson j;
    j["tag"] = r.tag;
    j["prompt_hash"] = r.prompt_hash;
    j["prompt"] = r.prompt;
    j["samples"] = r.samples;
    j["attempts"] = r.attempts;
    j["ts"] = r.ts;
    return j.dump(-1, ' ', false, ojson::error_handler_t::replace);
}

TranscriptRecord record_from_json_line(const std::string& line)
{
    try {
        auto j = ojson::parse(line);
        TranscriptRecord r;
        r.tag = j.at("tag").get<std::string>();
        r.prompt = j.value("prompt", std::string{});
        r.prompt_hash = j.value("prompt_hash", std::string{});
        if (r.prompt_hash.empty()) r.prompt_hash = prompt_hash(r.prompt);
        r.samples = j.at("samples").get<std::vector<std::string>>();
        r.attempts = j.value("attempts", std::uint64_t{1});
        r.ts = j.value("ts", std::int64_t{0});
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad transcript record: ") + e.what());
    }
}

Transcript::Transcript(const std::filesystem::path& path, bool append)
{
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    out_.open(path, append ? std::ios::app : std::ios::trunc);
    if (!out_) throw IoError("cannot open transcript " + path.string());
}

void Transcript::append(TranscriptRecord record)
{
    std::lock_guard lock(mu_);
    if (out_.is_open()) {
        out_ << to_json_line(record) << '\n';
        out_.flush();
    }
    records_.push_back(std::move(record));
}

std::vector<TranscriptRecord> Transcript::records() const
{
    std::lock_guard lock(mu_);
    return records_;
}

std::size_t Transcript::size() const
{
    std::lock_guard lock(mu_);
    return records_.size();
}

std::vector<TranscriptRecord> load_transcript(const std::filesystem::path& path)
{
    std::vector<TranscriptRecord> out;
    const auto text = read_file(path);
    int lineno = 0;
    for (auto line : split_lines(text)) {
        ++lineno;
        if (trim(line).empty()) continue;
        try {
            out.push_back(record_from_json_line(std::string(line)));
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

} // namespace instructgen
