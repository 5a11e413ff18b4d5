// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <string>
#include <vector>

namespace instructgen {

/// One answered request. Serialized as a single NDJSON line:
/// `{"tag", "prompt_hash", "prompt", "samples", "attempts", "ts"}`.
struct TranscriptRecord {
    std::string tag;
    std::string prompt_hash;
    std::string prompt;
    std::vector<std::string> samples;
    std::uint64_t attempts = 1;
    std::int64_t ts = 0; ///< unix milliseconds

    friend bool operator==(const TranscriptRecord&, const TranscriptRecord&) = default;
};

std::string prompt_hash(const std::string& prompt);

std::string to_json_line(const TranscriptRecord& r);
TranscriptRecord record_from_json_line(const std::string& line);

/// Append-only, thread-safe. When opened on a file every record is flushed to
/// disk as it is appended, so a crashed run keeps everything it paid for.
class Transcript {
  public:
    Transcript() = default;
    explicit Transcript(const std::filesystem::path& path, bool append = true);

    void append(TranscriptRecord record);
    std::vector<TranscriptRecord> records() const;
    std::size_t size() const;

  private:
    mutable std::mutex mu_;
    std::vector<TranscriptRecord> records_;
    std::ofstream out_;
};

/// Throws IoError / ParseError.
std::vector<TranscriptRecord> load_transcript(const std::filesystem::path& path);

} // namespace instructgen
