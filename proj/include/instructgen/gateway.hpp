// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "instructgen/transcript.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace instructgen {

struct GenerationRequest {
    std::string prompt;
    double temperature = 0.7;
    std::uint64_t max_tokens = 2048;
    std::uint64_t n_samples = 1;
    /// Stable correlation key, e.g. "expand/17" or "filter/single/limit/Apply".
    std::string request_tag;
};

/// Throws ValidationError.
void validate(const GenerationRequest& request);

struct GenerationResult {
    std::vector<std::string> samples;
    std::string backend_id;
    std::chrono::nanoseconds latency{0};
    std::uint64_t attempts = 1;
};

/// A text-generation provider. Implementations must be safe to call from
/// several threads at once.
class Backend {
  public:
    virtual ~Backend() = default;
    /// Returns exactly request.n_samples completions or throws.
    virtual std::vector<std::string> complete(const GenerationRequest& request) = 0;
    virtual std::string id() const = 0;
};

/// Deterministic scripted backend.
///
/// Samples are queued per key and popped n_samples at a time. A request is
/// served from its request_tag queue when that queue is non-empty, otherwise
/// from the queue of its prompt hash, otherwise from the responder (if set).
/// Anything else raises ScriptExhausted.
///
/// Completions longer than max_tokens whitespace-delimited tokens are cut
/// before the first excess token.
class MockBackend : public Backend {
  public:
    using Responder = std::function<std::vector<std::string>(const GenerationRequest&)>;

    void script(const std::string& tag, std::vector<std::string> samples);
    void script_prompt(const std::string& prompt, std::vector<std::string> samples);
    void set_responder(Responder responder);
    /// Queues every record under its tag so a recorded run replays exactly.
    void load(const std::vector<TranscriptRecord>& records);

    std::vector<std::string> complete(const GenerationRequest& request) override;
    std::string id() const override { return "mock"; }

    std::uint64_t calls() const { return calls_.load(); }

  private:
    std::mutex mu_;
    std::map<std::string, std::deque<std::string>> by_tag_;
    std::map<std::string, std::deque<std::string>> by_hash_;
    Responder responder_;
    std::atomic<std::uint64_t> calls_{0};
};

/// Keeps the first max_tokens whitespace-delimited tokens of `text`, cut at
/// the end of the last one kept.
std::string truncate_tokens(const std::string& text, std::uint64_t max_tokens);

struct BackoffSchedule {
    std::chrono::milliseconds initial{1000};
    double multiplier = 2.0;

    std::chrono::milliseconds delay_before_attempt(std::uint64_t attempt) const;
};

struct GatewayOptions {
    std::uint64_t max_attempts = 3;
    BackoffSchedule backoff;
    std::size_t parallelism = 8;
    /// Replaced in tests to avoid real sleeping.
    std::function<void(std::chrono::milliseconds)> sleeper;
};

struct BatchOutcome {
    std::optional<GenerationResult> result;
    std::string error_kind;
    std::string error_message;

    bool ok() const { return result.has_value(); }
};

/// Uniform front end over a Backend: validation, retries, bounded parallel
/// batches and transcript recording. Shareable across threads.
class Gateway {
  public:
    explicit Gateway(std::shared_ptr<Backend> backend, GatewayOptions options = {});

    void set_transcript(std::shared_ptr<Transcript> transcript) { transcript_ = std::move(transcript); }
    const GatewayOptions& options() const { return options_; }

    /// Single attempt.
    GenerationResult generate(const GenerationRequest& request);
    GenerationResult with_retry(const GenerationRequest& request, std::uint64_t max_attempts,
                                const BackoffSchedule& backoff);
    /// with_retry using the configured policy.
    GenerationResult request(const GenerationRequest& request);

    /// Results positionally aligned with `requests`; failures are reported in
    /// place and never abort the batch.
    std::vector<BatchOutcome> run_batch(const std::vector<GenerationRequest>& requests, std::size_t parallelism);
    std::vector<BatchOutcome> run_batch(const std::vector<GenerationRequest>& requests)
    {
        return run_batch(requests, options_.parallelism);
    }

    /// Number of backend invocations, including failed attempts.
    std::uint64_t call_count() const { return calls_.load(); }
    /// Largest number of concurrent backend invocations seen so far.
    std::size_t peak_in_flight() const { return peak_in_flight_.load(); }

  private:
    std::vector<std::string> attempt(const GenerationRequest& request);
    void record(const GenerationRequest& request, const GenerationResult& result);

    std::shared_ptr<Backend> backend_;
    GatewayOptions options_;
    std::shared_ptr<Transcript> transcript_;
    std::atomic<std::uint64_t> calls_{0};
    std::atomic<std::size_t> in_flight_{0};
    std::atomic<std::size_t> peak_in_flight_{0};
};

} // namespace instructgen
