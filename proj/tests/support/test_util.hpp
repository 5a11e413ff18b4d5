// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "instructgen/errors.hpp"
#include "instructgen/gateway.hpp"
#include "instructgen/task_model.hpp"

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

namespace testutil {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& stem = "instructgen")
    {
        std::random_device rd;
        const auto base = std::filesystem::temp_directory_path();
        for (;;) {
            path_ = base / (stem + "-" + std::to_string(rd()) + std::to_string(rd()));
            if (std::filesystem::create_directory(path_)) break;
        }
    }
    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

  private:
    std::filesystem::path path_;
};

/// Fails the first `failures` calls with TransportError, then echoes.
class FlakyBackend : public instructgen::Backend {
  public:
    explicit FlakyBackend(int failures) : remaining_(failures) {}

    std::vector<std::string> complete(const instructgen::GenerationRequest& request) override
    {
        ++calls;
        if (remaining_.fetch_sub(1) > 0) throw instructgen::TransportError("connection reset");
        return std::vector<std::string>(request.n_samples, "ok:" + request.request_tag);
    }
    std::string id() const override { return "flaky"; }

    std::atomic<int> calls{0};

  private:
    std::atomic<int> remaining_;
};

inline instructgen::TaskDefinition mc_task()
{
    instructgen::TaskDefinition t;
    t.name = "finance_mc";
    t.description = "Multiple-choice questions on corporate finance and portfolio theory.";
    t.domain_label = "finance";
    t.answer_format = instructgen::make_answer_format(instructgen::AnswerKind::MultipleChoice);
    return t;
}

inline instructgen::GatewayOptions fast_options(std::size_t parallelism = 4)
{
    instructgen::GatewayOptions o;
    o.parallelism = parallelism;
    o.sleeper = [](std::chrono::milliseconds) {};
    return o;
}

} // namespace testutil
