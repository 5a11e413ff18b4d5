// Copyright 2026 The instructgen Authors
// SPDX-License-Identifier: Apache-2.0

#include "instructgen/errors.hpp"
#include "instructgen/gateway.hpp"
#include "instructgen/http_backend.hpp"
#include "instructgen/text_util.hpp"
#include "instructgen/transcript.hpp"
#include "support/test_util.hpp"

#include <gtest/gtest.h>
#include <httplib.h>
#include <json.hpp>

#include <thread>

using namespace instructgen;

namespace {

GenerationRequest req(std::string tag, std::uint64_t n = 1, std::string prompt = "p")
{
    GenerationRequest r;
    r.prompt = std::move(prompt);
    r.n_samples = n;
    r.request_tag = std::move(tag);
    return r;
}

} // namespace

TEST(GenerationRequest, Validation)
{
    EXPECT_NO_THROW(validate(req("t")));
    auto r = req("t");
    r.n_samples = 0;
    EXPECT_THROW(validate(r), ValidationError);
    r = req("t");
    r.prompt.clear();
    EXPECT_THROW(validate(r), ValidationError);
    r = req("t");
    r.temperature = -0.1;
    EXPECT_THROW(validate(r), ValidationError);
}

TEST(MockBackend, ServesByTagThenHashThenResponder)
{
    auto mock = std::make_shared<MockBackend>();
    mock->script("seed/0", {"one", "two"});
    mock->script_prompt("by prompt", {"hashed"});
    Gateway gw(mock, testutil::fast_options());

    EXPECT_EQ(gw.generate(req("seed/0")).samples, std::vector<std::string>{"one"});
    EXPECT_EQ(gw.generate(req("seed/0")).samples, std::vector<std::string>{"two"});
    EXPECT_EQ(gw.generate(req("other", 1, "by prompt")).samples, std::vector<std::string>{"hashed"});
    EXPECT_THROW(gw.generate(req("seed/0")), ScriptExhausted);

    mock->set_responder([](const GenerationRequest& r) {
        return std::vector<std::string>(r.n_samples, "echo " + r.request_tag);
    });
    EXPECT_EQ(gw.generate(req("x", 2)).samples, (std::vector<std::string>{"echo x", "echo x"}));
}

TEST(MockBackend, ShortQueueIsAnError)
{
    auto mock = std::make_shared<MockBackend>();
    mock->script("t", {"only one"});
    Gateway gw(mock, testutil::fast_options());
    EXPECT_THROW(gw.generate(req("t", 2)), ScriptExhausted);
}

TEST(MockBackend, TruncatesAtMaxTokens)
{
    EXPECT_EQ(truncate_tokens("a b  c d", 2), "a b");
    EXPECT_EQ(truncate_tokens("a b", 5), "a b");
    EXPECT_EQ(truncate_tokens("  lead", 1), "  lead");
    auto mock = std::make_shared<MockBackend>();
    mock->script("t", {"one two three four"});
    Gateway gw(mock, testutil::fast_options());
    auto r = req("t");
    r.max_tokens = 3;
    EXPECT_EQ(gw.generate(r).samples[0], "one two three");
}

TEST(Backoff, GeometricSchedule)
{
    BackoffSchedule b;
    EXPECT_EQ(b.delay_before_attempt(1).count(), 0);
    EXPECT_EQ(b.delay_before_attempt(2).count(), 1000);
    EXPECT_EQ(b.delay_before_attempt(3).count(), 2000);
    EXPECT_EQ(b.delay_before_attempt(4).count(), 4000);
}

TEST(Gateway, RetriesTransportErrorsWithBackoff)
{
    auto flaky = std::make_shared<testutil::FlakyBackend>(2);
    std::vector<std::int64_t> slept;
    GatewayOptions o;
    o.sleeper = [&](std::chrono::milliseconds d) { slept.push_back(d.count()); };
    Gateway gw(flaky, o);
    const auto r = gw.request(req("t"));
    EXPECT_EQ(r.attempts, 3u);
    EXPECT_EQ(r.samples[0], "ok:t");
    EXPECT_EQ(slept, (std::vector<std::int64_t>{1000, 2000}));
    EXPECT_EQ(gw.call_count(), 3u);
}

TEST(Gateway, GivesUpAfterMaxAttempts)
{
    auto flaky = std::make_shared<testutil::FlakyBackend>(5);
    Gateway gw(flaky, testutil::fast_options());
    EXPECT_THROW(gw.request(req("t")), TransportError);
    EXPECT_EQ(flaky->calls.load(), 3);
}

TEST(Gateway, DoesNotRetryOtherErrors)
{
    auto mock = std::make_shared<MockBackend>();
    Gateway gw(mock, testutil::fast_options());
    EXPECT_THROW(gw.request(req("unscripted")), ScriptExhausted);
    EXPECT_EQ(gw.call_count(), 1u);
}

TEST(Gateway, BatchIsPositionalAndIsolatesFailures)
{
    auto mock = std::make_shared<MockBackend>();
    mock->set_responder([](const GenerationRequest& r) -> std::vector<std::string> {
        if (r.request_tag == "bad") throw BackendError("refused");
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
        return {r.request_tag};
    });
    Gateway gw(mock, testutil::fast_options(4));
    std::vector<GenerationRequest> rs;
    for (int i = 0; i < 40; ++i) rs.push_back(req(i == 17 ? "bad" : "r" + std::to_string(i)));
    const auto out = gw.run_batch(rs);
    ASSERT_EQ(out.size(), rs.size());
    for (int i = 0; i < 40; ++i) {
        if (i == 17) {
            EXPECT_FALSE(out[i].ok());
            EXPECT_EQ(out[i].error_kind, "BackendError");
        } else {
            ASSERT_TRUE(out[i].ok());
            EXPECT_EQ(out[i].result->samples[0], "r" + std::to_string(i));
        }
    }
    EXPECT_LE(gw.peak_in_flight(), 4u);
    EXPECT_GE(gw.peak_in_flight(), 1u);
}

TEST(Transcript, RecordsSuccessesAndReplays)
{
    testutil::TempDir dir;
    const auto path = dir / "t.jsonl";
    {
        auto mock = std::make_shared<MockBackend>();
        mock->set_responder([](const GenerationRequest& r) {
            return std::vector<std::string>(r.n_samples, "reply to " + r.request_tag + " \xE2\x80\x93 ok");
        });
        Gateway gw(mock, testutil::fast_options());
        gw.set_transcript(std::make_shared<Transcript>(path));
        gw.generate(req("a", 2));
        gw.generate(req("b"));
    }
    const auto records = load_transcript(path);
    ASSERT_EQ(records.size(), 2u);
    EXPECT_EQ(records[0].tag, "a");
    EXPECT_EQ(records[0].samples.size(), 2u);
    EXPECT_EQ(records[0].prompt_hash, prompt_hash("p"));
    EXPECT_EQ(record_from_json_line(to_json_line(records[1])), records[1]);

    auto replay = std::make_shared<MockBackend>();
    replay->load(records);
    Gateway gw(replay, testutil::fast_options());
    EXPECT_EQ(gw.generate(req("b")).samples[0], "reply to b \xE2\x80\x93 ok");
}

TEST(Transcript, RejectsMalformedLines)
{
    testutil::TempDir dir;
    write_file_atomic(dir / "bad.jsonl", "{\"tag\": 1}\n");
    EXPECT_THROW(load_transcript(dir / "bad.jsonl"), ParseError);
    EXPECT_THROW(load_transcript(dir / "absent.jsonl"), IoError);
}

namespace {

/// Minimal chat-completion server on an ephemeral port.
class FakeServer {
  public:
    explicit FakeServer(std::function<void(const httplib::Request&, httplib::Response&)> handler)
    {
        server_.Post("/v1/chat/completions", std::move(handler));
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeServer()
    {
        server_.stop();
        thread_.join();
    }
    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions"; }

  private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

nlohmann::json choices(const std::vector<std::string>& texts)
{
    nlohmann::json j;
    j["choices"] = nlohmann::json::array();
    for (const auto& t : texts) j["choices"].push_back({{"message", {{"role", "assistant"}, {"content", t}}}});
    return j;
}

} // namespace

TEST(HttpBackend, SendsChatRequestAndTopsUpMissingChoices)
{
    std::vector<nlohmann::json> bodies;
    std::string auth;
    std::mutex mu;
    FakeServer server([&](const httplib::Request& rq, httplib::Response& rs) {
        std::lock_guard lock(mu);
        bodies.push_back(nlohmann::json::parse(rq.body));
        auth = rq.get_header_value("Authorization");
        // This server ignores n and always returns one choice.
        rs.set_content(choices({"sample " + std::to_string(bodies.size())}).dump(), "application/json");
    });
    HttpBackendOptions o;
    o.endpoint = server.endpoint();
    o.api_key = "secret";
    o.model = "m1";
    HttpBackend backend(o);
    auto r = req("t", 3, "What is duration?");
    r.temperature = 0.7;
    r.max_tokens = 64;
    const auto out = backend.complete(r);
    EXPECT_EQ(out, (std::vector<std::string>{"sample 1", "sample 2", "sample 3"}));
    ASSERT_EQ(bodies.size(), 3u);
    EXPECT_EQ(bodies[0]["model"], "m1");
    EXPECT_EQ(bodies[0]["n"], 3);
    EXPECT_EQ(bodies[1]["n"], 2);
    EXPECT_EQ(bodies[0]["max_tokens"], 64);
    EXPECT_DOUBLE_EQ(bodies[0]["temperature"].get<double>(), 0.7);
    EXPECT_EQ(bodies[0]["messages"][1]["role"], "user");
    EXPECT_EQ(bodies[0]["messages"][1]["content"], "What is duration?");
    EXPECT_EQ(auth, "Bearer secret");
}

TEST(HttpBackend, StatusMapping)
{
    std::atomic<int> status{503};
    FakeServer server([&](const httplib::Request&, httplib::Response& rs) {
        rs.status = status.load();
        rs.set_content(status == 200 ? std::string("not json") : std::string("{}"), "application/json");
    });
    HttpBackendOptions o;
    o.endpoint = server.endpoint();
    HttpBackend backend(o);
    EXPECT_THROW(backend.complete(req("t")), TransportError);
    status = 429;
    EXPECT_THROW(backend.complete(req("t")), TransportError);
    status = 400;
    EXPECT_THROW(backend.complete(req("t")), BackendError);
    status = 200;
    EXPECT_THROW(backend.complete(req("t")), BackendError);
}

TEST(HttpBackend, RetriedThroughGatewayAfterServerErrors)
{
    std::atomic<int> hits{0};
    FakeServer server([&](const httplib::Request&, httplib::Response& rs) {
        if (++hits <= 2) {
            rs.status = 500;
            return;
        }
        rs.set_content(choices({"fine"}).dump(), "application/json");
    });
    HttpBackendOptions o;
    o.endpoint = server.endpoint();
    Gateway gw(std::make_shared<HttpBackend>(o), testutil::fast_options());
    const auto r = gw.request(req("t"));
    EXPECT_EQ(r.samples[0], "fine");
    EXPECT_EQ(r.attempts, 3u);
}

TEST(HttpBackend, UnreachableEndpointIsTransportError)
{
    HttpBackendOptions o;
    o.endpoint = "http://127.0.0.1:1/v1/chat/completions";
    HttpBackend backend(o);
    EXPECT_THROW(backend.complete(req("t")), TransportError);
    o.endpoint = "ftp://example";
    EXPECT_THROW(HttpBackend{o}, ValidationError);
}
