#include "vqa.hpp"
#include "error.hpp"

#include "oracles.hpp"
#include "testutil.hpp"

#include <doctest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <thread>

using namespace cvad;

namespace {

// Backend scripted to emit fixed responses in sequence.
class ScriptedBackend : public vqa::ChatBackend {
public:
    explicit ScriptedBackend(std::vector<std::string> responses)
        : responses_(std::move(responses)) {}
    std::string complete(const cv::Mat&, const std::string&) override {
        std::size_t i = std::min(calls_++, responses_.size() - 1);
        return responses_[i];
    }
    std::size_t calls() const { return calls_; }

private:
    std::vector<std::string> responses_;
    std::size_t calls_ = 0;
};

} // namespace

TEST_CASE("plain prompt contains the query and the required sections") {
    auto p = vqa::build_prompt("bicycle", vqa::Variant::plain, {true, true});
    CHECK(p.rendered.find("bicycle") != std::string::npos);
    REQUIRE(p.sections.size() == 3);
    CHECK(p.sections[0].first == "task");
    CHECK(p.sections[1].first == "consideration");
    CHECK(p.sections[2].first == "output");
}

TEST_CASE("grid prompt inserts context between task and consideration") {
    auto p = vqa::build_prompt("fighting", vqa::Variant::grid, {true, true});
    REQUIRE(p.sections.size() == 4);
    CHECK(p.sections[0].first == "task");
    CHECK(p.sections[1].first == "context");
    CHECK(p.sections[2].first == "consideration");
    CHECK(p.sections[3].first == "output");
}

TEST_CASE("simple variant drops reasoning and consideration") {
    auto p = vqa::build_prompt("running", vqa::Variant::plain, {false, false});
    REQUIRE(p.sections.size() == 2);
    CHECK(p.sections[0].first == "task");
    CHECK(p.sections[1].first == "output");
    CHECK(p.rendered.find("score only") != std::string::npos);
}

TEST_CASE("prompt rendering is pure") {
    auto a = vqa::build_prompt("loitering", vqa::Variant::grid, {true, false});
    auto b = vqa::build_prompt("loitering", vqa::Variant::grid, {true, false});
    CHECK(a.rendered == b.rendered);
}

TEST_CASE("prompt templates load from file and override defaults") {
    testutil::TempDir tmp;
    testutil::write_text(tmp.path() / "templates.json",
                         R"({"task": "Custom task about {}."})");
    auto t = vqa::PromptTemplates::from_file((tmp.path() / "templates.json").string());
    auto p = vqa::build_prompt("running", vqa::Variant::plain, {true, true}, t);
    CHECK(p.sections[0].second == "Custom task about running.");
    // untouched sections keep the defaults
    CHECK(p.sections[2].second == vqa::PromptTemplates::defaults().output_reason);
    CHECK_THROWS_AS(vqa::PromptTemplates::from_file("/does/not/exist.json"), Error);
}

TEST_CASE("parse_score token rules") {
    CHECK(vqa::parse_score("I rate this 0.7 because...") == doctest::Approx(0.7));
    CHECK(vqa::parse_score("confidence 85%, so score 0.9") == doctest::Approx(0.9));
    CHECK(vqa::parse_score("Score: .8") == doctest::Approx(0.8));
    CHECK(vqa::parse_score("1") == doctest::Approx(1.0));
    CHECK(vqa::parse_score("definitely a 0") == doctest::Approx(0.0));
    CHECK(vqa::parse_score("rating -1 or maybe 0.3") == doctest::Approx(0.3));
    CHECK(vqa::parse_score("cannot determine") == std::nullopt);
    CHECK(vqa::parse_score("value 1.5 exceeds range") == std::nullopt);
    CHECK(vqa::parse_score("") == std::nullopt);
}

TEST_CASE("parse_score output is always in [0,1] (property)") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (int i = 0; i < 500; ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "value %.3f and %.1f", dist(rng), dist(rng));
        auto v = vqa::parse_score(buf);
        if (v) {
            CHECK(*v >= 0.0);
            CHECK(*v <= 1.0);
        }
    }
}

TEST_CASE("ask parses score and reason from a well-formed response") {
    auto backend = std::make_shared<ScriptedBackend>(
        std::vector<std::string>{"Score: 0.8. A bicycle is visible."});
    vqa::Gateway gw(backend, {});
    auto prompt = vqa::build_prompt("bicycle", vqa::Variant::plain, {});
    cv::Mat img(8, 8, CV_8UC3, cv::Scalar(0, 0, 0));
    auto r = gw.ask(img, prompt);
    CHECK(r.score == doctest::Approx(0.8));
    CHECK(r.reason == "A bicycle is visible.");
    CHECK_FALSE(r.fallback_used);
    CHECK(vqa::parse_score(r.raw_response) == doctest::Approx(0.8));
}

TEST_CASE("unparsable responses retry then fall back") {
    auto backend = std::make_shared<ScriptedBackend>(std::vector<std::string>{
        "no relevant content", "still nothing", "nope"});
    vqa::GatewayConfig cfg;
    cfg.parse_retries = 2;
    cfg.fallback_score = 0.0;
    vqa::Gateway gw(backend, cfg);
    cv::Mat img(8, 8, CV_8UC3, cv::Scalar(0, 0, 0));
    auto r = gw.ask(img, vqa::build_prompt("x", vqa::Variant::plain, {}));
    CHECK(r.fallback_used);
    CHECK(r.score == 0.0);
    CHECK(backend->calls() == 3); // initial + 2 retries
}

TEST_CASE("a retry that recovers does not use the fallback") {
    auto backend = std::make_shared<ScriptedBackend>(
        std::vector<std::string>{"garbled", "Score: 0.4. Second try."});
    vqa::Gateway gw(backend, {});
    cv::Mat img(8, 8, CV_8UC3, cv::Scalar(0, 0, 0));
    auto r = gw.ask(img, vqa::build_prompt("x", vqa::Variant::plain, {}));
    CHECK_FALSE(r.fallback_used);
    CHECK(r.score == doctest::Approx(0.4));
}

TEST_CASE("mock chat backend is deterministic and one-decimal") {
    vqa::MockChatBackend backend(5);
    std::mt19937_64 rng(2);
    cv::Mat img = oracle::random_image(rng, 16, 16);
    auto a = backend.complete(img, "prompt");
    auto b = backend.complete(img.clone(), "prompt");
    CHECK(a == b);
    auto score = vqa::parse_score(a);
    REQUIRE(score.has_value());
    CHECK(*score * 10 == doctest::Approx(std::round(*score * 10)));
    // different prompt -> independent response stream
    CHECK(backend.complete(img, "another prompt") != a);
}

TEST_CASE("openai-compatible backend round-trips through a local server") {
    httplib::Server server;
    std::string seen_body;
    server.Post("/v1/chat/completions",
                [&](const httplib::Request& req, httplib::Response& res) {
                    seen_body = req.body;
                    nlohmann::json out = {
                        {"choices",
                         {{{"message",
                            {{"role", "assistant"},
                             {"content", "Score: 0.6. Test response."}}}}}}};
                    res.set_content(out.dump(), "application/json");
                });
    int port = server.bind_to_any_port("127.0.0.1");
    std::thread server_thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    vqa::OpenAiBackendConfig cfg;
    cfg.url = "http://127.0.0.1:" + std::to_string(port);
    cfg.model = "test-model";
    vqa::Gateway gw(std::make_shared<vqa::OpenAiChatBackend>(cfg), {});
    cv::Mat img(8, 8, CV_8UC3, cv::Scalar(10, 20, 30));
    auto r = gw.ask(img, vqa::build_prompt("bicycle", vqa::Variant::plain, {}));
    CHECK(r.score == doctest::Approx(0.6));

    auto req = nlohmann::json::parse(seen_body);
    CHECK(req["model"] == "test-model");
    CHECK(req["temperature"] == 0);
    auto content = req["messages"][0]["content"];
    CHECK(content[0]["type"] == "text");
    CHECK(content[1]["type"] == "image_url");
    std::string url = content[1]["image_url"]["url"];
    CHECK(url.rfind("data:image/png;base64,", 0) == 0);

    server.stop();
    server_thread.join();
}

TEST_CASE("transport failure surfaces as a backend error after retries") {
    vqa::OpenAiBackendConfig cfg;
    cfg.url = "http://127.0.0.1:1"; // nothing listens here
    cfg.timeout_ms = 300;
    cfg.transport_retries = 1;
    vqa::Gateway gw(std::make_shared<vqa::OpenAiChatBackend>(cfg), {});
    cv::Mat img(8, 8, CV_8UC3, cv::Scalar(0, 0, 0));
    try {
        gw.ask(img, vqa::build_prompt("x", vqa::Variant::plain, {}));
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::backend);
    }
}
