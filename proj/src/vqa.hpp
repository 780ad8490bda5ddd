#pragma once

#include "concurrency.hpp"

#include <opencv2/core.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cvad::vqa {

enum class Variant { plain, grid };

struct PromptOptions {
    bool reasoning = true;
    bool consideration = true;
};

// Section wording is data. Defaults are built in; a JSON file with the same
// keys overrides any subset of them. "{}" in a section is replaced by the
// query text.
struct PromptTemplates {
    std::string task;
    std::string context;       // grid variant only
    std::string consideration;
    std::string output_score;  // score-only output instruction
    std::string output_reason; // score + brief reason, one decimal place

    static PromptTemplates defaults();
    static PromptTemplates from_file(const std::string& path);
};

struct Prompt {
    Variant variant = Variant::plain;
    std::vector<std::pair<std::string, std::string>> sections; // (name, text)
    std::string rendered;
};

// Renders task -> [context] -> [consideration] -> output with the query
// substituted. The context section is present only for the grid variant.
Prompt build_prompt(const std::string& query, Variant variant,
                    const PromptOptions& options,
                    const PromptTemplates& templates = PromptTemplates::defaults());

// First numeric token within [0,1]; out-of-range numbers are skipped.
// Returns nullopt when no usable token exists.
std::optional<double> parse_score(const std::string& text);

struct VqaResult {
    double score = 0.0;
    std::string reason;
    std::string raw_response;
    bool fallback_used = false;
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // One image + one prompt in, free-form text out.
    virtual std::string complete(const cv::Mat& image, const std::string& prompt) = 0;
};

// Deterministic test backend: hashes image bytes and prompt to a score with
// one decimal place and emits a parsable sentence around it.
class MockChatBackend : public ChatBackend {
public:
    explicit MockChatBackend(std::uint64_t seed = 0) : seed_(seed) {}
    std::string complete(const cv::Mat& image, const std::string& prompt) override;

private:
    std::uint64_t seed_;
};

struct OpenAiBackendConfig {
    std::string url;   // server root, e.g. http://host:8000
    std::string path = "/v1/chat/completions";
    std::string model;
    int timeout_ms = 120000;
    int transport_retries = 2;
};

// OpenAI-compatible chat completions client: one inline base64 PNG per
// request, temperature 0.
class OpenAiChatBackend : public ChatBackend {
public:
    explicit OpenAiChatBackend(OpenAiBackendConfig cfg);
    std::string complete(const cv::Mat& image, const std::string& prompt) override;

private:
    OpenAiBackendConfig cfg_;
};

struct GatewayConfig {
    int parse_retries = 2;      // fresh requests after an unparsable response
    double fallback_score = 0.0;
    int max_inflight = 3;
};

class Gateway {
public:
    Gateway(std::shared_ptr<ChatBackend> backend, GatewayConfig cfg);

    // Sends (image, prompt); on an unparsable response retries with a fresh
    // request up to parse_retries times, then falls back to fallback_score.
    // Transport failures surface as backend errors.
    VqaResult ask(const cv::Mat& image, const Prompt& prompt);

    std::uint64_t calls_issued() const { return calls_; }

private:
    std::shared_ptr<ChatBackend> backend_;
    GatewayConfig cfg_;
    InflightLimit inflight_;
    std::atomic<std::uint64_t> calls_{0};
};

} // namespace cvad::vqa
