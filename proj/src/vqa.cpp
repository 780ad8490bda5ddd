#include "vqa.hpp"

#include "base64.hpp"
#include "error.hpp"
#include "hash.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <opencv2/imgcodecs.hpp>

#include <cmath>
#include <fstream>
#include <regex>

namespace cvad::vqa {

PromptTemplates PromptTemplates::defaults() {
    PromptTemplates t;
    t.task =
        "Task: Evaluate whether the image contains '{}'. Rate how well the image "
        "matches this description with a value between 0 (not present) and 1 "
        "(clearly present).";
    t.context =
        "Context: The image is a 2x2 grid of snapshots of one scene in temporal "
        "order: top-left first, then top-right, then bottom-left, and bottom-right "
        "last. Treat the quadrants as consecutive moments of the same scene and "
        "judge changes and motion across them.";
    t.consideration =
        "Consideration: Assign a high score whenever '{}' appears anywhere in the "
        "image, even if it is small, partially visible, or not the central element.";
    t.output_score =
        "Output: Respond with the score only, as a single number rounded to one "
        "decimal place.";
    t.output_reason =
        "Output: Respond with the score rounded to one decimal place, followed by "
        "a brief one-sentence reason.";
    return t;
}

PromptTemplates PromptTemplates::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot open prompt template file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw config_error("invalid JSON in prompt template file: " + path);

    PromptTemplates t = defaults();
    if (j.contains("task")) t.task = j["task"].get<std::string>();
    if (j.contains("context")) t.context = j["context"].get<std::string>();
    if (j.contains("consideration")) t.consideration = j["consideration"].get<std::string>();
    if (j.contains("output_score")) t.output_score = j["output_score"].get<std::string>();
    if (j.contains("output_reason")) t.output_reason = j["output_reason"].get<std::string>();
    return t;
}

namespace {

std::string substitute(const std::string& tmpl, const std::string& query) {
    std::string out = tmpl;
    std::size_t pos = 0;
    while ((pos = out.find("{}", pos)) != std::string::npos) {
        out.replace(pos, 2, query);
        pos += query.size();
    }
    return out;
}

} // namespace

Prompt build_prompt(const std::string& query, Variant variant,
                    const PromptOptions& options, const PromptTemplates& templates) {
    if (query.empty())
        throw data_error("empty query for prompt");

    Prompt p;
    p.variant = variant;
    p.sections.emplace_back("task", substitute(templates.task, query));
    if (variant == Variant::grid)
        p.sections.emplace_back("context", substitute(templates.context, query));
    if (options.consideration)
        p.sections.emplace_back("consideration", substitute(templates.consideration, query));
    p.sections.emplace_back("output", options.reasoning ? templates.output_reason
                                                        : templates.output_score);

    for (const auto& [name, text] : p.sections) {
        if (!p.rendered.empty()) p.rendered += "\n\n";
        p.rendered += text;
    }
    return p;
}

namespace {

struct ParsedScore {
    double value;
    std::size_t end; // offset just past the matched token
};

std::optional<ParsedScore> scan_score(const std::string& text) {
    static const std::regex number(R"(-?(?:\d+\.\d*|\.\d+|\d+))");
    auto begin = std::sregex_iterator(text.begin(), text.end(), number);
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
        double v = std::stod(it->str());
        if (v >= 0.0 && v <= 1.0)
            return ParsedScore{v, static_cast<std::size_t>(it->position() + it->length())};
    }
    return std::nullopt;
}

std::string trim(std::string s) {
    s.erase(0, s.find_first_not_of(" \t\n\r.:,;"));
    s.erase(s.find_last_not_of(" \t\n\r") + 1);
    return s;
}

} // namespace

std::optional<double> parse_score(const std::string& text) {
    auto parsed = scan_score(text);
    if (!parsed) return std::nullopt;
    return std::min(1.0, std::max(0.0, parsed->value));
}

std::string MockChatBackend::complete(const cv::Mat& image, const std::string& prompt) {
    std::uint64_t h = fnv1a64(prompt, seed_ ^ 0x3333333333333333ULL);
    int meta[3] = {image.rows, image.cols, image.type()};
    h = fnv1a64(meta, sizeof(meta), h);
    std::size_t row_bytes = image.cols * image.elemSize();
    for (int r = 0; r < image.rows; ++r)
        h = fnv1a64(image.ptr(r), row_bytes, h);

    int tenths = static_cast<int>(h % 11); // 0.0 .. 1.0 in steps of 0.1
    char buf[8];
    std::snprintf(buf, sizeof(buf), "%d.%d", tenths / 10, tenths % 10);
    return std::string("Score: ") + buf + ". Mock assessment of the scene.";
}

OpenAiChatBackend::OpenAiChatBackend(OpenAiBackendConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.url.empty())
        throw config_error("chat backend URL not configured");
}

std::string OpenAiChatBackend::complete(const cv::Mat& image, const std::string& prompt) {
    std::vector<uchar> png;
    cv::imencode(".png", image, png);
    nlohmann::json req = {
        {"model", cfg_.model},
        {"temperature", 0},
        {"messages",
         {{{"role", "user"},
           {"content",
            {{{"type", "text"}, {"text", prompt}},
             {{"type", "image_url"},
              {"image_url",
               {{"url", "data:image/png;base64," +
                            base64_encode(png.data(), png.size())}}}}}}}}},
    };

    httplib::Client client(cfg_.url);
    client.set_connection_timeout(0, cfg_.timeout_ms * 1000LL);
    client.set_read_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);

    std::string last_error;
    for (int attempt = 0; attempt <= cfg_.transport_retries; ++attempt) {
        auto res = client.Post(cfg_.path, req.dump(), "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status != 200) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        auto json = nlohmann::json::parse(res->body, nullptr, false);
        if (json.is_discarded() || !json.contains("choices") || json["choices"].empty()) {
            last_error = "malformed chat completion response";
            continue;
        }
        const auto& msg = json["choices"][0]["message"];
        if (!msg.contains("content") || !msg["content"].is_string()) {
            last_error = "chat completion without text content";
            continue;
        }
        return msg["content"].get<std::string>();
    }
    throw backend_error("chat backend " + cfg_.url + " failed after " +
                        std::to_string(cfg_.transport_retries + 1) + " attempts (" +
                        last_error + ")");
}

Gateway::Gateway(std::shared_ptr<ChatBackend> backend, GatewayConfig cfg)
    : backend_(std::move(backend)), cfg_(cfg), inflight_(cfg.max_inflight) {
    if (!backend_)
        throw config_error("vqa gateway requires a backend");
    if (cfg_.fallback_score < 0.0 || cfg_.fallback_score > 1.0)
        throw config_error("fallback score must lie in [0,1]");
}

VqaResult Gateway::ask(const cv::Mat& image, const Prompt& prompt) {
    auto guard = inflight_.acquire();

    std::string last_response;
    for (int attempt = 0; attempt <= cfg_.parse_retries; ++attempt) {
        calls_++;
        last_response = backend_->complete(image, prompt.rendered);
        auto parsed = scan_score(last_response);
        if (parsed) {
            VqaResult r;
            r.score = std::min(1.0, std::max(0.0, parsed->value));
            r.reason = trim(last_response.substr(parsed->end));
            if (r.reason.empty()) r.reason = trim(last_response);
            r.raw_response = last_response;
            r.fallback_used = false;
            return r;
        }
    }

    VqaResult r;
    r.score = cfg_.fallback_score;
    r.reason = "unparsable response; fallback score applied";
    r.raw_response = last_response;
    r.fallback_used = true;
    return r;
}

} // namespace cvad::vqa
