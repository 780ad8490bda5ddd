#include "pipeline.hpp"

#include "concurrency.hpp"
#include "context.hpp"
#include "dataset.hpp"
#include "error.hpp"
#include "media.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

namespace fs = std::filesystem;

namespace cvad::pipeline {

namespace {

BackendMode mode_from_string(const std::string& s) {
    if (s == "mock") return BackendMode::mock;
    if (s == "http" || s == "openai") return BackendMode::http;
    throw config_error("unknown backend mode: " + s);
}

std::string mode_to_string(BackendMode m) {
    return m == BackendMode::mock ? "mock" : "http";
}

} // namespace

void Config::validate() const {
    if (segment_length < 4 || segment_length % 4 != 0)
        throw config_error("segment length must be a positive multiple of 4");
    if (resolution <= 0)
        throw config_error("working resolution must be positive");
    if (scales.empty())
        throw config_error("at least one window scale required");
    for (int s : scales)
        if (s <= 0 || resolution % s != 0)
            throw config_error("window scale " + std::to_string(s) +
                               " does not divide resolution " + std::to_string(resolution));
    weights.validate();
    if (sigma <= 0.0)
        throw config_error("sigma must be positive");
    if (embedding.mode == BackendMode::http && embedding.url.empty())
        throw config_error("embedding backend URL required in http mode");
    if (vqa.mode == BackendMode::http && vqa.url.empty())
        throw config_error("vqa backend URL required in http mode");
}

void Config::apply_profile(const std::string& name) {
    profile = name;
    if (name == "ave") {
        weights = {0.6, 0.3, 0.1};
        scales = {48, 80, 240};
    } else if (name == "sht") {
        weights = {0.5, 0.3, 0.2};
        scales = {48, 80, 120};
    } else if (name == "ub" || name == "ucf") {
        weights = {0.6, 0.1, 0.3};
        scales = {48, 80, 120};
    } else {
        throw config_error("unknown dataset profile: " + name);
    }
}

Config Config::from_json(const nlohmann::json& j) {
    Config cfg;
    if (j.contains("profile") && !j["profile"].get<std::string>().empty())
        cfg.apply_profile(j["profile"].get<std::string>());

    if (j.contains("segment_length")) cfg.segment_length = j["segment_length"].get<int>();
    if (j.contains("resolution")) cfg.resolution = j["resolution"].get<int>();
    if (j.contains("scales")) cfg.scales = j["scales"].get<std::vector<int>>();
    if (j.contains("weights")) {
        const auto& w = j["weights"];
        cfg.weights.frame = w.value("frame", cfg.weights.frame);
        cfg.weights.position = w.value("position", cfg.weights.position);
        cfg.weights.temporal = w.value("temporal", cfg.weights.temporal);
    }
    if (j.contains("sigma")) cfg.sigma = j["sigma"].get<double>();
    if (j.contains("contexts")) cfg.contexts_enabled = j["contexts"].get<bool>();
    if (j.contains("keyframe_strategy"))
        cfg.strategy = keyframe::strategy_from_string(j["keyframe_strategy"].get<std::string>());
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();

    if (j.contains("embedding")) {
        const auto& e = j["embedding"];
        if (e.contains("backend")) cfg.embedding.mode = mode_from_string(e["backend"]);
        cfg.embedding.url = e.value("url", cfg.embedding.url);
        cfg.embedding.dim = e.value("dim", cfg.embedding.dim);
        cfg.embedding.timeout_ms = e.value("timeout_ms", cfg.embedding.timeout_ms);
        cfg.embedding.retries = e.value("retries", cfg.embedding.retries);
        cfg.embedding.max_inflight = e.value("max_inflight", cfg.embedding.max_inflight);
        if (e.contains("templates"))
            cfg.embedding.templates = e["templates"].get<std::vector<std::string>>();
    }
    if (j.contains("vqa")) {
        const auto& v = j["vqa"];
        if (v.contains("backend")) cfg.vqa.mode = mode_from_string(v["backend"]);
        cfg.vqa.url = v.value("url", cfg.vqa.url);
        cfg.vqa.model = v.value("model", cfg.vqa.model);
        cfg.vqa.timeout_ms = v.value("timeout_ms", cfg.vqa.timeout_ms);
        cfg.vqa.retries = v.value("retries", cfg.vqa.retries);
        cfg.vqa.max_inflight = v.value("max_inflight", cfg.vqa.max_inflight);
        cfg.vqa.fallback_score = v.value("fallback_score", cfg.vqa.fallback_score);
        cfg.vqa.prompt_templates_path = v.value("prompt_templates", cfg.vqa.prompt_templates_path);
        cfg.vqa.reasoning = v.value("reasoning", cfg.vqa.reasoning);
        cfg.vqa.consideration = v.value("consideration", cfg.vqa.consideration);
    }
    cfg.validate();
    return cfg;
}

nlohmann::json Config::to_json() const {
    return {
        {"profile", profile},
        {"segment_length", segment_length},
        {"resolution", resolution},
        {"scales", scales},
        {"weights",
         {{"frame", weights.frame},
          {"position", weights.position},
          {"temporal", weights.temporal}}},
        {"sigma", sigma},
        {"contexts", contexts_enabled},
        {"keyframe_strategy", keyframe::to_string(strategy)},
        {"seed", seed},
        {"output_dir", output_dir},
        {"embedding",
         {{"backend", mode_to_string(embedding.mode)},
          {"url", embedding.url},
          {"dim", embedding.dim},
          {"timeout_ms", embedding.timeout_ms},
          {"retries", embedding.retries},
          {"max_inflight", embedding.max_inflight},
          {"templates", embedding.templates}}},
        {"vqa",
         {{"backend", mode_to_string(vqa.mode)},
          {"url", vqa.url},
          {"model", vqa.model},
          {"timeout_ms", vqa.timeout_ms},
          {"retries", vqa.retries},
          {"max_inflight", vqa.max_inflight},
          {"fallback_score", vqa.fallback_score},
          {"prompt_templates", vqa.prompt_templates_path},
          {"reasoning", vqa.reasoning},
          {"consideration", vqa.consideration}}},
    };
}

std::string sanitize_query(const std::string& query) {
    std::string out;
    for (char c : query) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u))
            out.push_back(static_cast<char>(std::tolower(u)));
        else if (c == '-' || c == '_')
            out.push_back(c);
        else
            out.push_back('_');
    }
    return out;
}

namespace {

std::shared_ptr<embed::Backend> make_embedding_backend(const Config& cfg) {
    if (cfg.embedding.mode == BackendMode::mock)
        return std::make_shared<embed::MockBackend>(cfg.seed, cfg.embedding.dim);
    embed::HttpBackendConfig hc;
    hc.url = cfg.embedding.url;
    hc.dim = cfg.embedding.dim;
    hc.timeout_ms = cfg.embedding.timeout_ms;
    hc.retries = cfg.embedding.retries;
    return std::make_shared<embed::HttpBackend>(hc);
}

std::shared_ptr<vqa::ChatBackend> make_chat_backend(const Config& cfg) {
    if (cfg.vqa.mode == BackendMode::mock)
        return std::make_shared<vqa::MockChatBackend>(cfg.seed);
    vqa::OpenAiBackendConfig oc;
    oc.url = cfg.vqa.url;
    oc.model = cfg.vqa.model;
    oc.timeout_ms = cfg.vqa.timeout_ms;
    return std::make_shared<vqa::OpenAiChatBackend>(oc);
}

struct AuditEntry {
    int segment = 0;
    std::string role; // frame | position | temporal
    vqa::VqaResult result;
};

struct SegmentScores {
    double fused = 0.0;
    std::vector<AuditEntry> audit;
};

// Formats a double the way nlohmann::json does, so files are byte-stable.
void write_jsonl_line(std::ofstream& out, const nlohmann::json& j) {
    out << j.dump() << "\n";
}

} // namespace

DetectOutput detect(const Config& cfg, const std::string& input_dir,
                    const std::vector<std::string>& queries) {
    cfg.validate();
    if (queries.empty())
        throw config_error("at least one query required");

    media::FrameSequence seq = media::load_frames(input_dir, cfg.resolution);
    media::SegmentationResult segmentation = media::segment_stream(seq, cfg.segment_length);
    if (segmentation.segments.empty())
        throw data_error("video too short for one segment: " + input_dir);

    embed::Gateway embeddings(make_embedding_backend(cfg), cfg.embedding.templates);
    vqa::GatewayConfig gw;
    gw.parse_retries = cfg.vqa.retries;
    gw.fallback_score = cfg.vqa.fallback_score;
    gw.max_inflight = cfg.vqa.max_inflight;
    vqa::Gateway chat(make_chat_backend(cfg), gw);

    vqa::PromptTemplates templates =
        cfg.vqa.prompt_templates_path.empty()
            ? vqa::PromptTemplates::defaults()
            : vqa::PromptTemplates::from_file(cfg.vqa.prompt_templates_path);
    vqa::PromptOptions options{cfg.vqa.reasoning, cfg.vqa.consideration};

    DetectOutput out;
    out.video_id = seq.video_id;
    out.total_frames = segmentation.total_frames;
    out.dropped_indices = segmentation.dropped_indices;
    for (const auto& seg : segmentation.segments)
        out.segment_lengths.push_back(seg.length());

    fs::create_directories(cfg.output_dir);

    std::vector<std::vector<double>> smoothed_series;
    std::map<std::string, std::vector<AuditEntry>> audit_per_query;

    for (const auto& query : queries) {
        embed::Vector text = embeddings.encode_text(query);
        vqa::Prompt plain = vqa::build_prompt(query, vqa::Variant::plain, options, templates);
        vqa::Prompt grid = vqa::build_prompt(query, vqa::Variant::grid, options, templates);

        std::vector<double> segment_scores;
        std::vector<AuditEntry> audit;
        for (std::size_t si = 0; si < segmentation.segments.size(); ++si) {
            const media::Segment& segment = segmentation.segments[si];
            keyframe::KeyFrameSet keys = keyframe::select(
                segment, text, embeddings, cfg.strategy, cfg.seed,
                cfg.embedding.max_inflight);
            const cv::Mat& rep = segment.frames[keys.rep_index].pixels;

            SegmentScores scores;
            if (cfg.contexts_enabled) {
                context::SimilarityMap map = context::window_similarity_map(
                    rep, text, cfg.scales, embeddings, cfg.embedding.max_inflight);
                cv::Mat pc = context::apply_attention(rep, map.values);
                std::array<cv::Mat, 4> key_mats;
                for (int i = 0; i < 4; ++i)
                    key_mats[i] = segment.frames[keys.key_indices[i]].pixels;
                context::GridImage tc = context::select_temporal_context(
                    key_mats, text, cfg.scales, embeddings, cfg.embedding.max_inflight);

                // the three per-segment requests go out concurrently; the
                // gateway's semaphore bounds global in-flight count
                struct Req {
                    const cv::Mat* image;
                    const vqa::Prompt* prompt;
                    const char* role;
                };
                std::array<Req, 3> reqs{Req{&rep, &plain, "frame"},
                                        Req{&pc, &plain, "position"},
                                        Req{&tc.pixels, &grid, "temporal"}};
                auto results = parallel_map(3, 3, [&](std::size_t i) {
                    return chat.ask(*reqs[i].image, *reqs[i].prompt);
                });
                scores.fused = scoring::fuse(results[0].score, results[1].score,
                                             results[2].score, cfg.weights);
                for (std::size_t i = 0; i < 3; ++i)
                    scores.audit.push_back(
                        {static_cast<int>(si), reqs[i].role, results[i]});
            } else {
                vqa::VqaResult r = chat.ask(rep, plain);
                scores.fused = cfg.weights.frame * r.score;
                scores.audit.push_back({static_cast<int>(si), "frame", r});
            }

            segment_scores.push_back(scores.fused);
            audit.insert(audit.end(), scores.audit.begin(), scores.audit.end());
        }

        QuerySeries series;
        series.raw = scoring::expand(segment_scores, out.segment_lengths, out.total_frames);
        series.smoothed = scoring::gaussian_smooth(series.raw, cfg.sigma);
        smoothed_series.push_back(series.smoothed);
        out.per_query[query] = std::move(series);
        audit_per_query[query] = std::move(audit);
    }

    out.aggregated = scoring::aggregate_max(smoothed_series);
    out.vqa_calls = chat.calls_issued();

    // score + audit files, deterministic order
    auto score_path = [&](const std::string& tag, const char* ext) {
        return (fs::path(cfg.output_dir) / (out.video_id + "__" + tag + ext)).string();
    };
    for (const auto& [query, series] : out.per_query) {
        std::string tag = sanitize_query(query);
        std::string jsonl = score_path(tag, ".scores.jsonl");
        std::string csv = score_path(tag, ".scores.csv");
        std::ofstream jf(jsonl);
        std::ofstream cf(csv);
        cf << "frame_index,raw,smoothed\n";
        for (int i = 0; i < out.total_frames; ++i) {
            write_jsonl_line(jf, {{"video_id", out.video_id},
                                  {"query", query},
                                  {"frame_index", i},
                                  {"raw", series.raw[i]},
                                  {"smoothed", series.smoothed[i]}});
            cf << i << "," << nlohmann::json(series.raw[i]).dump() << ","
               << nlohmann::json(series.smoothed[i]).dump() << "\n";
        }
        out.files_written.push_back(jsonl);
        out.files_written.push_back(csv);
    }
    if (queries.size() > 1) {
        std::string agg = score_path("aggregated", ".scores.jsonl");
        std::ofstream jf(agg);
        for (int i = 0; i < out.total_frames; ++i)
            write_jsonl_line(jf, {{"video_id", out.video_id},
                                  {"query", "aggregated"},
                                  {"frame_index", i},
                                  {"raw", out.aggregated[i]},
                                  {"smoothed", out.aggregated[i]}});
        out.files_written.push_back(agg);
    }
    {
        std::string audit_file = score_path("audit", ".jsonl");
        std::ofstream af(audit_file);
        for (const auto& query : queries) {
            for (const auto& e : audit_per_query[query]) {
                write_jsonl_line(af, {{"video_id", out.video_id},
                                      {"query", query},
                                      {"segment", e.segment},
                                      {"role", e.role},
                                      {"score", e.result.score},
                                      {"fallback_used", e.result.fallback_used},
                                      {"response", e.result.raw_response}});
            }
        }
        out.files_written.push_back(audit_file);
    }
    {
        std::string run_file = score_path("run", ".json");
        nlohmann::json run = {{"video_id", out.video_id},
                              {"total_frames", out.total_frames},
                              {"segment_lengths", out.segment_lengths},
                              {"dropped_indices", out.dropped_indices},
                              {"queries", queries},
                              {"vqa_calls", out.vqa_calls},
                              {"config", cfg.to_json()}};
        std::ofstream rf(run_file);
        rf << run.dump(2) << "\n";
        out.files_written.push_back(run_file);
    }
    return out;
}

std::vector<double> read_score_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw data_error("cannot open score file: " + path);
    std::vector<double> scores;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.contains("smoothed"))
            throw data_error("malformed score line in " + path);
        scores.push_back(j["smoothed"].get<double>());
    }
    if (scores.empty())
        throw data_error("empty score file: " + path);
    return scores;
}

metrics::Report evaluate_run(const std::string& scores_dir,
                             const std::string& manifest_path) {
    dataset::CvadManifest manifest = dataset::load_cvad_manifest(manifest_path);

    std::map<std::string, metrics::LabeledFrames> per_class;
    std::map<std::string, std::string> categories;
    for (const auto& cls : manifest.classes) {
        metrics::LabeledFrames pooled;
        auto add_video = [&](const std::string& video_id) {
            std::string score_file =
                (fs::path(scores_dir) /
                 (video_id + "__" + sanitize_query(cls.name) + ".scores.jsonl"))
                    .string();
            std::vector<double> scores = read_score_file(score_file);
            auto it = cls.label_files.find(video_id);
            if (it == cls.label_files.end())
                throw data_error("no label file for " + video_id + " in class " + cls.name);
            std::vector<std::uint8_t> labels = dataset::read_label_file(it->second);
            if (labels.size() != scores.size())
                throw data_error("score/label length mismatch for " + video_id +
                                 " in class " + cls.name);
            pooled.scores.insert(pooled.scores.end(), scores.begin(), scores.end());
            pooled.labels.insert(pooled.labels.end(), labels.begin(), labels.end());
        };
        for (const auto& v : cls.positive_videos) add_video(v);
        for (const auto& v : cls.negative_videos) add_video(v);
        per_class[cls.name] = std::move(pooled);
        categories[cls.name] = cls.category;
    }
    return metrics::evaluate(per_class, categories);
}

double auroc_single(const std::string& score_file, const std::string& label_file) {
    metrics::LabeledFrames data;
    data.scores = read_score_file(score_file);
    data.labels = dataset::read_label_file(label_file);
    if (data.scores.size() != data.labels.size())
        throw data_error("score/label length mismatch");
    return metrics::micro_auroc(data);
}

} // namespace cvad::pipeline
