#pragma once

#include "embedding.hpp"
#include "keyframe.hpp"
#include "metrics.hpp"
#include "scoring.hpp"
#include "vqa.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cvad::pipeline {

enum class BackendMode { mock, http };

struct EmbeddingConfig {
    BackendMode mode = BackendMode::mock;
    std::string url;
    int dim = 512;
    int timeout_ms = 30000;
    int retries = 2;
    int max_inflight = 4;
    std::vector<std::string> templates = {"a photo of a {}", "a photo of the {}"};
};

struct VqaConfig {
    BackendMode mode = BackendMode::mock;
    std::string url;
    std::string model;
    int timeout_ms = 120000;
    int retries = 2;        // parse retries (fresh requests)
    int max_inflight = 3;
    double fallback_score = 0.0;
    std::string prompt_templates_path;
    bool reasoning = true;
    bool consideration = true;
};

struct Config {
    int segment_length = 24;
    int resolution = 240;
    std::vector<int> scales = {48, 80, 120};
    scoring::FusionWeights weights{1.0, 1.0, 1.0};
    double sigma = 10.0;
    bool contexts_enabled = true;
    keyframe::Strategy strategy = keyframe::Strategy::clip_then_group;
    std::uint64_t seed = 0;
    std::string profile;
    std::string output_dir = "out";
    EmbeddingConfig embedding;
    VqaConfig vqa;

    void validate() const;
    void apply_profile(const std::string& name);

    // Parses over the built-in defaults; a "profile" key is applied first so
    // explicit fields in the same JSON override the profile.
    static Config from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct QuerySeries {
    std::vector<double> raw;
    std::vector<double> smoothed;
};

struct DetectOutput {
    std::string video_id;
    int total_frames = 0;
    std::vector<int> segment_lengths;
    std::vector<int> dropped_indices;
    std::map<std::string, QuerySeries> per_query;
    std::vector<double> aggregated; // elementwise max of smoothed series
    std::uint64_t vqa_calls = 0;
    std::vector<std::string> files_written;
};

// Full run over one video frame directory: ingest, segment, per-query
// key-frame selection + context generation + VQA, fuse, expand, smooth,
// aggregate, and write score/audit files under cfg.output_dir.
DetectOutput detect(const Config& cfg, const std::string& input_dir,
                    const std::vector<std::string>& queries);

// Query text -> stable file-name token.
std::string sanitize_query(const std::string& query);

// Smoothed scores of a detect score file (JSONL), in frame order.
std::vector<double> read_score_file(const std::string& path);

// Per-class pooled evaluation of detect outputs against a C-VAD manifest.
// Expects scores_dir to hold <video>__<class>.scores.jsonl for every video
// in each class partition.
metrics::Report evaluate_run(const std::string& scores_dir,
                             const std::string& manifest_path);

// Single-series AUROC: score JSONL + raw binary label file.
double auroc_single(const std::string& score_file, const std::string& label_file);

} // namespace cvad::pipeline
