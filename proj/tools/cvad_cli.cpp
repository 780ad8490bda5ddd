// Command-line front end. Talks to the engine exclusively through the C API
// so it doubles as a smoke test of the shared library surface.

#include <cvad/cvad.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot open config file: " << path << "\n";
        std::exit(1);
    }
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) {
        std::cerr << "error: invalid JSON in config file: " << path << "\n";
        std::exit(1);
    }
    return j;
}

void apply_env(json& cfg) {
    if (const char* v = std::getenv("CVAD_PROFILE")) cfg["profile"] = v;
    if (const char* v = std::getenv("CVAD_EMBED_URL")) {
        cfg["embedding"]["backend"] = "http";
        cfg["embedding"]["url"] = v;
    }
    if (const char* v = std::getenv("CVAD_VQA_URL")) {
        cfg["vqa"]["backend"] = "http";
        cfg["vqa"]["url"] = v;
    }
    if (const char* v = std::getenv("CVAD_VQA_MODEL")) cfg["vqa"]["model"] = v;
    if (const char* v = std::getenv("CVAD_OUTPUT_DIR")) cfg["output_dir"] = v;
}

struct Engine {
    cvad_engine* handle = nullptr;

    explicit Engine(const json& cfg) {
        if (cvad_engine_create(cfg.dump().c_str(), &handle) != CVAD_OK) {
            std::cerr << "error: invalid engine configuration\n";
            std::exit(1);
        }
    }
    ~Engine() { cvad_engine_destroy(handle); }

    int fail(cvad_status status) const {
        std::cerr << "error: " << cvad_last_error(handle) << "\n";
        return static_cast<int>(status);
    }
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Customizable video anomaly detection: score videos against "
                 "user-defined anomaly text via key-frame selection, context "
                 "generation, and VQA"};
    app.require_subcommand(1);

    // config shared by subcommands: flags > env > config file > defaults
    std::string config_file;
    app.add_option("--config", config_file, "JSON config file")->configurable(false);

    auto* detect = app.add_subcommand("detect", "Score a video against anomaly text");
    std::string input_dir, profile, backend_url, embed_url, model, out_dir, strategy;
    std::vector<std::string> queries;
    std::optional<int> segment, max_inflight;
    std::optional<double> sigma;
    std::optional<std::uint64_t> seed;
    std::vector<double> weights;
    std::vector<int> scales;
    bool mock = false, no_context = false;
    detect->add_option("--input", input_dir, "frame directory (<video_id>/%06d.jpg|png)")
        ->required();
    detect->add_option("--query", queries, "anomaly text; repeat for multiple queries")
        ->required();
    detect->add_option("--segment", segment, "segment length N (multiple of 4)");
    detect->add_option("--profile", profile, "dataset profile: ave|sht|ub|ucf");
    detect->add_option("--backend", backend_url, "VQA chat backend URL (OpenAI-compatible)");
    detect->add_option("--model", model, "VQA model name");
    detect->add_option("--embed-backend", embed_url, "embedding backend URL");
    detect->add_flag("--mock", mock, "use deterministic mock backends");
    detect->add_option("--out", out_dir, "output directory for score files");
    detect->add_option("--weights", weights, "fusion weights: frame position temporal")
        ->expected(3);
    detect->add_option("--sigma", sigma, "temporal Gaussian smoothing sigma (frames)");
    detect->add_option("--scales", scales, "window sides, must divide the resolution");
    detect->add_flag("--no-context", no_context, "frame-only path, skip PC/TC");
    detect->add_option("--max-inflight", max_inflight, "max concurrent VQA requests");
    detect->add_option("--seed", seed, "seed for mock backends and random strategy");
    detect->add_option("--strategy", strategy,
                       "key-frame strategy: random|clip_only|group_then_clip|clip_then_group");

    auto* evaluate = app.add_subcommand("evaluate", "Evaluate detect outputs");
    std::string scores_dir, manifest_path, report_path = "report.json";
    std::string score_file, label_file;
    evaluate->add_option("--scores", scores_dir, "directory of detect score files");
    evaluate->add_option("--manifest", manifest_path, "C-VAD manifest JSON");
    evaluate->add_option("--out", report_path, "report JSON output path");
    evaluate->add_option("--score-file", score_file, "single score JSONL (with --labels)");
    evaluate->add_option("--labels", label_file, "raw binary label file");

    auto* build = app.add_subcommand("build-cvad", "Build a C-VAD dataset from annotations");
    std::string videos_path, annotations_path, categories_path, build_out;
    build->add_option("--videos", videos_path, "video manifest JSON")->required();
    build->add_option("--annotations", annotations_path,
                      "per-video class interval annotations JSON")
        ->required();
    build->add_option("--categories", categories_path, "class -> category JSON");
    build->add_option("--out", build_out, "output directory")->required();

    auto* plot = app.add_subcommand("plot", "Render a score curve to PNG");
    std::string plot_scores, plot_labels, plot_out;
    plot->add_option("--scores", plot_scores, "score JSONL file")->required();
    plot->add_option("--labels", plot_labels, "raw binary label file");
    plot->add_option("--out", plot_out, "output image path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    json cfg = json::object();
    if (!config_file.empty()) cfg = load_config_file(config_file);
    apply_env(cfg);

    if (detect->parsed()) {
        if (!profile.empty()) cfg["profile"] = profile;
        if (segment) cfg["segment_length"] = *segment;
        if (sigma) cfg["sigma"] = *sigma;
        if (seed) cfg["seed"] = *seed;
        if (!scales.empty()) cfg["scales"] = scales;
        if (!weights.empty())
            cfg["weights"] = {{"frame", weights[0]},
                              {"position", weights[1]},
                              {"temporal", weights[2]}};
        if (no_context) cfg["contexts"] = false;
        if (!strategy.empty()) cfg["keyframe_strategy"] = strategy;
        if (max_inflight) cfg["vqa"]["max_inflight"] = *max_inflight;
        if (!backend_url.empty()) {
            cfg["vqa"]["backend"] = "http";
            cfg["vqa"]["url"] = backend_url;
        }
        if (!model.empty()) cfg["vqa"]["model"] = model;
        if (!embed_url.empty()) {
            cfg["embedding"]["backend"] = "http";
            cfg["embedding"]["url"] = embed_url;
        }
        if (mock) {
            cfg["vqa"]["backend"] = "mock";
            cfg["embedding"]["backend"] = "mock";
        }
        if (!out_dir.empty()) cfg["output_dir"] = out_dir;

        Engine engine(cfg);
        std::vector<const char*> qptrs;
        for (const auto& q : queries) qptrs.push_back(q.c_str());
        cvad_status status = cvad_detect(engine.handle, input_dir.c_str(), qptrs.data(),
                                         qptrs.size(), nullptr);
        if (status != CVAD_OK) return engine.fail(status);
        std::cout << "scores written to "
                  << (cfg.contains("output_dir") ? cfg["output_dir"].get<std::string>()
                                                 : std::string("out"))
                  << "\n";
        return 0;
    }

    if (evaluate->parsed()) {
        Engine engine(cfg);
        if (!score_file.empty() || !label_file.empty()) {
            if (score_file.empty() || label_file.empty()) {
                std::cerr << "error: --score-file and --labels must be given together\n";
                return 1;
            }
            double auc = 0.0;
            cvad_status status =
                cvad_auroc(engine.handle, score_file.c_str(), label_file.c_str(), &auc);
            if (status != CVAD_OK) return engine.fail(status);
            std::cout << "auroc " << auc << "\n";
            return 0;
        }
        if (scores_dir.empty() || manifest_path.empty()) {
            std::cerr << "error: evaluate needs --scores and --manifest "
                         "(or --score-file with --labels)\n";
            return 1;
        }
        cvad_status status = cvad_evaluate(engine.handle, scores_dir.c_str(),
                                           manifest_path.c_str(), report_path.c_str());
        if (status != CVAD_OK) return engine.fail(status);

        std::ifstream in(report_path);
        json report = json::parse(in, nullptr, false);
        if (!report.is_discarded()) {
            for (const auto& c : report["classes"])
                std::cout << c["name"].get<std::string>() << "  auroc "
                          << c["auroc"].get<double>() << "\n";
            std::cout << "overall  " << report["overall"].get<double>() << "\n";
        }
        return 0;
    }

    if (build->parsed()) {
        Engine engine(cfg);
        cvad_status status = cvad_build_dataset(
            engine.handle, videos_path.c_str(), annotations_path.c_str(),
            categories_path.empty() ? nullptr : categories_path.c_str(),
            build_out.c_str());
        if (status != CVAD_OK) return engine.fail(status);
        std::cout << "manifest written to " << build_out << "/cvad_manifest.json\n";
        return 0;
    }

    if (plot->parsed()) {
        Engine engine(cfg);
        cvad_status status = cvad_plot(engine.handle, plot_scores.c_str(),
                                       plot_labels.empty() ? nullptr : plot_labels.c_str(),
                                       plot_out.c_str());
        if (status != CVAD_OK) return engine.fail(status);
        std::cout << "plot written to " << plot_out << "\n";
        return 0;
    }

    return 1;
}
