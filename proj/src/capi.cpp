#include "cvad/cvad.h"

#include "dataset.hpp"
#include "error.hpp"
#include "metrics.hpp"
#include "pipeline.hpp"
#include "plot.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <string>

struct cvad_engine {
    cvad::pipeline::Config config;
    std::string last_error;
};

namespace {

cvad_status run(cvad_engine* engine, const std::function<void()>& fn) {
    if (!engine) return CVAD_ERR_CONFIG;
    try {
        fn();
        engine->last_error.clear();
        return CVAD_OK;
    } catch (const cvad::Error& e) {
        engine->last_error = e.what();
        return static_cast<cvad_status>(static_cast<int>(e.code()));
    } catch (const std::exception& e) {
        engine->last_error = e.what();
        return CVAD_ERR_DATA;
    }
}

} // namespace

extern "C" {

const char* cvad_version(void) { return "0.1.0"; }

cvad_status cvad_engine_create(const char* config_json, cvad_engine** out_engine) {
    if (!out_engine) return CVAD_ERR_CONFIG;
    *out_engine = nullptr;
    try {
        nlohmann::json j = nlohmann::json::object();
        if (config_json && *config_json) {
            j = nlohmann::json::parse(config_json, nullptr, false);
            if (j.is_discarded())
                throw cvad::config_error("engine config is not valid JSON");
        }
        auto* engine = new cvad_engine;
        engine->config = cvad::pipeline::Config::from_json(j);
        *out_engine = engine;
        return CVAD_OK;
    } catch (...) {
        return CVAD_ERR_CONFIG;
    }
}

void cvad_engine_destroy(cvad_engine* engine) { delete engine; }

const char* cvad_last_error(const cvad_engine* engine) {
    return engine ? engine->last_error.c_str() : "";
}

cvad_status cvad_detect(cvad_engine* engine, const char* input_dir,
                        const char* const* queries, size_t n_queries,
                        const char* output_dir) {
    return run(engine, [&] {
        if (!input_dir || !queries || n_queries == 0)
            throw cvad::config_error("detect requires an input directory and queries");
        std::vector<std::string> qs(queries, queries + n_queries);
        cvad::pipeline::Config cfg = engine->config;
        if (output_dir && *output_dir) cfg.output_dir = output_dir;
        cvad::pipeline::detect(cfg, input_dir, qs);
    });
}

cvad_status cvad_evaluate(cvad_engine* engine, const char* scores_dir,
                          const char* cvad_manifest_path, const char* report_path) {
    return run(engine, [&] {
        if (!scores_dir || !cvad_manifest_path || !report_path)
            throw cvad::config_error("evaluate requires scores dir, manifest, and report path");
        auto report = cvad::pipeline::evaluate_run(scores_dir, cvad_manifest_path);
        std::ofstream out(report_path);
        if (!out)
            throw cvad::data_error(std::string("cannot write report: ") + report_path);
        out << cvad::metrics::report_to_json(report).dump(2) << "\n";
    });
}

cvad_status cvad_auroc(cvad_engine* engine, const char* score_file,
                       const char* label_file, double* out_auroc) {
    return run(engine, [&] {
        if (!score_file || !label_file || !out_auroc)
            throw cvad::config_error("auroc requires score file, label file, and output");
        *out_auroc = cvad::pipeline::auroc_single(score_file, label_file);
    });
}

cvad_status cvad_build_dataset(cvad_engine* engine, const char* video_manifest_path,
                               const char* annotations_path,
                               const char* categories_json_path,
                               const char* output_dir) {
    return run(engine, [&] {
        if (!video_manifest_path || !annotations_path || !output_dir)
            throw cvad::config_error(
                "build-dataset requires video manifest, annotations, and output dir");
        auto videos = cvad::dataset::load_video_manifest(video_manifest_path);
        auto annotations = cvad::dataset::load_annotations(annotations_path);
        std::map<std::string, std::string> categories;
        if (categories_json_path && *categories_json_path) {
            std::ifstream in(categories_json_path);
            if (!in)
                throw cvad::data_error(std::string("cannot open categories file: ") +
                                       categories_json_path);
            nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
            if (j.is_discarded() || !j.is_object())
                throw cvad::data_error("categories file must be a JSON object");
            categories = j.get<std::map<std::string, std::string>>();
        }
        auto manifest = cvad::dataset::build_cvad(videos, annotations, categories,
                                                  output_dir);
        cvad::dataset::save_cvad_manifest(
            manifest, std::string(output_dir) + "/cvad_manifest.json");
    });
}

cvad_status cvad_plot(cvad_engine* engine, const char* score_file,
                      const char* label_file, const char* out_image) {
    return run(engine, [&] {
        if (!score_file || !out_image)
            throw cvad::config_error("plot requires a score file and output image path");
        cvad::plot::render_score_plot(score_file, label_file ? label_file : "",
                                      out_image);
    });
}

} // extern "C"
