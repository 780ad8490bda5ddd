#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cvad::metrics {

struct LabeledFrames {
    std::vector<double> scores;
    std::vector<std::uint8_t> labels; // 1 = anomalous

    void append(const LabeledFrames& other);
};

// Micro AUROC over pooled frames: rank-based (Mann-Whitney) with average
// ranks for ties. Throws when only one class is present.
double micro_auroc(const LabeledFrames& data);

struct ClassResult {
    std::string name;
    std::string category;
    double auroc = 0.0;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

struct Report {
    std::vector<ClassResult> classes;            // sorted by class name
    std::map<std::string, double> category_avg;  // only non-empty categories
    double overall = 0.0;                        // mean over all classes
};

// Pooled per-class frames in; per-class AUROC, category averages, and the
// overall average out.
Report evaluate(const std::map<std::string, LabeledFrames>& per_class,
                const std::map<std::string, std::string>& class_category);

nlohmann::json report_to_json(const Report& report);
std::string report_to_table(const Report& report);

} // namespace cvad::metrics
