#include "plot.hpp"

#include "dataset.hpp"
#include "error.hpp"

#include <nlohmann/json.hpp>

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <fstream>

namespace cvad::plot {

namespace {

struct Series {
    std::vector<double> raw;
    std::vector<double> smoothed;
};

Series read_series(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw data_error("cannot open score file: " + path);
    Series s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw data_error("malformed score line in " + path);
        s.raw.push_back(j.value("raw", 0.0));
        s.smoothed.push_back(j.value("smoothed", 0.0));
    }
    if (s.raw.empty())
        throw data_error("empty score file: " + path);
    return s;
}

} // namespace

void render_score_plot(const std::string& score_file, const std::string& label_file,
                       const std::string& out_image) {
    Series series = read_series(score_file);
    int n = static_cast<int>(series.raw.size());

    const int width = 1200, height = 400;
    const int margin_left = 60, margin_right = 20, margin_top = 20, margin_bottom = 40;
    const int plot_w = width - margin_left - margin_right;
    const int plot_h = height - margin_top - margin_bottom;

    double max_score = 1.0;
    for (int i = 0; i < n; ++i)
        max_score = std::max({max_score, series.raw[i], series.smoothed[i]});

    auto px = [&](int frame) {
        return margin_left + (n <= 1 ? 0 : frame * plot_w / (n - 1));
    };
    auto py = [&](double score) {
        return margin_top + static_cast<int>((1.0 - score / max_score) * plot_h);
    };

    cv::Mat canvas(height, width, CV_8UC3, cv::Scalar(255, 255, 255));

    if (!label_file.empty()) {
        std::vector<std::uint8_t> labels = dataset::read_label_file(label_file);
        if (static_cast<int>(labels.size()) != n)
            throw data_error("label length does not match score length");
        for (int i = 0; i < n; ++i) {
            if (!labels[i]) continue;
            int x0 = px(i);
            int x1 = px(std::min(i + 1, n - 1));
            cv::rectangle(canvas, cv::Point(x0, margin_top),
                          cv::Point(std::max(x1, x0 + 1), margin_top + plot_h),
                          cv::Scalar(210, 210, 255), cv::FILLED);
        }
    }

    // axes and gridlines at 0.25 steps
    cv::rectangle(canvas, cv::Point(margin_left, margin_top),
                  cv::Point(margin_left + plot_w, margin_top + plot_h),
                  cv::Scalar(120, 120, 120));
    for (double tick = 0.0; tick <= max_score + 1e-9; tick += 0.25 * max_score) {
        int y = py(tick);
        cv::line(canvas, cv::Point(margin_left, y), cv::Point(margin_left + plot_w, y),
                 cv::Scalar(230, 230, 230));
        char label[32];
        std::snprintf(label, sizeof(label), "%.2f", tick);
        cv::putText(canvas, label, cv::Point(8, y + 4), cv::FONT_HERSHEY_SIMPLEX, 0.4,
                    cv::Scalar(60, 60, 60));
    }

    for (int i = 1; i < n; ++i) {
        cv::line(canvas, cv::Point(px(i - 1), py(series.raw[i - 1])),
                 cv::Point(px(i), py(series.raw[i])), cv::Scalar(200, 160, 160));
        cv::line(canvas, cv::Point(px(i - 1), py(series.smoothed[i - 1])),
                 cv::Point(px(i), py(series.smoothed[i])), cv::Scalar(180, 60, 20), 2);
    }
    cv::putText(canvas, "frame", cv::Point(width / 2 - 20, height - 12),
                cv::FONT_HERSHEY_SIMPLEX, 0.45, cv::Scalar(60, 60, 60));

    if (!cv::imwrite(out_image, canvas))
        throw data_error("cannot write plot image: " + out_image);
}

} // namespace cvad::plot
