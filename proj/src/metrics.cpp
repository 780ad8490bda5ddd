#include "metrics.hpp"

#include "error.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cvad::metrics {

void LabeledFrames::append(const LabeledFrames& other) {
    scores.insert(scores.end(), other.scores.begin(), other.scores.end());
    labels.insert(labels.end(), other.labels.begin(), other.labels.end());
}

double micro_auroc(const LabeledFrames& data) {
    if (data.scores.size() != data.labels.size())
        throw data_error("score/label length mismatch");
    std::size_t n = data.scores.size();
    std::size_t n_pos = 0;
    for (auto l : data.labels) {
        if (l != 0 && l != 1)
            throw data_error("labels must be binary");
        n_pos += l;
    }
    std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw data_error("AUROC undefined: only one class present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return data.scores[a] < data.scores[b];
    });

    // average ranks over tie groups, 1-based
    std::vector<double> rank(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && data.scores[order[j + 1]] == data.scores[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }

    double pos_rank_sum = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        if (data.labels[k]) pos_rank_sum += rank[k];

    double u = pos_rank_sum - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Report evaluate(const std::map<std::string, LabeledFrames>& per_class,
                const std::map<std::string, std::string>& class_category) {
    if (per_class.empty())
        throw data_error("no classes to evaluate");

    Report report;
    std::map<std::string, std::pair<double, int>> cat_acc;
    double total = 0.0;
    for (const auto& [name, frames] : per_class) {
        ClassResult r;
        r.name = name;
        auto it = class_category.find(name);
        r.category = it == class_category.end() ? "" : it->second;
        r.auroc = micro_auroc(frames);
        for (auto l : frames.labels) (l ? r.n_pos : r.n_neg)++;
        total += r.auroc;
        if (!r.category.empty()) {
            auto& [sum, count] = cat_acc[r.category];
            sum += r.auroc;
            count += 1;
        }
        report.classes.push_back(std::move(r));
    }
    report.overall = total / static_cast<double>(per_class.size());
    for (const auto& [cat, acc] : cat_acc)
        report.category_avg[cat] = acc.first / acc.second;
    return report;
}

nlohmann::json report_to_json(const Report& report) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : report.classes) {
        classes.push_back({{"name", c.name},
                           {"category", c.category},
                           {"auroc", c.auroc},
                           {"n_pos", c.n_pos},
                           {"n_neg", c.n_neg}});
    }
    return {{"classes", classes},
            {"category_avg", report.category_avg},
            {"overall", report.overall}};
}

std::string report_to_table(const Report& report) {
    std::ostringstream out;
    out << "class                    category      auroc     pos/neg\n";
    for (const auto& c : report.classes) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-24s %-12s %8.4f  %zu/%zu\n",
                      c.name.c_str(), c.category.empty() ? "-" : c.category.c_str(),
                      c.auroc, c.n_pos, c.n_neg);
        out << line;
    }
    for (const auto& [cat, avg] : report.category_avg) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-24s %-12s %8.4f\n",
                      ("avg:" + cat).c_str(), "", avg);
        out << line;
    }
    char line[160];
    std::snprintf(line, sizeof(line), "%-24s %-12s %8.4f\n", "overall", "", report.overall);
    out << line;
    return out.str();
}

} // namespace cvad::metrics
