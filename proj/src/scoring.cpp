#include "scoring.hpp"

#include "error.hpp"

#include <algorithm>
#include <cmath>

namespace cvad::scoring {

void FusionWeights::validate() const {
    if (frame < 0.0 || position < 0.0 || temporal < 0.0)
        throw config_error("fusion weights must be non-negative");
    if (frame == 0.0 && position == 0.0 && temporal == 0.0)
        throw config_error("fusion weights must not all be zero");
}

double fuse(double frame_score, double position_score, double temporal_score,
            const FusionWeights& weights) {
    weights.validate();
    return weights.frame * frame_score + weights.position * position_score +
           weights.temporal * temporal_score;
}

std::vector<double> expand(const std::vector<double>& segment_scores,
                           const std::vector<int>& segment_lengths,
                           int total_frames) {
    if (segment_scores.empty())
        throw data_error("no segment scores to expand");
    if (segment_scores.size() != segment_lengths.size())
        throw data_error("segment score/length count mismatch");

    std::vector<double> out;
    out.reserve(total_frames);
    for (std::size_t s = 0; s < segment_scores.size(); ++s) {
        if (segment_lengths[s] <= 0)
            throw data_error("non-positive segment length");
        out.insert(out.end(), segment_lengths[s], segment_scores[s]);
    }
    if (static_cast<int>(out.size()) > total_frames)
        throw data_error("segment lengths exceed total frame count");
    // backfill for a dropped sub-segment tail
    while (static_cast<int>(out.size()) < total_frames)
        out.push_back(segment_scores.back());
    return out;
}

std::vector<double> gaussian_kernel(double sigma) {
    if (sigma <= 0.0)
        throw config_error("smoothing sigma must be positive");
    int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> kernel(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
        kernel[i + radius] = w;
        sum += w;
    }
    for (double& w : kernel) w /= sum;
    return kernel;
}

std::vector<double> gaussian_smooth(const std::vector<double>& series, double sigma) {
    std::vector<double> kernel = gaussian_kernel(sigma);
    int radius = static_cast<int>(kernel.size() / 2);
    int n = static_cast<int>(series.size());
    if (n == 0) return {};

    auto reflect = [n](int i) {
        // symmetric reflection: ... c b a | a b c ... | c b a ...
        while (i < 0 || i >= n) {
            if (i < 0) i = -i - 1;
            if (i >= n) i = 2 * n - i - 1;
        }
        return i;
    };

    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = -radius; k <= radius; ++k)
            acc += kernel[k + radius] * series[reflect(i + k)];
        out[i] = acc;
    }
    return out;
}

std::vector<double> aggregate_max(const std::vector<std::vector<double>>& series) {
    if (series.empty())
        throw data_error("no score series to aggregate");
    std::size_t n = series.front().size();
    for (const auto& s : series)
        if (s.size() != n)
            throw data_error("score series length mismatch in aggregation");

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double m = series[0][i];
        for (std::size_t q = 1; q < series.size(); ++q) m = std::max(m, series[q][i]);
        out[i] = m;
    }
    return out;
}

} // namespace cvad::scoring
