// Independent test oracles. These deliberately use naive scalar loops and
// stay decoupled from the implementation paths they check.
#pragma once

#include <opencv2/core.hpp>

#include <cstdint>
#include <random>
#include <vector>

namespace oracle {

inline double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double naive_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Exhaustive argmax with lowest-index tie-break.
inline int argmax_scan(const std::vector<double>& scores) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(scores.size()); ++i)
        if (scores[i] > scores[best]) best = i;
    return best;
}

// Corner-aligned bilinear interpolation, element by element.
inline std::vector<std::vector<double>> naive_upsample(
    const std::vector<std::vector<double>>& src, int rows, int cols) {
    int sr = static_cast<int>(src.size());
    int sc = static_cast<int>(src[0].size());
    std::vector<std::vector<double>> dst(rows, std::vector<double>(cols));
    for (int y = 0; y < rows; ++y) {
        double sy = (sr == 1 || rows == 1) ? 0.0 : double(y) * (sr - 1) / (rows - 1);
        int y0 = int(sy), y1 = std::min(y0 + 1, sr - 1);
        double fy = sy - y0;
        for (int x = 0; x < cols; ++x) {
            double sx = (sc == 1 || cols == 1) ? 0.0 : double(x) * (sc - 1) / (cols - 1);
            int x0 = int(sx), x1 = std::min(x0 + 1, sc - 1);
            double fx = sx - x0;
            double top = src[y0][x0] * (1 - fx) + src[y0][x1] * fx;
            double bot = src[y1][x0] * (1 - fx) + src[y1][x1] * fx;
            dst[y][x] = top * (1 - fy) + bot * fy;
        }
    }
    return dst;
}

// All-pairs AUC: fraction of (positive, negative) pairs ordered correctly,
// ties counted as half.
inline double allpairs_auc(const std::vector<double>& scores,
                           const std::vector<std::uint8_t>& labels) {
    double wins = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!labels[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

inline cv::Mat random_image(std::mt19937_64& rng, int rows, int cols) {
    cv::Mat img(rows, cols, CV_8UC3);
    std::uniform_int_distribution<int> dist(0, 255);
    for (int y = 0; y < rows; ++y)
        for (int x = 0; x < cols; ++x)
            img.at<cv::Vec3b>(y, x) = cv::Vec3b(
                static_cast<uchar>(dist(rng)), static_cast<uchar>(dist(rng)),
                static_cast<uchar>(dist(rng)));
    return img;
}

} // namespace oracle
