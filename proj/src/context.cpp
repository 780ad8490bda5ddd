#include "context.hpp"

#include "concurrency.hpp"
#include "error.hpp"

#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <cmath>

namespace cvad::context {

WindowGrid tile_windows(const cv::Mat& image, int side) {
    if (image.empty())
        throw data_error("cannot tile an empty image");
    if (side <= 0 || image.rows % side != 0 || image.cols % side != 0)
        throw config_error("window side " + std::to_string(side) +
                           " does not tile a " + std::to_string(image.cols) + "x" +
                           std::to_string(image.rows) + " image");

    WindowGrid grid;
    grid.side = side;
    grid.rows = image.rows / side;
    grid.cols = image.cols / side;
    grid.windows.reserve(static_cast<std::size_t>(grid.rows) * grid.cols);
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c)
            grid.windows.push_back(image(cv::Rect(c * side, r * side, side, side)));
    return grid;
}

cv::Mat upsample_bilinear(const cv::Mat& src, int rows, int cols) {
    CV_Assert(src.type() == CV_64F);
    cv::Mat dst(rows, cols, CV_64F);
    for (int y = 0; y < rows; ++y) {
        double sy = (src.rows == 1 || rows == 1)
                        ? 0.0
                        : static_cast<double>(y) * (src.rows - 1) / (rows - 1);
        int y0 = static_cast<int>(sy);
        int y1 = std::min(y0 + 1, src.rows - 1);
        double fy = sy - y0;
        for (int x = 0; x < cols; ++x) {
            double sx = (src.cols == 1 || cols == 1)
                            ? 0.0
                            : static_cast<double>(x) * (src.cols - 1) / (cols - 1);
            int x0 = static_cast<int>(sx);
            int x1 = std::min(x0 + 1, src.cols - 1);
            double fx = sx - x0;
            double top = src.at<double>(y0, x0) * (1 - fx) + src.at<double>(y0, x1) * fx;
            double bot = src.at<double>(y1, x0) * (1 - fx) + src.at<double>(y1, x1) * fx;
            dst.at<double>(y, x) = top * (1 - fy) + bot * fy;
        }
    }
    return dst;
}

SimilarityMap window_similarity_map(const cv::Mat& image,
                                    const embed::Vector& text_embedding,
                                    const std::vector<int>& scales,
                                    embed::Gateway& gateway,
                                    int max_inflight) {
    if (scales.empty())
        throw config_error("window similarity map requires at least one scale");

    SimilarityMap map;
    map.scales = scales;
    cv::Mat sum = cv::Mat::zeros(image.rows, image.cols, CV_64F);
    for (int side : scales) {
        WindowGrid grid = tile_windows(image, side);
        std::vector<double> sims = parallel_map(
            grid.windows.size(), max_inflight, [&](std::size_t i) {
                return embed::similarity(gateway.encode_image(grid.windows[i]),
                                         text_embedding);
            });
        cv::Mat raw(grid.rows, grid.cols, CV_64F);
        for (int r = 0; r < grid.rows; ++r)
            for (int c = 0; c < grid.cols; ++c)
                raw.at<double>(r, c) = sims[static_cast<std::size_t>(r) * grid.cols + c];
        map.per_scale.push_back(raw);
        sum += upsample_bilinear(raw, image.rows, image.cols);
    }
    map.values = sum / static_cast<double>(scales.size());
    return map;
}

cv::Mat min_max_normalize(const cv::Mat& map) {
    CV_Assert(map.type() == CV_64F);
    double lo, hi;
    cv::minMaxLoc(map, &lo, &hi);
    if (hi - lo <= 1e-12)
        return cv::Mat::ones(map.rows, map.cols, CV_64F);
    // explicit per-element form: OpenCV's fused scale-add can land a hair
    // outside [0,1], while (x - lo) / (hi - lo) pins the endpoints exactly
    cv::Mat out(map.rows, map.cols, CV_64F);
    double range = hi - lo;
    for (int y = 0; y < map.rows; ++y) {
        const double* src = map.ptr<double>(y);
        double* dst = out.ptr<double>(y);
        for (int x = 0; x < map.cols; ++x) dst[x] = (src[x] - lo) / range;
    }
    return out;
}

cv::Mat apply_attention(const cv::Mat& image, const cv::Mat& map) {
    if (image.rows != map.rows || image.cols != map.cols)
        throw data_error("attention map resolution does not match the image");
    CV_Assert(image.type() == CV_8UC3 && map.type() == CV_64F);

    cv::Mat norm = min_max_normalize(map);
    cv::Mat out(image.rows, image.cols, CV_8UC3);
    for (int y = 0; y < image.rows; ++y) {
        const auto* src = image.ptr<cv::Vec3b>(y);
        const auto* m = norm.ptr<double>(y);
        auto* dst = out.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.cols; ++x) {
            for (int ch = 0; ch < 3; ++ch)
                dst[x][ch] = static_cast<uchar>(std::lround(m[x] * src[x][ch]));
        }
    }
    return out;
}

std::vector<GridImage> build_grids(const std::array<cv::Mat, 4>& key_frames, int side) {
    const cv::Mat& first = key_frames[0];
    for (const cv::Mat& k : key_frames) {
        if (k.empty() || k.rows != first.rows || k.cols != first.cols)
            throw data_error("key frames must share one resolution");
    }
    if (side <= 0 || first.rows % side != 0 || first.cols % side != 0)
        throw config_error("window side does not tile the key frames");

    int rows = first.rows / side;
    int cols = first.cols / side;
    std::vector<GridImage> grids;
    grids.reserve(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            GridImage g;
            g.scale = side;
            g.row = r;
            g.col = c;
            g.pixels = cv::Mat(2 * side, 2 * side, first.type());
            cv::Rect window(c * side, r * side, side, side);
            // temporal order: k0 TL, k1 TR, k2 BL, k3 BR
            key_frames[0](window).copyTo(g.pixels(cv::Rect(0, 0, side, side)));
            key_frames[1](window).copyTo(g.pixels(cv::Rect(side, 0, side, side)));
            key_frames[2](window).copyTo(g.pixels(cv::Rect(0, side, side, side)));
            key_frames[3](window).copyTo(g.pixels(cv::Rect(side, side, side, side)));
            grids.push_back(std::move(g));
        }
    }
    return grids;
}

GridImage select_temporal_context(const std::array<cv::Mat, 4>& key_frames,
                                  const embed::Vector& text_embedding,
                                  const std::vector<int>& scales,
                                  embed::Gateway& gateway,
                                  int max_inflight) {
    if (scales.empty())
        throw config_error("temporal context requires at least one scale");

    std::vector<int> ordered = scales;
    std::sort(ordered.begin(), ordered.end());

    std::vector<GridImage> candidates;
    for (int side : ordered) {
        auto grids = build_grids(key_frames, side);
        candidates.insert(candidates.end(),
                          std::make_move_iterator(grids.begin()),
                          std::make_move_iterator(grids.end()));
    }

    std::vector<double> sims = parallel_map(
        candidates.size(), max_inflight, [&](std::size_t i) {
            return embed::similarity(gateway.encode_image(candidates[i].pixels),
                                     text_embedding);
        });

    std::size_t best = 0;
    for (std::size_t i = 1; i < sims.size(); ++i)
        if (sims[i] > sims[best]) best = i;
    return candidates[best];
}

} // namespace cvad::context
