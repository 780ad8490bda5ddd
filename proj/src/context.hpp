#pragma once

#include "embedding.hpp"

#include <array>
#include <vector>

namespace cvad::context {

struct WindowGrid {
    int side = 0;
    int rows = 0;
    int cols = 0;
    std::vector<cv::Mat> windows; // row-major views into the source image
};

// Exact non-overlapping tiling; the window side must divide the image side.
WindowGrid tile_windows(const cv::Mat& image, int side);

struct SimilarityMap {
    cv::Mat values;                 // CV_64F, frame resolution, mean of scales
    std::vector<cv::Mat> per_scale; // CV_64F raw maps at tiling resolution
    std::vector<int> scales;
};

// Per scale: tile, encode each window, dot against the text embedding, then
// bilinearly upsample (corner-aligned) to frame resolution. The final map is
// the mean of the upsampled per-scale maps.
SimilarityMap window_similarity_map(const cv::Mat& image,
                                    const embed::Vector& text_embedding,
                                    const std::vector<int>& scales,
                                    embed::Gateway& gateway,
                                    int max_inflight = 4);

// Min-max normalization to [0,1]. A constant input maps to all ones so a
// uniformly relevant frame passes through apply_attention unchanged.
cv::Mat min_max_normalize(const cv::Mat& map);

// Corner-aligned bilinear resampling of a CV_64F map.
cv::Mat upsample_bilinear(const cv::Mat& src, int rows, int cols);

// Position context: per-pixel product of the normalized map and the image,
// rounded to the nearest 8-bit value.
cv::Mat apply_attention(const cv::Mat& image, const cv::Mat& map);

struct GridImage {
    cv::Mat pixels;   // (2*side) x (2*side)
    int scale = 0;
    int row = 0;      // window position in the tiling
    int col = 0;
};

// One 2x2 grid per window position; quadrants are the same-position windows
// of the four key frames in temporal row-major order (k0 TL, k1 TR, k2 BL,
// k3 BR).
std::vector<GridImage> build_grids(const std::array<cv::Mat, 4>& key_frames, int side);

// Temporal context: the grid across all scales with the highest similarity
// to the query. Ties break toward the lowest scale, then row-major position.
GridImage select_temporal_context(const std::array<cv::Mat, 4>& key_frames,
                                  const embed::Vector& text_embedding,
                                  const std::vector<int>& scales,
                                  embed::Gateway& gateway,
                                  int max_inflight = 4);

} // namespace cvad::context
