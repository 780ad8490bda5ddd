#pragma once

#include <vector>

namespace cvad::scoring {

struct FusionWeights {
    double frame = 1.0;     // weight for the representative-frame score
    double position = 1.0;  // weight for the position-context score
    double temporal = 1.0;  // weight for the temporal-context score

    void validate() const;  // all >= 0, not all zero
};

// Late fusion: weighted sum of the three VQA scores.
double fuse(double frame_score, double position_score, double temporal_score,
            const FusionWeights& weights);

// Duplicates each segment score over that segment's frames. Dropped tail
// frames (total_frames - sum of lengths, at most 3) receive the last
// segment's score.
std::vector<double> expand(const std::vector<double>& segment_scores,
                           const std::vector<int>& segment_lengths,
                           int total_frames);

// 1-D Gaussian convolution with reflect padding. Kernel radius ceil(3*sigma),
// kernel normalized to sum 1.
std::vector<double> gaussian_smooth(const std::vector<double>& series, double sigma);

std::vector<double> gaussian_kernel(double sigma);

// Per-frame elementwise maximum across query series of equal length.
std::vector<double> aggregate_max(const std::vector<std::vector<double>>& series);

} // namespace cvad::scoring
