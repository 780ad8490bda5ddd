#pragma once

#include "embedding.hpp"
#include "media.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace cvad::keyframe {

// Key-frame selection orderings exposed for the ablation harness.
// clip_then_group is the default pipeline path.
enum class Strategy {
    random,           // 4 random frames, random representative
    clip_only,        // top-4 frames by text similarity
    group_then_clip,  // best frame per quarter group
    clip_then_group,  // representative by similarity, then uniform spacing
};

Strategy strategy_from_string(const std::string& name);
std::string to_string(Strategy s);

struct Selection {
    int rep_index = 0;                 // argmax of similarity, ties -> lowest index
    std::vector<double> scores;        // full per-frame similarity vector
};

struct KeyFrameSet {
    int rep_index = 0;
    std::array<int, 4> key_indices{};  // strictly increasing, within-segment
};

// Scores every frame of the segment against the query embedding and picks
// the representative frame (highest dot product, lowest index on ties).
Selection select_representative(const media::Segment& segment,
                                const embed::Vector& text_embedding,
                                embed::Gateway& gateway,
                                int max_inflight = 4);

// Uniform key frames: index i*(N/4) + (rep_index mod N/4) for i in 0..3.
// Requires N a multiple of 4.
KeyFrameSet select_key_frames(int segment_length, int rep_index);

// Full strategy dispatch; `seed` only affects the random strategy.
KeyFrameSet select(const media::Segment& segment,
                   const embed::Vector& text_embedding,
                   embed::Gateway& gateway,
                   Strategy strategy,
                   std::uint64_t seed = 0,
                   int max_inflight = 4);

} // namespace cvad::keyframe
