#include "keyframe.hpp"

#include "concurrency.hpp"
#include "error.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace cvad::keyframe {

Strategy strategy_from_string(const std::string& name) {
    if (name == "random") return Strategy::random;
    if (name == "clip_only") return Strategy::clip_only;
    if (name == "group_then_clip") return Strategy::group_then_clip;
    if (name == "clip_then_group") return Strategy::clip_then_group;
    throw config_error("unknown key-frame strategy: " + name);
}

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::random: return "random";
        case Strategy::clip_only: return "clip_only";
        case Strategy::group_then_clip: return "group_then_clip";
        case Strategy::clip_then_group: return "clip_then_group";
    }
    return "?";
}

Selection select_representative(const media::Segment& segment,
                                const embed::Vector& text_embedding,
                                embed::Gateway& gateway,
                                int max_inflight) {
    if (segment.frames.empty())
        throw data_error("cannot select a representative frame of an empty segment");

    Selection sel;
    sel.scores = parallel_map(segment.frames.size(), max_inflight, [&](std::size_t i) {
        embed::Vector v = gateway.encode_image(segment.frames[i].pixels);
        return embed::similarity(v, text_embedding);
    });

    sel.rep_index = 0;
    for (std::size_t i = 1; i < sel.scores.size(); ++i)
        if (sel.scores[i] > sel.scores[sel.rep_index])
            sel.rep_index = static_cast<int>(i);
    return sel;
}

KeyFrameSet select_key_frames(int segment_length, int rep_index) {
    if (segment_length < 4 || segment_length % 4 != 0)
        throw config_error("segment length must be a positive multiple of 4");
    if (rep_index < 0 || rep_index >= segment_length)
        throw config_error("representative index out of range");

    int group = segment_length / 4;
    int offset = rep_index % group;
    KeyFrameSet set;
    set.rep_index = rep_index;
    for (int i = 0; i < 4; ++i) set.key_indices[i] = i * group + offset;
    return set;
}

KeyFrameSet select(const media::Segment& segment,
                   const embed::Vector& text_embedding,
                   embed::Gateway& gateway,
                   Strategy strategy,
                   std::uint64_t seed,
                   int max_inflight) {
    int n = segment.length();
    if (n < 4 || n % 4 != 0)
        throw config_error("segment length must be a positive multiple of 4");

    switch (strategy) {
        case Strategy::clip_then_group: {
            Selection sel = select_representative(segment, text_embedding, gateway, max_inflight);
            return select_key_frames(n, sel.rep_index);
        }
        case Strategy::group_then_clip: {
            // Best-scoring frame within each quarter; representative is the
            // overall best of the four.
            Selection sel = select_representative(segment, text_embedding, gateway, max_inflight);
            int group = n / 4;
            KeyFrameSet set;
            for (int g = 0; g < 4; ++g) {
                int best = g * group;
                for (int i = g * group; i < (g + 1) * group; ++i)
                    if (sel.scores[i] > sel.scores[best]) best = i;
                set.key_indices[g] = best;
            }
            set.rep_index = set.key_indices[0];
            for (int i : set.key_indices)
                if (sel.scores[i] > sel.scores[set.rep_index]) set.rep_index = i;
            return set;
        }
        case Strategy::clip_only: {
            Selection sel = select_representative(segment, text_embedding, gateway, max_inflight);
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                return sel.scores[a] > sel.scores[b];
            });
            std::array<int, 4> top{order[0], order[1], order[2], order[3]};
            std::sort(top.begin(), top.end());
            KeyFrameSet set;
            set.key_indices = top;
            set.rep_index = sel.rep_index;
            return set;
        }
        case Strategy::random: {
            std::mt19937_64 rng(seed ^ (static_cast<std::uint64_t>(segment.start_index) << 20));
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            std::shuffle(order.begin(), order.end(), rng);
            std::array<int, 4> picks{order[0], order[1], order[2], order[3]};
            std::sort(picks.begin(), picks.end());
            KeyFrameSet set;
            set.key_indices = picks;
            set.rep_index = picks[rng() % 4];
            return set;
        }
    }
    throw config_error("unhandled key-frame strategy");
}

} // namespace cvad::keyframe
