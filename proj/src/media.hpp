#pragma once

#include <opencv2/core.hpp>

#include <string>
#include <vector>

namespace cvad::media {

struct Frame {
    int index = 0;              // zero-based, contiguous within a video
    cv::Mat pixels;             // square BGR 8-bit image at the working resolution
    std::string source_id;
};

struct FrameSequence {
    std::string video_id;
    std::vector<Frame> frames;
    int resolution = 0;
};

struct Segment {
    std::string video_id;
    int start_index = 0;
    std::vector<Frame> frames;  // length is a positive multiple of 4

    int length() const { return static_cast<int>(frames.size()); }
};

// Segmentation output plus the coverage report for frames the segmenter
// could not place (a trailing remainder shorter than 4).
struct SegmentationResult {
    std::vector<Segment> segments;
    std::vector<int> dropped_indices; // trailing frames not covered by any segment
    int total_frames = 0;
};

// Loads every image file in `dir` (lexicographic order) and resizes each to
// resolution x resolution with a plain (non-letterboxed) resize.
FrameSequence load_frames(const std::string& dir, int resolution,
                          const std::string& video_id = "");

// Splits the stream into consecutive non-overlapping segments of length N
// (N a multiple of 4, N >= 4). A tail remainder r >= 4 is truncated down to
// a multiple of 4 and emitted as a short final segment; a remainder r < 4 is
// dropped and reported in dropped_indices.
SegmentationResult segment_stream(const FrameSequence& seq, int segment_length);

} // namespace cvad::media
