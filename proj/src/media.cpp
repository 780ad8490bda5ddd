#include "media.hpp"

#include "error.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

#include <algorithm>
#include <filesystem>

namespace fs = std::filesystem;

namespace cvad::media {

namespace {

bool is_image_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp";
}

} // namespace

FrameSequence load_frames(const std::string& dir, int resolution,
                          const std::string& video_id) {
    if (resolution <= 0)
        throw config_error("working resolution must be positive");
    fs::path root(dir);
    if (!fs::is_directory(root))
        throw data_error("frame directory not found: " + dir);

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_regular_file() && is_image_file(entry.path()))
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end(),
              [](const fs::path& a, const fs::path& b) {
                  return a.filename().string() < b.filename().string();
              });
    if (files.empty())
        throw data_error("no frames found in " + dir);

    FrameSequence seq;
    seq.video_id = video_id.empty() ? root.filename().string() : video_id;
    seq.resolution = resolution;
    seq.frames.reserve(files.size());
    for (std::size_t i = 0; i < files.size(); ++i) {
        cv::Mat img = cv::imread(files[i].string(), cv::IMREAD_COLOR);
        if (img.empty())
            throw data_error("undecodable image file: " + files[i].string());
        cv::Mat resized;
        cv::resize(img, resized, cv::Size(resolution, resolution), 0, 0, cv::INTER_LINEAR);
        seq.frames.push_back(Frame{static_cast<int>(i), resized, seq.video_id});
    }
    return seq;
}

SegmentationResult segment_stream(const FrameSequence& seq, int segment_length) {
    if (segment_length < 4)
        throw config_error("segment length must be at least 4");
    if (segment_length % 4 != 0)
        throw config_error("segment length must be a multiple of 4");

    SegmentationResult result;
    result.total_frames = static_cast<int>(seq.frames.size());

    int pos = 0;
    int total = result.total_frames;
    while (total - pos >= segment_length) {
        Segment seg;
        seg.video_id = seq.video_id;
        seg.start_index = pos;
        seg.frames.assign(seq.frames.begin() + pos,
                          seq.frames.begin() + pos + segment_length);
        result.segments.push_back(std::move(seg));
        pos += segment_length;
    }

    int remainder = total - pos;
    int tail = (remainder / 4) * 4; // largest multiple of 4 that fits
    if (tail > 0) {
        Segment seg;
        seg.video_id = seq.video_id;
        seg.start_index = pos;
        seg.frames.assign(seq.frames.begin() + pos, seq.frames.begin() + pos + tail);
        result.segments.push_back(std::move(seg));
        pos += tail;
    }
    for (int i = pos; i < total; ++i) result.dropped_indices.push_back(i);
    return result;
}

} // namespace cvad::media
