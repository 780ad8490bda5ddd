#pragma once

#include "metrics.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace cvad::dataset {

struct VideoEntry {
    std::string video_id;
    std::string path;        // frame directory
    std::string label_path;  // optional per-frame binary labels
    int frame_count = 0;     // optional; counted from `path` when 0
};

std::vector<VideoEntry> load_video_manifest(const std::string& path);

struct AnnotationEvent {
    std::string cls;
    int start_frame = 0; // inclusive
    int end_frame = 0;   // inclusive
};

// {video_id: [{class, start_frame, end_frame}]}
using Annotations = std::map<std::string, std::vector<AnnotationEvent>>;

Annotations load_annotations(const std::string& path);

struct CvadClass {
    std::string name;
    std::string category;
    std::vector<std::string> positive_videos;
    std::vector<std::string> negative_videos;
    std::map<std::string, std::string> label_files; // video_id -> label file path
};

struct CvadManifest {
    std::string source;
    std::vector<CvadClass> classes;
};

// Partitions every test video into positive/negative per class and writes
// frame-level labels: 1 only where the class appears within positive videos.
// Label files are raw uint8 arrays, one file per video per class, under
// out_dir/<class>/<video_id>.labels.
CvadManifest build_cvad(const std::vector<VideoEntry>& videos,
                        const Annotations& annotations,
                        const std::map<std::string, std::string>& class_category,
                        const std::string& out_dir,
                        const std::string& source_id = "");

CvadManifest load_cvad_manifest(const std::string& path);
void save_cvad_manifest(const CvadManifest& manifest, const std::string& path);

// Binary label array for one class, videos concatenated in manifest order
// (positive list first, then negative).
std::vector<std::uint8_t> load_labels(const CvadManifest& manifest,
                                      const std::string& cls);

std::vector<std::uint8_t> read_label_file(const std::string& path);
void write_label_file(const std::string& path, const std::vector<std::uint8_t>& labels);

} // namespace cvad::dataset
