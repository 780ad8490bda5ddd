#include "dataset.hpp"

#include "error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

namespace fs = std::filesystem;

namespace cvad::dataset {

namespace {

nlohmann::json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw data_error("cannot open file: " + path);
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded())
        throw data_error("invalid JSON: " + path);
    return j;
}

int count_frames(const VideoEntry& video) {
    if (video.frame_count > 0) return video.frame_count;
    if (video.path.empty() || !fs::is_directory(video.path))
        throw data_error("cannot determine frame count for video " + video.video_id +
                         ": no frame_count and no frame directory");
    int n = 0;
    for (const auto& entry : fs::directory_iterator(video.path))
        if (entry.is_regular_file()) ++n;
    if (n == 0)
        throw data_error("no frames found for video " + video.video_id);
    return n;
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    return out;
}

} // namespace

std::vector<VideoEntry> load_video_manifest(const std::string& path) {
    nlohmann::json j = parse_json_file(path);
    if (!j.is_array())
        throw data_error("video manifest must be a JSON array: " + path);
    std::vector<VideoEntry> videos;
    for (const auto& item : j) {
        VideoEntry v;
        v.video_id = item.at("video_id").get<std::string>();
        v.path = item.value("path", "");
        v.label_path = item.value("label_path", "");
        v.frame_count = item.value("frame_count", 0);
        videos.push_back(std::move(v));
    }
    if (videos.empty())
        throw data_error("empty video manifest: " + path);
    return videos;
}

Annotations load_annotations(const std::string& path) {
    nlohmann::json j = parse_json_file(path);
    if (!j.is_object())
        throw data_error("annotations must be a JSON object: " + path);
    Annotations ann;
    for (const auto& [video_id, events] : j.items()) {
        for (const auto& e : events) {
            AnnotationEvent ev;
            ev.cls = e.at("class").get<std::string>();
            ev.start_frame = e.at("start_frame").get<int>();
            ev.end_frame = e.at("end_frame").get<int>();
            if (ev.start_frame < 0 || ev.end_frame < ev.start_frame)
                throw data_error("invalid frame interval for video " + video_id);
            ann[video_id].push_back(std::move(ev));
        }
        if (!ann.count(video_id)) ann[video_id] = {};
    }
    return ann;
}

CvadManifest build_cvad(const std::vector<VideoEntry>& videos,
                        const Annotations& annotations,
                        const std::map<std::string, std::string>& class_category,
                        const std::string& out_dir,
                        const std::string& source_id) {
    for (const auto& [video_id, _] : annotations) {
        bool known = std::any_of(videos.begin(), videos.end(), [&](const VideoEntry& v) {
            return v.video_id == video_id;
        });
        if (!known)
            throw data_error("annotation references unknown video: " + video_id);
    }

    std::set<std::string> class_names;
    for (const auto& [_, events] : annotations)
        for (const auto& e : events) class_names.insert(e.cls);
    if (class_names.empty())
        throw data_error("annotations contain no classes");

    fs::create_directories(out_dir);

    CvadManifest manifest;
    manifest.source = source_id;
    for (const auto& cls : class_names) {
        CvadClass entry;
        entry.name = cls;
        auto cat = class_category.find(cls);
        entry.category = cat == class_category.end() ? "" : cat->second;

        fs::path class_dir = fs::path(out_dir) / sanitize(cls);
        fs::create_directories(class_dir);

        for (const auto& video : videos) {
            int n = count_frames(video);
            std::vector<std::uint8_t> labels(n, 0);
            bool positive = false;
            auto ann = annotations.find(video.video_id);
            if (ann != annotations.end()) {
                for (const auto& e : ann->second) {
                    if (e.cls != cls) continue;
                    if (e.end_frame >= n)
                        throw data_error("annotation exceeds frame count for video " +
                                         video.video_id);
                    positive = true;
                    for (int f = e.start_frame; f <= e.end_frame; ++f) labels[f] = 1;
                }
            }
            (positive ? entry.positive_videos : entry.negative_videos)
                .push_back(video.video_id);
            std::string label_file = (class_dir / (video.video_id + ".labels")).string();
            write_label_file(label_file, labels);
            entry.label_files[video.video_id] = label_file;
        }
        if (entry.positive_videos.empty())
            throw data_error("empty class: " + cls);
        manifest.classes.push_back(std::move(entry));
    }
    return manifest;
}

void save_cvad_manifest(const CvadManifest& manifest, const std::string& path) {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& c : manifest.classes) {
        classes.push_back({{"name", c.name},
                           {"category", c.category},
                           {"positive_videos", c.positive_videos},
                           {"negative_videos", c.negative_videos},
                           {"label_files", c.label_files}});
    }
    nlohmann::json j = {{"source", manifest.source}, {"classes", classes}};
    std::ofstream out(path);
    if (!out)
        throw data_error("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

CvadManifest load_cvad_manifest(const std::string& path) {
    nlohmann::json j = parse_json_file(path);
    CvadManifest manifest;
    manifest.source = j.value("source", "");
    for (const auto& item : j.at("classes")) {
        CvadClass c;
        c.name = item.at("name").get<std::string>();
        c.category = item.value("category", "");
        c.positive_videos = item.at("positive_videos").get<std::vector<std::string>>();
        c.negative_videos = item.at("negative_videos").get<std::vector<std::string>>();
        c.label_files = item.at("label_files").get<std::map<std::string, std::string>>();
        manifest.classes.push_back(std::move(c));
    }
    if (manifest.classes.empty())
        throw data_error("manifest has no classes: " + path);
    return manifest;
}

std::vector<std::uint8_t> read_label_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw data_error("cannot open label file: " + path);
    std::vector<std::uint8_t> labels((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    for (auto& l : labels) {
        if (l != 0 && l != 1)
            throw data_error("label file contains non-binary values: " + path);
    }
    return labels;
}

void write_label_file(const std::string& path, const std::vector<std::uint8_t>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw data_error("cannot write label file: " + path);
    out.write(reinterpret_cast<const char*>(labels.data()),
              static_cast<std::streamsize>(labels.size()));
}

std::vector<std::uint8_t> load_labels(const CvadManifest& manifest, const std::string& cls) {
    for (const auto& c : manifest.classes) {
        if (c.name != cls) continue;
        std::vector<std::uint8_t> out;
        auto append_video = [&](const std::string& video_id) {
            auto it = c.label_files.find(video_id);
            if (it == c.label_files.end())
                throw data_error("no label file for video " + video_id + " in class " + cls);
            auto labels = read_label_file(it->second);
            out.insert(out.end(), labels.begin(), labels.end());
        };
        for (const auto& v : c.positive_videos) append_video(v);
        for (const auto& v : c.negative_videos) append_video(v);
        return out;
    }
    throw data_error("class not found in manifest: " + cls);
}

} // namespace cvad::dataset
