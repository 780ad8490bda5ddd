#include "dataset.hpp"
#include "error.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <numeric>

using namespace cvad;

namespace {

// three videos, two classes, known intervals
struct Fixture {
    testutil::TempDir tmp;
    std::string videos_path;
    std::string annotations_path;
    std::string out_dir;

    Fixture() {
        videos_path = (tmp.path() / "videos.json").string();
        annotations_path = (tmp.path() / "annotations.json").string();
        out_dir = (tmp.path() / "cvad").string();
        testutil::write_text(tmp.path() / "videos.json", R"([
            {"video_id": "v1", "frame_count": 10},
            {"video_id": "v2", "frame_count": 8},
            {"video_id": "v3", "frame_count": 6}
        ])");
        testutil::write_text(tmp.path() / "annotations.json", R"({
            "v1": [{"class": "bicycle", "start_frame": 3, "end_frame": 5}],
            "v2": [{"class": "fighting", "start_frame": 0, "end_frame": 7},
                   {"class": "bicycle", "start_frame": 2, "end_frame": 2}],
            "v3": []
        })");
    }
};

} // namespace

TEST_CASE("build_cvad partitions videos per class") {
    Fixture f;
    auto videos = dataset::load_video_manifest(f.videos_path);
    auto ann = dataset::load_annotations(f.annotations_path);
    auto manifest = dataset::build_cvad(videos, ann,
                                        {{"bicycle", "appearance"}, {"fighting", "action"}},
                                        f.out_dir, "fixture");
    REQUIRE(manifest.classes.size() == 2);

    const auto& bicycle = manifest.classes[0];
    CHECK(bicycle.name == "bicycle");
    CHECK(bicycle.category == "appearance");
    CHECK(bicycle.positive_videos == std::vector<std::string>{"v1", "v2"});
    CHECK(bicycle.negative_videos == std::vector<std::string>{"v3"});

    const auto& fighting = manifest.classes[1];
    CHECK(fighting.positive_videos == std::vector<std::string>{"v2"});
    CHECK(fighting.negative_videos == std::vector<std::string>{"v1", "v3"});

    // every video appears exactly once per class partition
    for (const auto& cls : manifest.classes)
        CHECK(cls.positive_videos.size() + cls.negative_videos.size() == 3);
}

TEST_CASE("frame label sums match the annotated frame counts") {
    Fixture f;
    auto videos = dataset::load_video_manifest(f.videos_path);
    auto ann = dataset::load_annotations(f.annotations_path);
    auto manifest = dataset::build_cvad(videos, ann, {}, f.out_dir);

    auto labels_v1 = dataset::read_label_file(manifest.classes[0].label_files.at("v1"));
    CHECK(labels_v1 ==
          std::vector<std::uint8_t>{0, 0, 0, 1, 1, 1, 0, 0, 0, 0});
    // bicycle: 3 frames in v1 + 1 in v2
    int bicycle_sum = 0;
    for (const auto& [video, path] : manifest.classes[0].label_files) {
        auto l = dataset::read_label_file(path);
        bicycle_sum += std::accumulate(l.begin(), l.end(), 0);
    }
    CHECK(bicycle_sum == 4);
    // negatives are all-zero
    auto labels_v3 = dataset::read_label_file(manifest.classes[0].label_files.at("v3"));
    CHECK(std::accumulate(labels_v3.begin(), labels_v3.end(), 0) == 0);
    CHECK(labels_v3.size() == 6);
}

TEST_CASE("load_labels concatenates videos in manifest order") {
    Fixture f;
    auto videos = dataset::load_video_manifest(f.videos_path);
    auto ann = dataset::load_annotations(f.annotations_path);
    auto manifest = dataset::build_cvad(videos, ann, {}, f.out_dir);
    auto all = dataset::load_labels(manifest, "bicycle");
    CHECK(all.size() == 10 + 8 + 6); // v1, v2 (positives) then v3 (negative)
    CHECK_THROWS_AS(dataset::load_labels(manifest, "nonexistent"), Error);
}

TEST_CASE("manifest save/load round-trip") {
    Fixture f;
    auto videos = dataset::load_video_manifest(f.videos_path);
    auto ann = dataset::load_annotations(f.annotations_path);
    auto manifest = dataset::build_cvad(videos, ann, {{"bicycle", "appearance"}}, f.out_dir);
    std::string path = (f.tmp.path() / "manifest.json").string();
    dataset::save_cvad_manifest(manifest, path);
    auto loaded = dataset::load_cvad_manifest(path);
    REQUIRE(loaded.classes.size() == manifest.classes.size());
    CHECK(loaded.classes[0].name == manifest.classes[0].name);
    CHECK(loaded.classes[0].category == "appearance");
    CHECK(loaded.classes[0].positive_videos == manifest.classes[0].positive_videos);
    CHECK(loaded.classes[0].label_files == manifest.classes[0].label_files);
}

TEST_CASE("annotation referencing an unknown video is rejected") {
    Fixture f;
    auto videos = dataset::load_video_manifest(f.videos_path);
    dataset::Annotations ann;
    ann["ghost"].push_back({"bicycle", 0, 1});
    CHECK_THROWS_AS(dataset::build_cvad(videos, ann, {}, f.out_dir), Error);
}

TEST_CASE("annotation past the end of a video is rejected") {
    Fixture f;
    auto videos = dataset::load_video_manifest(f.videos_path);
    dataset::Annotations ann;
    ann["v3"].push_back({"bicycle", 0, 6}); // v3 has 6 frames, 0..5
    CHECK_THROWS_AS(dataset::build_cvad(videos, ann, {}, f.out_dir), Error);
}

TEST_CASE("annotations with no classes at all are rejected") {
    Fixture f;
    auto videos = dataset::load_video_manifest(f.videos_path);
    dataset::Annotations ann;
    ann["v1"] = {};
    CHECK_THROWS_AS(dataset::build_cvad(videos, ann, {}, f.out_dir), Error);
}

TEST_CASE("multi-class frames contribute to every class they carry") {
    testutil::TempDir tmp;
    testutil::write_text(tmp.path() / "videos.json",
                         R"([{"video_id": "v", "frame_count": 4}])");
    dataset::Annotations ann;
    ann["v"].push_back({"a", 1, 2});
    ann["v"].push_back({"b", 2, 3});
    auto manifest = dataset::build_cvad(dataset::load_video_manifest(
                                            (tmp.path() / "videos.json").string()),
                                        ann, {}, (tmp.path() / "out").string());
    auto la = dataset::read_label_file(manifest.classes[0].label_files.at("v"));
    auto lb = dataset::read_label_file(manifest.classes[1].label_files.at("v"));
    CHECK(la == std::vector<std::uint8_t>{0, 1, 1, 0});
    CHECK(lb == std::vector<std::uint8_t>{0, 0, 1, 1});
}
