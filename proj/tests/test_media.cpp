#include "media.hpp"
#include "error.hpp"

#include "testutil.hpp"

#include <doctest.h>

using namespace cvad;

TEST_CASE("load_frames resizes and preserves count and order") {
    testutil::TempDir tmp;
    testutil::write_frame_dir(tmp.path() / "vid", 100);
    auto seq = media::load_frames((tmp.path() / "vid").string(), 240);
    CHECK(seq.frames.size() == 100);
    CHECK(seq.video_id == "vid");
    for (int i = 0; i < 100; ++i) {
        CHECK(seq.frames[i].index == i);
        CHECK(seq.frames[i].pixels.rows == 240);
        CHECK(seq.frames[i].pixels.cols == 240);
    }
}

TEST_CASE("load_frames rejects empty and missing directories") {
    testutil::TempDir tmp;
    std::filesystem::create_directories(tmp.path() / "empty");
    CHECK_THROWS_WITH_AS(media::load_frames((tmp.path() / "empty").string(), 240),
                         doctest::Contains("no frames found"), Error);
    CHECK_THROWS_AS(media::load_frames((tmp.path() / "missing").string(), 240), Error);
}

TEST_CASE("load_frames names the corrupt file") {
    testutil::TempDir tmp;
    auto dir = tmp.path() / "vid";
    testutil::write_frame_dir(dir, 2);
    // a truncated image: plausible extension, garbage payload
    testutil::write_text(dir / "000002.png", "not an image");
    try {
        media::load_frames(dir.string(), 240);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("000002.png") != std::string::npos);
    }
}

TEST_CASE("segment_stream exact division") {
    testutil::TempDir tmp;
    testutil::write_frame_dir(tmp.path() / "v", 96);
    auto seq = media::load_frames((tmp.path() / "v").string(), 32);
    auto result = media::segment_stream(seq, 24);
    REQUIRE(result.segments.size() == 4);
    for (const auto& s : result.segments) CHECK(s.length() == 24);
    CHECK(result.dropped_indices.empty());
}

TEST_CASE("segment_stream truncates a long tail to a multiple of 4") {
    testutil::TempDir tmp;
    testutil::write_frame_dir(tmp.path() / "v", 100);
    auto seq = media::load_frames((tmp.path() / "v").string(), 32);
    auto result = media::segment_stream(seq, 24);
    REQUIRE(result.segments.size() == 5);
    int total = 0;
    for (const auto& s : result.segments) total += s.length();
    CHECK(total == 100);
    CHECK(result.segments.back().length() == 4);
    CHECK(result.dropped_indices.empty());
}

TEST_CASE("segment_stream drops and reports a short tail") {
    testutil::TempDir tmp;
    testutil::write_frame_dir(tmp.path() / "v", 26);
    auto seq = media::load_frames((tmp.path() / "v").string(), 32);
    auto result = media::segment_stream(seq, 24);
    REQUIRE(result.segments.size() == 1);
    CHECK(result.segments[0].length() == 24);
    CHECK(result.dropped_indices == std::vector<int>{24, 25});
}

TEST_CASE("segment_stream validates N") {
    testutil::TempDir tmp;
    testutil::write_frame_dir(tmp.path() / "v", 8);
    auto seq = media::load_frames((tmp.path() / "v").string(), 32);
    CHECK_THROWS_AS(media::segment_stream(seq, 6), Error);
    CHECK_THROWS_AS(media::segment_stream(seq, 0), Error);
    CHECK_THROWS_AS(media::segment_stream(seq, -4), Error);
}

TEST_CASE("segments concatenate to a prefix with at most 3 frames missing") {
    testutil::TempDir tmp;
    for (int total : {12, 17, 23, 48, 51}) {
        auto dir = tmp.path() / ("v" + std::to_string(total));
        testutil::write_frame_dir(dir, total);
        auto seq = media::load_frames(dir.string(), 32);
        auto result = media::segment_stream(seq, 8);
        int covered = 0;
        int expect_start = 0;
        for (const auto& s : result.segments) {
            CHECK(s.length() % 4 == 0);
            CHECK(s.length() <= 8);
            CHECK(s.start_index == expect_start);
            for (int i = 0; i < s.length(); ++i)
                CHECK(s.frames[i].index == s.start_index + i);
            expect_start += s.length();
            covered += s.length();
        }
        CHECK(total - covered <= 3);
        CHECK(covered + static_cast<int>(result.dropped_indices.size()) == total);
    }
}
