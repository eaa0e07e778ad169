#include "doctest.h"

#include <cmath>
#include <random>

#include "rtva/errors.hpp"
#include "rtva/segmenter.hpp"

using namespace rtva;
using audio::AudioFrame;
using seg::Decision;

namespace {

std::vector<int16_t> tone(size_t n, double amplitude = 0.7) {
    std::vector<int16_t> v(n);
    for (size_t i = 0; i < n; ++i) {
        v[i] = (int16_t)std::lround(amplitude * 32767.0 *
                                    std::sin(2.0 * M_PI * 440.0 * (double)i / 16000.0));
    }
    return v;
}

AudioFrame frame20ms(std::vector<int16_t> samples) {
    return AudioFrame{std::move(samples), 16000};
}

}  // namespace

TEST_CASE("reframer: 8 x 320 samples -> 5 x 512 samples") {
    seg::Reframer rf;
    std::vector<audio::AudioFrame> out;
    for (int i = 0; i < 8; ++i) {
        auto produced = rf.push(frame20ms(std::vector<int16_t>(320, (int16_t)i)));
        out.insert(out.end(), produced.begin(), produced.end());
    }
    CHECK(out.size() == 5);
    for (const auto& f : out) CHECK(f.samples.size() == 512);
    CHECK(rf.pending().empty());
}

TEST_CASE("reframer holds short input") {
    seg::Reframer rf;
    auto out = rf.push(frame20ms(std::vector<int16_t>(320, 1)));
    CHECK(out.empty());
    CHECK(rf.pending().size() == 320);
}

TEST_CASE("reframer is lossless on random streams") {
    std::mt19937 rng(3);
    std::uniform_int_distribution<int> dist(-32768, 32767);
    seg::Reframer rf;
    std::vector<int16_t> in, out;
    for (int i = 0; i < 37; ++i) {
        std::vector<int16_t> samples(320);
        for (auto& s : samples) s = (int16_t)dist(rng);
        in.insert(in.end(), samples.begin(), samples.end());
        for (const auto& f : rf.push(frame20ms(samples))) {
            out.insert(out.end(), f.samples.begin(), f.samples.end());
        }
    }
    out.insert(out.end(), rf.pending().begin(), rf.pending().end());
    CHECK(out == in);
    CHECK(rf.pending().size() < 512);  // latency bound
}

TEST_CASE("energy vad basics") {
    auto vad = seg::energy_vad(-40.0, 4);
    std::vector<int16_t> zeros(512, 0);
    CHECK(vad->classify(zeros) == Decision::silence);

    auto loud = tone(512);
    CHECK(vad->classify(loud) == Decision::speech);
}

TEST_CASE("energy vad hangover") {
    auto vad = seg::energy_vad(-40.0, 4);
    std::vector<int16_t> zeros(512, 0);
    CHECK(vad->classify(tone(512)) == Decision::speech);
    for (int i = 0; i < 4; ++i) {
        CAPTURE(i);
        CHECK(vad->classify(zeros) == Decision::speech);  // hangover
    }
    CHECK(vad->classify(zeros) == Decision::silence);  // 5th frame
}

TEST_CASE("eoq: 38 silence frames trigger, 37 do not") {
    seg::EoqConfig cfg;
    REQUIRE(cfg.min_silence_frames() == 38);

    const auto speech = tone(512);
    const std::vector<int16_t> quiet(512, 0);

    SUBCASE("exactly 38 -> end_of_query on the 38th") {
        seg::EoqDetector eoq(cfg);
        auto start = eoq.step(Decision::speech, speech);
        REQUIRE(start.has_value());
        CHECK(start->kind == seg::SegmentEvent::Kind::segment_start);
        for (int i = 0; i < 37; ++i) {
            CHECK_FALSE(eoq.step(Decision::silence, quiet).has_value());
        }
        auto done = eoq.step(Decision::silence, quiet);
        REQUIRE(done.has_value());
        CHECK(done->kind == seg::SegmentEvent::Kind::end_of_query);
        // 1216 ms of silence measured from the end of the voiced frame.
        CHECK(done->segment.eoq_time_ms - done->segment.end_time_ms == 38 * 32);
    }

    SUBCASE("37 then speech resets the counter") {
        seg::EoqDetector eoq(cfg);
        (void)eoq.step(Decision::speech, speech);
        for (int i = 0; i < 37; ++i) {
            CHECK_FALSE(eoq.step(Decision::silence, quiet).has_value());
        }
        CHECK_FALSE(eoq.step(Decision::speech, speech).has_value());
        // Needs the full 38 again.
        for (int i = 0; i < 37; ++i) {
            CHECK_FALSE(eoq.step(Decision::silence, quiet).has_value());
        }
        CHECK(eoq.step(Decision::silence, quiet).has_value());
    }
}

TEST_CASE("eoq: unbroken silence yields no events") {
    seg::EoqDetector eoq;
    const std::vector<int16_t> quiet(512, 0);
    for (int i = 0; i < 200; ++i) {
        CHECK_FALSE(eoq.step(Decision::silence, quiet).has_value());
    }
}

TEST_CASE("eoq: segment is trimmed to the last voiced frame") {
    seg::EoqDetector eoq;
    const auto speech = tone(512);
    const std::vector<int16_t> quiet(512, 0);

    (void)eoq.step(Decision::speech, speech);
    (void)eoq.step(Decision::speech, speech);
    // A mid-segment pause shorter than the threshold stays in the segment.
    for (int i = 0; i < 10; ++i) (void)eoq.step(Decision::silence, quiet);
    (void)eoq.step(Decision::speech, speech);

    std::optional<seg::SegmentEvent> done;
    for (int i = 0; i < 38; ++i) done = eoq.step(Decision::silence, quiet);
    REQUIRE(done.has_value());

    // 2 speech + 10 pause + 1 speech frames = 13 frames of content.
    CHECK(done->segment.samples.size() == 13u * 512u);
    CHECK(done->segment.start_time_ms == 0);
    CHECK(done->segment.end_time_ms == 13 * 32);
    CHECK(done->segment.eoq_time_ms == done->segment.end_time_ms + 38 * 32);
    // Trailing silence is excluded: the tail of the segment is voiced.
    CHECK(done->segment.samples.back() == speech.back());
}

TEST_CASE("eoq: events alternate strictly and timing invariants hold") {
    std::mt19937 rng(7);
    seg::EoqDetector eoq;
    const auto speech = tone(512);
    const std::vector<int16_t> quiet(512, 0);

    int expect_start = true;
    int events_seen = 0;
    for (int i = 0; i < 5000; ++i) {
        const bool is_speech = (rng() % 100) < 30;
        auto ev = eoq.step(is_speech ? Decision::speech : Decision::silence,
                           is_speech ? speech : quiet);
        if (!ev) continue;
        ++events_seen;
        if (expect_start) {
            CHECK(ev->kind == seg::SegmentEvent::Kind::segment_start);
        } else {
            CHECK(ev->kind == seg::SegmentEvent::Kind::end_of_query);
            CHECK(ev->segment.end_time_ms <= ev->segment.eoq_time_ms);
            CHECK(ev->segment.start_time_ms <= ev->segment.end_time_ms);
        }
        expect_start = !expect_start;
    }
    CHECK(events_seen > 0);
}

TEST_CASE("eoq: 30 s cap forces an immediate end of query") {
    seg::EoqConfig cfg;
    cfg.max_segment_ms = 2000;
    seg::EoqDetector eoq(cfg);
    const auto speech = tone(512);

    (void)eoq.step(Decision::speech, speech);
    std::optional<seg::SegmentEvent> done;
    int frames = 1;
    while (!done && frames < 1000) {
        done = eoq.step(Decision::speech, speech);
        ++frames;
    }
    REQUIRE(done.has_value());
    CHECK(done->kind == seg::SegmentEvent::Kind::end_of_query);
    CHECK(frames * 32 >= 2000);
    CHECK(frames * 32 <= 2000 + 32);
}

TEST_CASE("segmenter session: 20 ms frames in, events out") {
    seg::SegmenterSession session({}, seg::energy_vad(-40.0, 0));

    std::vector<seg::SegmentEvent> events;
    auto feed = [&](const std::vector<int16_t>& samples, int frames) {
        for (int i = 0; i < frames; ++i) {
            for (auto& ev : session.push(frame20ms(samples))) {
                events.push_back(std::move(ev));
            }
        }
    };

    feed(tone(320), 32);                        // 640 ms speech
    feed(std::vector<int16_t>(320, 0), 70);     // 1400 ms silence

    REQUIRE(events.size() == 2);
    CHECK(events[0].kind == seg::SegmentEvent::Kind::segment_start);
    CHECK(events[1].kind == seg::SegmentEvent::Kind::end_of_query);
    CHECK(events[1].segment.samples.size() % 512 == 0);
}

TEST_CASE("determinism: identical streams give identical event streams") {
    auto run = [] {
        seg::SegmenterSession session({}, seg::energy_vad(-40.0, 2));
        std::mt19937 rng(99);
        std::vector<std::pair<int, int64_t>> log;
        for (int i = 0; i < 400; ++i) {
            const bool sp = (rng() % 10) < 3;
            auto f = sp ? tone(320) : std::vector<int16_t>(320, 0);
            for (auto& ev : session.push(frame20ms(f))) {
                log.emplace_back((int)ev.kind, ev.t_ms);
            }
        }
        return log;
    };
    CHECK(run() == run());
}
