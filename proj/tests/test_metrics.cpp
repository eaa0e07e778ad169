#include "doctest.h"

#include <random>
#include <thread>

#include "rtva/errors.hpp"
#include "rtva/metrics.hpp"

using namespace rtva;

TEST_CASE("stage report: total is the sum of stage means") {
    metrics::StageTimerRegistry reg;
    reg.record("drc", 1.0);
    reg.record("denoise", 6.0);
    reg.record("encode", 0.5);
    auto report = reg.report();
    REQUIRE(report.stages.size() == 3);
    CHECK(report.total_mean_ms == doctest::Approx(7.5));
    CHECK(report.stages[0].first == "drc");  // insertion order
    CHECK(report.stages[2].first == "encode");
}

TEST_CASE("stages without samples are omitted") {
    metrics::StageTimerRegistry reg;
    reg.record("a", 2.0);
    reg.start("pending");  // started but never stopped: no sample
    auto report = reg.report();
    REQUIRE(report.stages.size() == 1);
    CHECK(report.stages[0].first == "a");
}

TEST_CASE("unbalanced start/stop raises") {
    metrics::StageTimerRegistry reg;
    CHECK_THROWS_AS(reg.stop("never_started"), InstrumentationError);
    reg.start("x");
    CHECK_THROWS_AS(reg.start("x"), InstrumentationError);
    reg.stop("x");
    CHECK_THROWS_AS(reg.stop("x"), InstrumentationError);
}

TEST_CASE("start/stop measures wall time") {
    metrics::StageTimerRegistry reg;
    reg.start("sleep");
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
    reg.stop("sleep");
    auto report = reg.report();
    REQUIRE(report.stages.size() == 1);
    CHECK(report.stages[0].second.mean_ms >= 15.0);
    CHECK(report.stages[0].second.mean_ms <= 200.0);
    CHECK(report.stages[0].second.mean_ms <= report.stages[0].second.max_ms);
}

TEST_CASE("bitrate: constant 60-byte payloads at 50 pps give 24 kbps windows") {
    metrics::BitrateTracker tracker;
    for (int i = 0; i < 150; ++i) tracker.on_packet(i * 20, 60);  // 3 s
    auto w = tracker.windows();
    REQUIRE(w.size() == 3);
    for (const auto& win : w) CHECK(win.kbps() == doctest::Approx(24.0));
    CHECK(tracker.mean_kbps() == doctest::Approx(24.0));
}

TEST_CASE("bitrate: passthrough 640-byte payloads give 256 kbps") {
    metrics::BitrateTracker tracker;
    for (int i = 0; i < 50; ++i) tracker.on_packet(i * 20, 640);
    auto w = tracker.windows();
    REQUIRE(w.size() == 1);
    CHECK(w[0].kbps() == doctest::Approx(256.0));
}

TEST_CASE("bitrate: an empty second is a 0 kbps window") {
    metrics::BitrateTracker tracker;
    tracker.on_packet(0, 100);
    tracker.on_packet(2500, 100);  // nothing lands in window 1
    auto w = tracker.windows();
    REQUIRE(w.size() == 3);
    CHECK(w[1].payload_bits == 0);
    CHECK(w[1].packet_count == 0);
}

TEST_CASE("bitrate conservation: windows sum to total bits") {
    metrics::BitrateTracker tracker;
    std::mt19937 rng(3);
    uint64_t expected = 0;
    int64_t t = 0;
    for (int i = 0; i < 500; ++i) {
        const size_t bytes = 10 + rng() % 200;
        expected += 8ull * bytes;
        tracker.on_packet(t, bytes);
        t += (int64_t)(rng() % 90);
    }
    uint64_t sum = 0;
    for (const auto& w : tracker.windows()) sum += w.payload_bits;
    CHECK(sum == expected);
    CHECK(sum == tracker.total_bits());

    const double mean = tracker.mean_kbps();
    const double direct = (double)sum / 1000.0 / (double)tracker.windows().size();
    CHECK(mean == doctest::Approx(direct).epsilon(1e-9));
}

TEST_CASE("bitrate: header-inclusive accounting adds 12 bytes per packet") {
    metrics::BitrateTracker payload_only(false), with_headers(true);
    for (int i = 0; i < 50; ++i) {
        payload_only.on_packet(i * 20, 60);
        with_headers.on_packet(i * 20, 60);
    }
    CHECK(with_headers.total_bits() - payload_only.total_bits() == 50ull * 12 * 8);
}

TEST_CASE("delay report aggregates per-query delays") {
    metrics::DelayReport report;
    report.per_query_ms = {1500, 1700, 1600};
    CHECK(report.average_ms() == doctest::Approx(1600.0));
    const auto text = report.table();
    CHECK(text.find("avg") != std::string::npos);
}
