#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <string>
#include <vector>

namespace rtva::metrics {

struct StageStats {
    size_t count = 0;
    double mean_ms = 0.0;
    double max_ms = 0.0;
    double p99_ms = 0.0;
};

struct StageReport {
    std::vector<std::pair<std::string, StageStats>> stages;  // insertion order
    double total_mean_ms = 0.0;  // sum of per-stage means

    std::string table() const;
    std::string machine_lines() const;  // metric,name,value
};

// Collects per-stage wall times. start/stop must be balanced per stage
// (InstrumentationError otherwise); record() takes a measured duration
// directly. Thread safe; stages with no samples are omitted from the report.
class StageTimerRegistry {
public:
    void start(const std::string& stage);
    void stop(const std::string& stage);
    void record(const std::string& stage, double elapsed_ms);
    StageReport report() const;

private:
    struct Series {
        std::vector<double> samples;
        double started_at = -1.0;  // <0 when no start() pending
        size_t order = 0;
    };
    mutable std::mutex mu_;
    std::map<std::string, Series> series_;
    size_t next_order_ = 0;
};

struct BitrateWindow {
    int64_t index = 0;          // seconds since the first packet
    uint64_t payload_bits = 0;  // excludes RTP/UDP/IP headers unless configured
    size_t packet_count = 0;

    double kbps() const { return (double)payload_bits / 1000.0; }
};

// Bins sent packets into contiguous 1 s windows aligned to the first packet.
// Counts payload bits only by default; include_headers adds the 12-byte RTP
// header to each packet's accounting.
class BitrateTracker {
public:
    explicit BitrateTracker(bool include_headers = false);

    void on_packet(int64_t t_ms, size_t payload_bytes);

    // Contiguous windows from the first packet through the last, including
    // empty ones.
    std::vector<BitrateWindow> windows() const;
    double mean_kbps() const;  // total bits / covered seconds
    uint64_t total_bits() const { return total_bits_; }

    std::string csv() const;  // window,kbps
    std::string machine_lines() const;

private:
    bool include_headers_;
    bool any_ = false;
    int64_t first_ms_ = 0;
    int64_t last_ms_ = 0;
    std::map<int64_t, BitrateWindow> bins_;
    uint64_t total_bits_ = 0;
};

// Per-query end-to-end delays, reported individually and as an average.
struct DelayReport {
    std::vector<double> per_query_ms;
    size_t measurement_errors = 0;

    double average_ms() const;
    std::string table() const;
};

}  // namespace rtva::metrics
