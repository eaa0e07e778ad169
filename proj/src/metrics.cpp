#include "rtva/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "rtva/errors.hpp"
#include "rtva/rtp.hpp"

namespace rtva::metrics {

namespace {

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

void StageTimerRegistry::start(const std::string& stage) {
    std::lock_guard lock(mu_);
    auto& s = series_[stage];
    if (s.samples.empty() && s.started_at < 0 && s.order == 0) s.order = ++next_order_;
    if (s.started_at >= 0) {
        throw InstrumentationError("stage timer already started: " + stage);
    }
    s.started_at = now_ms();
}

void StageTimerRegistry::stop(const std::string& stage) {
    std::lock_guard lock(mu_);
    auto it = series_.find(stage);
    if (it == series_.end() || it->second.started_at < 0) {
        throw InstrumentationError("stage timer stopped without start: " + stage);
    }
    it->second.samples.push_back(now_ms() - it->second.started_at);
    it->second.started_at = -1.0;
}

void StageTimerRegistry::record(const std::string& stage, double elapsed_ms) {
    std::lock_guard lock(mu_);
    auto& s = series_[stage];
    if (s.samples.empty() && s.started_at < 0 && s.order == 0) s.order = ++next_order_;
    s.samples.push_back(elapsed_ms);
}

StageReport StageTimerRegistry::report() const {
    std::lock_guard lock(mu_);
    std::vector<std::pair<size_t, std::pair<std::string, StageStats>>> rows;
    for (const auto& [name, s] : series_) {
        if (s.samples.empty()) continue;  // never sampled: omitted
        StageStats st;
        st.count = s.samples.size();
        double sum = 0, mx = 0;
        for (double v : s.samples) {
            sum += v;
            mx = std::max(mx, v);
        }
        st.mean_ms = sum / (double)st.count;
        st.max_ms = mx;
        auto sorted = s.samples;
        const size_t k = (size_t)std::ceil(0.99 * (double)sorted.size());
        const size_t idx = k == 0 ? 0 : k - 1;
        std::nth_element(sorted.begin(), sorted.begin() + (ptrdiff_t)idx, sorted.end());
        st.p99_ms = sorted[idx];
        rows.push_back({s.order, {name, st}});
    }
    std::sort(rows.begin(), rows.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    StageReport report;
    for (auto& [_, row] : rows) {
        report.total_mean_ms += row.second.mean_ms;
        report.stages.push_back(std::move(row));
    }
    return report;
}

std::string StageReport::table() const {
    std::ostringstream os;
    os << "stage                     count   mean ms    max ms    p99 ms\n";
    char buf[160];
    for (const auto& [name, st] : stages) {
        std::snprintf(buf, sizeof(buf), "%-24s %6zu %9.3f %9.3f %9.3f\n", name.c_str(),
                      st.count, st.mean_ms, st.max_ms, st.p99_ms);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "%-24s %6s %9.3f\n", "total", "", total_mean_ms);
    os << buf;
    return os.str();
}

std::string StageReport::machine_lines() const {
    std::ostringstream os;
    for (const auto& [name, st] : stages) {
        os << "stage_mean_ms," << name << "," << st.mean_ms << "\n";
        os << "stage_max_ms," << name << "," << st.max_ms << "\n";
        os << "stage_count," << name << "," << st.count << "\n";
    }
    os << "stage_total_mean_ms,total," << total_mean_ms << "\n";
    return os.str();
}

BitrateTracker::BitrateTracker(bool include_headers) : include_headers_(include_headers) {}

void BitrateTracker::on_packet(int64_t t_ms, size_t payload_bytes) {
    if (!any_) {
        any_ = true;
        first_ms_ = t_ms;
        last_ms_ = t_ms;
    }
    last_ms_ = std::max(last_ms_, t_ms);
    const uint64_t bits =
        8ull * (payload_bytes + (include_headers_ ? rtp::kHeaderSize : 0));
    const int64_t idx = (t_ms - first_ms_) / 1000;
    auto& bin = bins_[idx];
    bin.index = idx;
    bin.payload_bits += bits;
    bin.packet_count += 1;
    total_bits_ += bits;
}

std::vector<BitrateWindow> BitrateTracker::windows() const {
    std::vector<BitrateWindow> out;
    if (!any_) return out;
    const int64_t last_idx = (last_ms_ - first_ms_) / 1000;
    for (int64_t i = 0; i <= last_idx; ++i) {
        auto it = bins_.find(i);
        if (it != bins_.end()) {
            out.push_back(it->second);
        } else {
            out.push_back(BitrateWindow{i, 0, 0});  // empty second
        }
    }
    return out;
}

double BitrateTracker::mean_kbps() const {
    const auto w = windows();
    if (w.empty()) return 0.0;
    return (double)total_bits_ / 1000.0 / (double)w.size();
}

std::string BitrateTracker::csv() const {
    std::ostringstream os;
    os << "window,kbps\n";
    for (const auto& w : windows()) os << w.index << "," << w.kbps() << "\n";
    return os.str();
}

std::string BitrateTracker::machine_lines() const {
    std::ostringstream os;
    os << "bitrate_mean_kbps,upload," << mean_kbps() << "\n";
    os << "bitrate_total_bits,upload," << total_bits_ << "\n";
    return os.str();
}

double DelayReport::average_ms() const {
    if (per_query_ms.empty()) return 0.0;
    double sum = 0;
    for (double v : per_query_ms) sum += v;
    return sum / (double)per_query_ms.size();
}

std::string DelayReport::table() const {
    std::ostringstream os;
    os << "query  delay ms\n";
    char buf[64];
    for (size_t i = 0; i < per_query_ms.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%-6zu %9.1f\n", i + 1, per_query_ms[i]);
        os << buf;
    }
    std::snprintf(buf, sizeof(buf), "avg    %9.1f\n", average_ms());
    os << buf;
    if (measurement_errors > 0) {
        os << "(" << measurement_errors << " queries without a measurable delay)\n";
    }
    return os.str();
}

}  // namespace rtva::metrics
