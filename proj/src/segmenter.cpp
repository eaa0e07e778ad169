#include "rtva/segmenter.hpp"

#include "rtva/errors.hpp"

namespace rtva::seg {

namespace {

class EnergyVad final : public Vad {
public:
    EnergyVad(double threshold_dbfs, int hangover_frames)
        : threshold_dbfs_(threshold_dbfs), hangover_(hangover_frames) {}

    Decision classify(std::span<const int16_t> frame) override {
        if (audio::rms_dbfs(frame) > threshold_dbfs_) {
            since_speech_ = 0;
            return Decision::speech;
        }
        if (since_speech_ < hangover_) {
            ++since_speech_;
            return Decision::speech;
        }
        return Decision::silence;
    }

private:
    double threshold_dbfs_;
    int hangover_;
    int since_speech_ = 1 << 20;  // no speech seen yet
};

}  // namespace

std::unique_ptr<Vad> energy_vad(double threshold_dbfs, int hangover_frames) {
    if (hangover_frames < 0) throw ParamError("vad: hangover must be >= 0");
    return std::make_unique<EnergyVad>(threshold_dbfs, hangover_frames);
}

Reframer::Reframer(int out_samples) : out_samples_((size_t)out_samples) {
    if (out_samples < 1) throw ParamError("reframer: output size must be positive");
}

std::vector<audio::AudioFrame> Reframer::push(const audio::AudioFrame& frame) {
    buffer_.insert(buffer_.end(), frame.samples.begin(), frame.samples.end());
    std::vector<audio::AudioFrame> out;
    size_t pos = 0;
    while (buffer_.size() - pos >= out_samples_) {
        audio::AudioFrame f;
        f.sample_rate_hz = frame.sample_rate_hz;
        f.samples.assign(buffer_.begin() + pos, buffer_.begin() + pos + out_samples_);
        out.push_back(std::move(f));
        pos += out_samples_;
    }
    buffer_.erase(buffer_.begin(), buffer_.begin() + pos);
    return out;
}

EoqDetector::EoqDetector(EoqConfig cfg) : cfg_(cfg) {
    if (cfg.silence_threshold_ms <= 0 || cfg.vad_frame_ms <= 0) {
        throw ParamError("eoq: thresholds must be positive");
    }
}

SegmentEvent EoqDetector::make_end_of_query() {
    SegmentEvent ev;
    ev.kind = SegmentEvent::Kind::end_of_query;
    ev.t_ms = clock_ms_;
    ev.segment.samples.assign(accumulated_.begin(),
                              accumulated_.begin() + (ptrdiff_t)voiced_samples_);
    ev.segment.start_time_ms = segment_start_ms_;
    ev.segment.end_time_ms = last_voiced_end_ms_;
    ev.segment.eoq_time_ms = clock_ms_;

    active_ = false;
    silence_run_ = 0;
    accumulated_.clear();
    voiced_samples_ = 0;
    return ev;
}

std::optional<SegmentEvent> EoqDetector::step(Decision decision,
                                              std::span<const int16_t> frame) {
    const int64_t frame_start = clock_ms_;
    clock_ms_ += cfg_.vad_frame_ms;

    if (!active_) {
        if (decision == Decision::silence) return std::nullopt;  // IDLE absorbs silence
        active_ = true;
        silence_run_ = 0;
        segment_start_ms_ = frame_start;
        accumulated_.assign(frame.begin(), frame.end());
        voiced_samples_ = accumulated_.size();
        last_voiced_end_ms_ = clock_ms_;

        SegmentEvent ev;
        ev.kind = SegmentEvent::Kind::segment_start;
        ev.t_ms = frame_start;
        return ev;
    }

    accumulated_.insert(accumulated_.end(), frame.begin(), frame.end());
    if (decision == Decision::speech) {
        silence_run_ = 0;
        voiced_samples_ = accumulated_.size();
        last_voiced_end_ms_ = clock_ms_;
    } else if (++silence_run_ >= cfg_.min_silence_frames()) {
        return make_end_of_query();
    }

    if (clock_ms_ - segment_start_ms_ >= cfg_.max_segment_ms) {
        return make_end_of_query();  // capped; closes immediately
    }
    return std::nullopt;
}

SegmenterSession::SegmenterSession(EoqConfig cfg, std::unique_ptr<Vad> vad)
    : reframer_(audio::kVadFrameSamples), vad_(std::move(vad)), eoq_(cfg) {}

std::vector<SegmentEvent> SegmenterSession::push(const audio::AudioFrame& frame) {
    std::vector<SegmentEvent> events;
    for (const auto& vf : reframer_.push(frame)) {
        const Decision d = vad_->classify(vf.samples);
        if (auto ev = eoq_.step(d, vf.samples)) events.push_back(std::move(*ev));
    }
    return events;
}

}  // namespace rtva::seg
