#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "rtva/audio.hpp"

namespace rtva::seg {

enum class Decision { speech, silence };

// Per-frame speech/silence classifier over 512-sample 16 kHz frames.
// Implementations may keep internal state but must be deterministic for a
// fixed input stream.
class Vad {
public:
    virtual ~Vad() = default;
    virtual Decision classify(std::span<const int16_t> frame512) = 0;
};

// RMS-energy VAD: a frame is speech when its level exceeds threshold_dbfs,
// or within hangover_frames after a frame that did.
std::unique_ptr<Vad> energy_vad(double threshold_dbfs = -40.0, int hangover_frames = 4);

// Lossless rebuffering from 20 ms capture frames to 32 ms VAD frames.
class Reframer {
public:
    explicit Reframer(int out_samples = audio::kVadFrameSamples);

    // Feeds one frame; returns every complete output frame now available.
    std::vector<audio::AudioFrame> push(const audio::AudioFrame& frame);
    // Samples still held back (fewer than one output frame).
    const std::vector<int16_t>& pending() const { return buffer_; }

private:
    size_t out_samples_;
    std::vector<int16_t> buffer_;
};

struct EoqConfig {
    int silence_threshold_ms = 1200;
    int vad_frame_ms = audio::kVadFrameMs;
    int max_segment_ms = 30000;  // memory guard; forces an immediate end of query

    // ceil(silence_threshold_ms / vad_frame_ms); 38 for the defaults.
    int min_silence_frames() const {
        return (silence_threshold_ms + vad_frame_ms - 1) / vad_frame_ms;
    }
};

struct SpeechSegment {
    std::vector<int16_t> samples;  // 16 kHz, first through last voiced frame
    int64_t start_time_ms = 0;     // start of the first voiced frame
    int64_t end_time_ms = 0;       // end of the last voiced frame
    int64_t eoq_time_ms = 0;       // end of the frame that crossed the threshold
};

struct SegmentEvent {
    enum class Kind { segment_start, end_of_query };
    Kind kind = Kind::segment_start;
    int64_t t_ms = 0;
    SpeechSegment segment;  // set for end_of_query
};

// End-of-query state machine. IDLE until a speech frame opens a segment;
// while active, every frame accumulates and a run of min_silence_frames
// silence decisions closes the segment, trimmed back to the last voiced
// frame. Events strictly alternate segment_start / end_of_query.
class EoqDetector {
public:
    explicit EoqDetector(EoqConfig cfg = {});

    // Decisions must arrive in stream order, one per 32 ms frame.
    std::optional<SegmentEvent> step(Decision decision,
                                     std::span<const int16_t> frame512);

    bool active() const { return active_; }

private:
    SegmentEvent make_end_of_query();

    EoqConfig cfg_;
    bool active_ = false;
    int silence_run_ = 0;
    int64_t clock_ms_ = 0;  // end time of the frame just consumed
    int64_t segment_start_ms_ = 0;
    std::vector<int16_t> accumulated_;
    size_t voiced_samples_ = 0;  // accumulated length up to the last voiced frame
    int64_t last_voiced_end_ms_ = 0;
};

// Full per-session chain: 20 ms frames -> 32 ms reframe -> VAD -> EOQ.
class SegmenterSession {
public:
    SegmenterSession(EoqConfig cfg, std::unique_ptr<Vad> vad);

    std::vector<SegmentEvent> push(const audio::AudioFrame& frame);

private:
    Reframer reframer_;
    std::unique_ptr<Vad> vad_;
    EoqDetector eoq_;
};

}  // namespace rtva::seg
