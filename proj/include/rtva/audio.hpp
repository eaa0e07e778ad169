#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rtva::audio {

// Fixed pipeline geometry: 20 ms frames at 16 kHz on the wire, 10 ms
// subframes at 48 kHz inside the denoiser, 32 ms frames for the VAD.
inline constexpr int kPipelineRateHz = 16000;
inline constexpr int kFrameMs = 20;
inline constexpr int kFrameSamples = 320;           // 20 ms at 16 kHz
inline constexpr int kDenoiserRateHz = 48000;
inline constexpr int kDenoiserFrameSamples = 480;   // 10 ms at 48 kHz
inline constexpr int kVadFrameMs = 32;
inline constexpr int kVadFrameSamples = 512;        // 32 ms at 16 kHz
inline constexpr int kTtsNativeRateHz = 22050;

// A fixed-size block of signed 16-bit PCM. The unit of all pipeline work.
struct AudioFrame {
    std::vector<int16_t> samples;
    int sample_rate_hz = kPipelineRateHz;

    bool operator==(const AudioFrame&) const = default;
};

struct FramingConfig {
    int frame_ms = kFrameMs;
    int sample_rate_hz = kPipelineRateHz;

    int samples_per_frame() const { return frame_ms * sample_rate_hz / 1000; }
    int packets_per_second() const { return 1000 / frame_ms; }

    // Throws ParamError unless frame_ms * sample_rate_hz is divisible by 1000.
    void validate() const;
};

struct WavContent {
    std::vector<AudioFrame> frames;
    int sample_rate_hz = 0;
    int padding_samples = 0;  // zeros appended to fill the final frame
};

// Reads a mono 16-bit PCM RIFF/WAV file and cuts it into frame_ms frames.
// The final partial frame is zero padded; the pad length is reported.
// Stereo, non-16-bit or compressed files raise FormatError; a missing or
// unreadable file raises IoError.
WavContent read_pcm_wav(const std::string& path, int frame_ms = kFrameMs);

// Writes frames as a mono 16-bit PCM little-endian WAV file. All frames
// must share one sample rate (ParamError otherwise).
void write_pcm_wav(const std::string& path, const std::vector<AudioFrame>& frames);
void write_pcm_wav(const std::string& path, std::span<const int16_t> samples,
                   int sample_rate_hz);

// Cuts a raw sample stream into frames, zero padding the tail.
std::pair<std::vector<AudioFrame>, int> frames_from_samples(
    std::span<const int16_t> samples, int sample_rate_hz, int frame_ms = kFrameMs);

// Concatenates frame payloads back into one stream.
std::vector<int16_t> concat(const std::vector<AudioFrame>& frames);

// RMS level in dBFS relative to full scale 32768. Returns -infinity for an
// all-zero (or empty) block.
double rms_dbfs(std::span<const int16_t> samples);

}  // namespace rtva::audio
