#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "rtva/audio.hpp"

namespace rtva::dsp {

// Dynamic range compression: samples whose level exceeds threshold_dbfs are
// compressed toward it by `ratio`; quieter samples pass through untouched.
struct DrcConfig {
    double threshold_dbfs = -10.0;
    double ratio = 2.0;

    void validate() const;  // ratio >= 1, threshold < 0
};

int16_t drc_compress_sample(int16_t sample, const DrcConfig& cfg);
audio::AudioFrame drc_compress(const audio::AudioFrame& frame, const DrcConfig& cfg);

// Interpolation state carried across consecutive frames of one stream.
struct ResampleState {
    int16_t previous_sample = 0;
};

// Linear-interpolation upsampling by an integer ratio. Each input sample x
// emits r outputs p + j*(x-p)/r for j in 0..r-1 (floored), where p is the
// previous sample of the stream; the first output of a group is therefore p
// itself, giving the stream a one-sample delay.
std::vector<int16_t> upsample_linear(std::span<const int16_t> input, int ratio,
                                     ResampleState& state);

// Decimation by an integer ratio: keeps the first sample of every group of
// r, drops the rest. Output length is floor(input/r).
std::vector<int16_t> downsample_decimate(std::span<const int16_t> input, int ratio);

// Denoiser contract: one 480-sample 48 kHz frame in, same geometry out.
class Denoiser {
public:
    virtual ~Denoiser() = default;
    virtual void process(std::span<int16_t> frame48k) = 0;
};

std::unique_ptr<Denoiser> identity_denoiser();
// Zeroes frames whose RMS is below floor_dbfs, passes the rest through.
std::unique_ptr<Denoiser> gate_denoiser(double floor_dbfs = -45.0);

// Runs a Denoiser over 20 ms 16 kHz frames by resampling through 48 kHz:
// upsample x3 -> two 480-sample subframes -> denoise -> concatenate ->
// decimate /3. Keeps the stream's interpolation state across frames.
class FrameDenoiser {
public:
    explicit FrameDenoiser(std::unique_ptr<Denoiser> inner);

    // Frame must hold exactly 320 samples at 16 kHz (FramingError otherwise).
    audio::AudioFrame process(const audio::AudioFrame& frame);

private:
    std::unique_ptr<Denoiser> inner_;
    ResampleState state_;
};

// Fractional resampling from 22.05 kHz to 16 kHz by linear interpolation at
// the exact rational ratio 320/441.
std::vector<int16_t> resample_22050_to_16000(std::span<const int16_t> input);

// Same, over framed audio: output is re-framed into 320-sample 16 kHz frames
// with the tail zero padded.
std::vector<audio::AudioFrame> resample_fractional(const std::vector<audio::AudioFrame>& input);

}  // namespace rtva::dsp
