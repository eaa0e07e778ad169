#include "rtva/dsp.hpp"

#include <algorithm>
#include <cmath>

#include "rtva/errors.hpp"

namespace rtva::dsp {

namespace {

// floor(a/b) for b > 0, exact for negative a.
inline int64_t floor_div(int64_t a, int64_t b) {
    int64_t q = a / b;
    if (a % b != 0 && a < 0) --q;
    return q;
}

constexpr int kUpRatio = 3;  // 16 kHz <-> 48 kHz

class IdentityDenoiser final : public Denoiser {
public:
    void process(std::span<int16_t>) override {}
};

class GateDenoiser final : public Denoiser {
public:
    explicit GateDenoiser(double floor_dbfs) : floor_dbfs_(floor_dbfs) {}

    void process(std::span<int16_t> frame) override {
        if (audio::rms_dbfs(frame) < floor_dbfs_) {
            std::fill(frame.begin(), frame.end(), (int16_t)0);
        }
    }

private:
    double floor_dbfs_;
};

}  // namespace

void DrcConfig::validate() const {
    if (ratio < 1.0) throw ParamError("drc: ratio must be >= 1");
    if (threshold_dbfs >= 0.0) throw ParamError("drc: threshold must be below 0 dBFS");
}

int16_t drc_compress_sample(int16_t sample, const DrcConfig& cfg) {
    if (sample == 0) return 0;
    const double level = 20.0 * std::log10(std::abs((int32_t)sample) / 32768.0);
    if (level <= cfg.threshold_dbfs) return sample;
    const double compressed = cfg.threshold_dbfs + (level - cfg.threshold_dbfs) / cfg.ratio;
    const double sigma = sample > 0 ? 1.0 : -1.0;
    return (int16_t)std::floor(std::pow(10.0, compressed / 20.0) * sigma * 32767.0);
}

audio::AudioFrame drc_compress(const audio::AudioFrame& frame, const DrcConfig& cfg) {
    audio::AudioFrame out = frame;
    for (auto& s : out.samples) s = drc_compress_sample(s, cfg);
    return out;
}

std::vector<int16_t> upsample_linear(std::span<const int16_t> input, int ratio,
                                     ResampleState& state) {
    if (ratio < 1) throw ParamError("upsample: ratio must be >= 1");
    std::vector<int16_t> out;
    out.reserve(input.size() * (size_t)ratio);
    int64_t prev = state.previous_sample;
    for (int16_t cur : input) {
        const int64_t rise = (int64_t)cur - prev;
        for (int j = 0; j < ratio; ++j) {
            int64_t v = prev + floor_div((int64_t)j * rise, ratio);
            v = std::clamp<int64_t>(v, -32768, 32767);
            out.push_back((int16_t)v);
        }
        prev = cur;
    }
    if (!input.empty()) state.previous_sample = input.back();
    return out;
}

std::vector<int16_t> downsample_decimate(std::span<const int16_t> input, int ratio) {
    if (ratio < 1) throw ParamError("downsample: ratio must be >= 1");
    const size_t n = input.size() / (size_t)ratio;
    std::vector<int16_t> out;
    out.reserve(n);
    for (size_t i = 0; out.size() < n; i += (size_t)ratio) {
        out.push_back(input[i]);
    }
    return out;
}

std::unique_ptr<Denoiser> identity_denoiser() { return std::make_unique<IdentityDenoiser>(); }

std::unique_ptr<Denoiser> gate_denoiser(double floor_dbfs) {
    return std::make_unique<GateDenoiser>(floor_dbfs);
}

FrameDenoiser::FrameDenoiser(std::unique_ptr<Denoiser> inner) : inner_(std::move(inner)) {}

audio::AudioFrame FrameDenoiser::process(const audio::AudioFrame& frame) {
    if (frame.sample_rate_hz != audio::kPipelineRateHz ||
        frame.samples.size() != (size_t)audio::kFrameSamples) {
        throw FramingError("denoiser expects 320-sample frames at 16 kHz");
    }

    std::vector<int16_t> wide = upsample_linear(frame.samples, kUpRatio, state_);
    // Two 10 ms subframes at 48 kHz, the denoiser's native framing.
    std::span<int16_t> all(wide);
    inner_->process(all.subspan(0, audio::kDenoiserFrameSamples));
    inner_->process(all.subspan(audio::kDenoiserFrameSamples));

    audio::AudioFrame out;
    out.sample_rate_hz = audio::kPipelineRateHz;
    out.samples = downsample_decimate(wide, kUpRatio);
    return out;
}

std::vector<int16_t> resample_22050_to_16000(std::span<const int16_t> input) {
    std::vector<int16_t> out;
    if (input.empty()) return out;
    out.reserve(input.size() * 320 / 441 + 2);
    // Output sample n sits at input position n * 441/320; interpolate between
    // the two neighbouring input samples, with exact integer phase.
    for (uint64_t n = 0;; ++n) {
        const uint64_t num = n * 441;
        const size_t idx = (size_t)(num / 320);
        const int64_t frac = (int64_t)(num % 320);
        if (idx >= input.size()) break;
        const int64_t a = input[idx];
        const int64_t b = (idx + 1 < input.size()) ? input[idx + 1] : a;
        out.push_back((int16_t)(a + floor_div((b - a) * frac, 320)));
    }
    return out;
}

std::vector<audio::AudioFrame> resample_fractional(const std::vector<audio::AudioFrame>& input) {
    for (const auto& f : input) {
        if (f.sample_rate_hz != audio::kTtsNativeRateHz) {
            throw ParamError("fractional resampler expects 22050 Hz input");
        }
    }
    std::vector<int16_t> merged = audio::concat(input);
    std::vector<int16_t> narrow = resample_22050_to_16000(merged);
    auto [frames, padding] = audio::frames_from_samples(narrow, audio::kPipelineRateHz);
    (void)padding;
    return std::move(frames);
}

}  // namespace rtva::dsp
