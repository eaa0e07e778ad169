#include "rtva/codec.hpp"

#include <opus.h>

#include <cstring>

#include "rtva/errors.hpp"

namespace rtva::codec {

namespace {

void check_frame_geometry(const audio::AudioFrame& frame, const CodecConfig& cfg) {
    const size_t expected = (size_t)(cfg.frame_ms * cfg.sample_rate_hz / 1000);
    if (frame.sample_rate_hz != cfg.sample_rate_hz || frame.samples.size() != expected) {
        throw FramingError("codec: frame geometry does not match config");
    }
}

class PassthroughEncoder final : public Encoder {
public:
    explicit PassthroughEncoder(CodecConfig cfg) : cfg_(cfg) {}

    EncodedFrame encode(const audio::AudioFrame& frame) override {
        check_frame_geometry(frame, cfg_);
        EncodedFrame out;
        out.codec_id = CodecId::passthrough;
        out.payload.resize(frame.samples.size() * 2);
        for (size_t i = 0; i < frame.samples.size(); ++i) {
            const auto u = (uint16_t)frame.samples[i];
            out.payload[2 * i] = (uint8_t)(u & 0xff);
            out.payload[2 * i + 1] = (uint8_t)(u >> 8);
        }
        return out;
    }

private:
    CodecConfig cfg_;
};

class PassthroughDecoder final : public Decoder {
public:
    explicit PassthroughDecoder(CodecConfig cfg) : cfg_(cfg) {}

    audio::AudioFrame decode(const EncodedFrame& frame) override {
        const size_t samples = (size_t)(cfg_.frame_ms * cfg_.sample_rate_hz / 1000);
        if (frame.codec_id != CodecId::passthrough || frame.payload.size() != samples * 2) {
            throw CodecError("passthrough: payload must be exactly " +
                             std::to_string(samples * 2) + " bytes");
        }
        audio::AudioFrame out;
        out.sample_rate_hz = cfg_.sample_rate_hz;
        out.samples.resize(samples);
        for (size_t i = 0; i < samples; ++i) {
            out.samples[i] =
                (int16_t)(frame.payload[2 * i] | (frame.payload[2 * i + 1] << 8));
        }
        return out;
    }

    audio::AudioFrame conceal() override {
        audio::AudioFrame out;
        out.sample_rate_hz = cfg_.sample_rate_hz;
        out.samples.assign((size_t)(cfg_.frame_ms * cfg_.sample_rate_hz / 1000), 0);
        return out;
    }

private:
    CodecConfig cfg_;
};

class OpusEncoder final : public Encoder {
public:
    explicit OpusEncoder(CodecConfig cfg) : cfg_(cfg) {
        int err = 0;
        // Lowest-latency profile; complexity left at the library default.
        enc_ = opus_encoder_create(cfg.sample_rate_hz, cfg.channels,
                                   OPUS_APPLICATION_RESTRICTED_LOWDELAY, &err);
        if (err != OPUS_OK || enc_ == nullptr) {
            throw CodecError(std::string("opus encoder: ") + opus_strerror(err));
        }
        opus_encoder_ctl(enc_, OPUS_SET_BITRATE(cfg.target_bitrate_bps));
        opus_encoder_ctl(enc_, OPUS_SET_VBR(cfg.mode == BitrateMode::vbr ? 1 : 0));
    }

    ~OpusEncoder() override { opus_encoder_destroy(enc_); }
    OpusEncoder(const OpusEncoder&) = delete;
    OpusEncoder& operator=(const OpusEncoder&) = delete;

    EncodedFrame encode(const audio::AudioFrame& frame) override {
        check_frame_geometry(frame, cfg_);
        EncodedFrame out;
        out.codec_id = CodecId::opus;
        out.payload.resize(kMaxPacket);
        const int n = opus_encode(enc_, frame.samples.data(),
                                  (int)frame.samples.size(), out.payload.data(),
                                  (opus_int32)out.payload.size());
        if (n < 0) throw CodecError(std::string("opus encode: ") + opus_strerror(n));
        out.payload.resize((size_t)n);
        return out;
    }

private:
    static constexpr size_t kMaxPacket = 1500;
    CodecConfig cfg_;
    ::OpusEncoder* enc_ = nullptr;
};

class OpusDecoder final : public Decoder {
public:
    explicit OpusDecoder(CodecConfig cfg) : cfg_(cfg) {
        int err = 0;
        dec_ = opus_decoder_create(cfg.sample_rate_hz, cfg.channels, &err);
        if (err != OPUS_OK || dec_ == nullptr) {
            throw CodecError(std::string("opus decoder: ") + opus_strerror(err));
        }
    }

    ~OpusDecoder() override { opus_decoder_destroy(dec_); }
    OpusDecoder(const OpusDecoder&) = delete;
    OpusDecoder& operator=(const OpusDecoder&) = delete;

    audio::AudioFrame decode(const EncodedFrame& frame) override {
        if (frame.codec_id != CodecId::opus || frame.payload.empty()) {
            throw CodecError("opus: empty or mismatched payload");
        }
        return run(frame.payload.data(), (int)frame.payload.size());
    }

    audio::AudioFrame conceal() override { return run(nullptr, 0); }

private:
    audio::AudioFrame run(const uint8_t* data, int len) {
        const int samples = cfg_.frame_ms * cfg_.sample_rate_hz / 1000;
        audio::AudioFrame out;
        out.sample_rate_hz = cfg_.sample_rate_hz;
        out.samples.resize((size_t)samples);
        const int n = opus_decode(dec_, data, len, out.samples.data(), samples, 0);
        if (n < 0) throw CodecError(std::string("opus decode: ") + opus_strerror(n));
        out.samples.resize((size_t)n);
        if (n != samples) throw CodecError("opus decode: unexpected frame length");
        return out;
    }

    CodecConfig cfg_;
    ::OpusDecoder* dec_ = nullptr;
};

}  // namespace

CodecId codec_from_name(const std::string& name) {
    if (name == "passthrough") return CodecId::passthrough;
    if (name == "opus") return CodecId::opus;
    throw ParamError("unknown codec: " + name);
}

std::string codec_name(CodecId id) {
    return id == CodecId::opus ? "opus" : "passthrough";
}

void CodecConfig::validate() const {
    if (target_bitrate_bps <= 0) throw ParamError("codec: bitrate must be positive");
    if (channels != 1) throw ParamError("codec: only mono supported");
    audio::FramingConfig{frame_ms, sample_rate_hz}.validate();
}

std::unique_ptr<Encoder> make_encoder(const CodecConfig& cfg) {
    cfg.validate();
    if (cfg.id == CodecId::opus) return std::make_unique<OpusEncoder>(cfg);
    return std::make_unique<PassthroughEncoder>(cfg);
}

std::unique_ptr<Decoder> make_decoder(const CodecConfig& cfg) {
    cfg.validate();
    if (cfg.id == CodecId::opus) return std::make_unique<OpusDecoder>(cfg);
    return std::make_unique<PassthroughDecoder>(cfg);
}

}  // namespace rtva::codec
