#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rtva/audio.hpp"

namespace rtva::codec {

enum class CodecId { passthrough, opus };
enum class BitrateMode { vbr, cbr };

CodecId codec_from_name(const std::string& name);  // ParamError on unknown
std::string codec_name(CodecId id);

struct CodecConfig {
    CodecId id = CodecId::opus;
    int target_bitrate_bps = 24000;
    BitrateMode mode = BitrateMode::vbr;
    int frame_ms = audio::kFrameMs;
    int sample_rate_hz = audio::kPipelineRateHz;
    int channels = 1;

    void validate() const;
};

struct EncodedFrame {
    std::vector<uint8_t> payload;
    CodecId codec_id = CodecId::passthrough;
};

// One encoder/decoder state per stream; instances are not thread safe, but
// distinct streams are fully independent.
class Encoder {
public:
    virtual ~Encoder() = default;
    // Frame must be 320 samples at 16 kHz (FramingError otherwise).
    virtual EncodedFrame encode(const audio::AudioFrame& frame) = 0;
};

class Decoder {
public:
    virtual ~Decoder() = default;
    virtual audio::AudioFrame decode(const EncodedFrame& frame) = 0;
    // Synthesizes a frame for a lost packet (concealment; zero fill for the
    // passthrough codec).
    virtual audio::AudioFrame conceal() = 0;
};

std::unique_ptr<Encoder> make_encoder(const CodecConfig& cfg);
std::unique_ptr<Decoder> make_decoder(const CodecConfig& cfg);

}  // namespace rtva::codec
