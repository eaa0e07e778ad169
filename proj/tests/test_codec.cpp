#include "doctest.h"

#include <cmath>
#include <numeric>
#include <random>

#include "rtva/codec.hpp"
#include "rtva/errors.hpp"

using namespace rtva;
using audio::AudioFrame;

namespace {

AudioFrame tone_frame(double freq_hz, double amplitude, int start_sample) {
    AudioFrame f;
    f.sample_rate_hz = 16000;
    f.samples.resize(320);
    for (int i = 0; i < 320; ++i) {
        const double t = (double)(start_sample + i) / 16000.0;
        f.samples[(size_t)i] =
            (int16_t)std::lround(amplitude * 32767.0 * std::sin(2.0 * M_PI * freq_hz * t));
    }
    return f;
}

codec::CodecConfig passthrough_cfg() {
    codec::CodecConfig cfg;
    cfg.id = codec::CodecId::passthrough;
    return cfg;
}

codec::CodecConfig opus_cfg() {
    codec::CodecConfig cfg;
    cfg.id = codec::CodecId::opus;
    return cfg;
}

}  // namespace

TEST_CASE("passthrough payload is the little-endian sample bytes") {
    auto enc = codec::make_encoder(passthrough_cfg());
    AudioFrame f;
    f.samples.assign(320, 0);
    f.samples[0] = 0x0102;
    f.samples[1] = -2;  // 0xFFFE
    auto out = enc->encode(f);
    REQUIRE(out.payload.size() == 640);
    CHECK(out.payload[0] == 0x02);
    CHECK(out.payload[1] == 0x01);
    CHECK(out.payload[2] == 0xFE);
    CHECK(out.payload[3] == 0xFF);
}

TEST_CASE("passthrough round trip is bit exact on random frames") {
    auto enc = codec::make_encoder(passthrough_cfg());
    auto dec = codec::make_decoder(passthrough_cfg());
    std::mt19937 rng(5);
    std::uniform_int_distribution<int> dist(-32768, 32767);
    for (int iter = 0; iter < 100; ++iter) {
        AudioFrame f;
        f.samples.resize(320);
        for (auto& s : f.samples) s = (int16_t)dist(rng);
        auto round = dec->decode(enc->encode(f));
        REQUIRE(round.samples == f.samples);
    }
}

TEST_CASE("passthrough rejects wrong payload length and geometry") {
    auto enc = codec::make_encoder(passthrough_cfg());
    auto dec = codec::make_decoder(passthrough_cfg());

    codec::EncodedFrame bad;
    bad.codec_id = codec::CodecId::passthrough;
    bad.payload.assign(639, 0);
    CHECK_THROWS_AS(dec->decode(bad), CodecError);

    AudioFrame short_frame;
    short_frame.samples.assign(319, 0);
    CHECK_THROWS_AS(enc->encode(short_frame), FramingError);

    AudioFrame wrong_rate;
    wrong_rate.samples.assign(320, 0);
    wrong_rate.sample_rate_hz = 48000;
    CHECK_THROWS_AS(enc->encode(wrong_rate), FramingError);
}

TEST_CASE("passthrough concealment yields a silent frame") {
    auto dec = codec::make_decoder(passthrough_cfg());
    auto f = dec->conceal();
    CHECK(f.samples == std::vector<int16_t>(320, 0));
}

TEST_CASE("opus round trip preserves frame geometry, lossily") {
    auto enc = codec::make_encoder(opus_cfg());
    auto dec = codec::make_decoder(opus_cfg());

    int start = 0;
    size_t frames = 0;
    for (int i = 0; i < 50; ++i) {
        auto f = tone_frame(440.0, 0.5, start);
        start += 320;
        auto e = enc->encode(f);
        auto d = dec->decode(e);
        REQUIRE(d.samples.size() == 320);
        ++frames;
    }
    CHECK(frames == 50);
}

TEST_CASE("opus reconstructs a tone with bounded distortion") {
    auto enc = codec::make_encoder(opus_cfg());
    auto dec = codec::make_decoder(opus_cfg());

    // Skip the codec's convergence time, then compare energy of the error.
    int start = 0;
    double err_acc = 0, sig_acc = 0;
    for (int i = 0; i < 100; ++i) {
        auto f = tone_frame(440.0, 0.5, start);
        start += 320;
        auto d = dec->decode(enc->encode(f));
        if (i < 20) continue;
        for (size_t k = 0; k < 320; ++k) {
            const double e = (double)f.samples[k] - (double)d.samples[k];
            err_acc += e * e;
            sig_acc += (double)f.samples[k] * (double)f.samples[k];
        }
    }
    CHECK(err_acc < sig_acc);  // better than -0 dB SNR, i.e. actually correlated
    CHECK(err_acc > 0.0);      // and lossy, not a passthrough
}

TEST_CASE("opus concealment synthesizes a frame without error") {
    auto enc = codec::make_encoder(opus_cfg());
    auto dec = codec::make_decoder(opus_cfg());
    for (int i = 0; i < 5; ++i) dec->decode(enc->encode(tone_frame(300.0, 0.4, i * 320)));
    auto f = dec->conceal();
    CHECK(f.samples.size() == 320);
}

TEST_CASE("opus VBR spends less on silence than on speech-like audio") {
    auto enc = codec::make_encoder(opus_cfg());

    size_t tone_bytes = 0, silence_bytes = 0;
    int start = 0;
    for (int i = 0; i < 100; ++i) {
        tone_bytes += enc->encode(tone_frame(440.0, 0.5, start)).payload.size();
        start += 320;
    }
    AudioFrame silence;
    silence.samples.assign(320, 0);
    for (int i = 0; i < 100; ++i) silence_bytes += enc->encode(silence).payload.size();

    CHECK(silence_bytes < tone_bytes);
}

TEST_CASE("opus mean payload respects the configured 24 kbps target") {
    auto enc = codec::make_encoder(opus_cfg());
    std::mt19937 rng(9);
    std::uniform_int_distribution<int> dist(-6000, 6000);

    // Noisy speech-band signal, harder than a pure tone.
    size_t total = 0;
    const int frames = 500;
    int start = 0;
    for (int i = 0; i < frames; ++i) {
        auto f = tone_frame(250.0 + (i % 7) * 60.0, 0.4, start);
        for (auto& s : f.samples) {
            s = (int16_t)std::clamp((int)s + dist(rng), -32768, 32767);
        }
        start += 320;
        total += enc->encode(f).payload.size();
    }
    const double mean_payload = (double)total / frames;
    // 24 kbps at 50 packets/s is 60 bytes per frame.
    CHECK(mean_payload <= 60.0 * 1.05);
}

TEST_CASE("codec names") {
    CHECK(codec::codec_from_name("opus") == codec::CodecId::opus);
    CHECK(codec::codec_from_name("passthrough") == codec::CodecId::passthrough);
    CHECK_THROWS_AS(codec::codec_from_name("bogus"), ParamError);
    CHECK(codec::codec_name(codec::CodecId::opus) == "opus");
}

TEST_CASE("codec config validation") {
    codec::CodecConfig cfg;
    cfg.target_bitrate_bps = 0;
    CHECK_THROWS_AS(cfg.validate(), ParamError);
}
