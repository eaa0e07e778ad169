#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "rtva/audio.hpp"
#include "rtva/errors.hpp"

using namespace rtva;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("rtva_audio_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() { std::error_code ec; fs::remove_all(path, ec); }
    std::string file(const char* name) const { return (path / name).string(); }
};

std::vector<int16_t> random_samples(std::mt19937& rng, size_t n) {
    std::uniform_int_distribution<int> dist(-32768, 32767);
    std::vector<int16_t> v(n);
    for (auto& s : v) s = (int16_t)dist(rng);
    return v;
}

// Hand-built WAV with arbitrary fmt fields, for negative tests.
void write_raw_wav(const std::string& path, uint16_t format, uint16_t channels,
                   uint32_t rate, uint16_t bits, const std::vector<uint8_t>& payload) {
    std::vector<uint8_t> out;
    auto u16 = [&](uint16_t v) { out.push_back(v & 0xff); out.push_back(v >> 8); };
    auto u32 = [&](uint32_t v) {
        for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
    };
    out.insert(out.end(), {'R','I','F','F'});
    u32(36 + (uint32_t)payload.size());
    out.insert(out.end(), {'W','A','V','E','f','m','t',' '});
    u32(16);
    u16(format); u16(channels); u32(rate);
    u32(rate * channels * bits / 8);
    u16((uint16_t)(channels * bits / 8)); u16(bits);
    out.insert(out.end(), {'d','a','t','a'});
    u32((uint32_t)payload.size());
    out.insert(out.end(), payload.begin(), payload.end());
    std::ofstream f(path, std::ios::binary);
    f.write((const char*)out.data(), (std::streamsize)out.size());
}

}  // namespace

TEST_CASE("one second of 16 kHz audio is 50 frames of 320 samples") {
    TempDir tmp;
    std::mt19937 rng(1);
    auto samples = random_samples(rng, 16000);
    audio::write_pcm_wav(tmp.file("a.wav"), samples, 16000);

    auto content = audio::read_pcm_wav(tmp.file("a.wav"));
    CHECK(content.sample_rate_hz == 16000);
    CHECK(content.frames.size() == 50);
    CHECK(content.padding_samples == 0);
    for (const auto& f : content.frames) CHECK(f.samples.size() == 320);
}

TEST_CASE("330-sample file pads the second frame with 310 zeros") {
    TempDir tmp;
    std::vector<int16_t> samples(330, 1234);
    audio::write_pcm_wav(tmp.file("a.wav"), samples, 16000);

    auto content = audio::read_pcm_wav(tmp.file("a.wav"));
    REQUIRE(content.frames.size() == 2);
    CHECK(content.padding_samples == 310);
    for (size_t i = 0; i < 10; ++i) CHECK(content.frames[1].samples[i] == 1234);
    for (size_t i = 10; i < 320; ++i) CHECK(content.frames[1].samples[i] == 0);
}

TEST_CASE("wav round trip is bit exact") {
    TempDir tmp;
    std::mt19937 rng(2);
    std::vector<audio::AudioFrame> frames;
    for (int i = 0; i < 50; ++i) {
        frames.push_back({random_samples(rng, 320), 16000});
    }
    audio::write_pcm_wav(tmp.file("rt.wav"), frames);
    auto content = audio::read_pcm_wav(tmp.file("rt.wav"));
    REQUIRE(content.frames.size() == frames.size());
    for (size_t i = 0; i < frames.size(); ++i) {
        CHECK(content.frames[i].samples == frames[i].samples);
    }
}

TEST_CASE("framing is lossless: concatenation reproduces the stream") {
    std::mt19937 rng(3);
    for (int iter = 0; iter < 20; ++iter) {
        auto samples = random_samples(rng, 1 + rng() % 5000);
        auto [frames, padding] = audio::frames_from_samples(samples, 16000);
        auto merged = audio::concat(frames);
        REQUIRE(merged.size() == samples.size() + (size_t)padding);
        CHECK(std::equal(samples.begin(), samples.end(), merged.begin()));
        for (size_t i = samples.size(); i < merged.size(); ++i) CHECK(merged[i] == 0);
    }
}

TEST_CASE("unsupported wav files are rejected") {
    TempDir tmp;
    SUBCASE("stereo") {
        write_raw_wav(tmp.file("s.wav"), 1, 2, 16000, 16, std::vector<uint8_t>(640, 0));
        CHECK_THROWS_AS(audio::read_pcm_wav(tmp.file("s.wav")), FormatError);
    }
    SUBCASE("8-bit") {
        write_raw_wav(tmp.file("b.wav"), 1, 1, 16000, 8, std::vector<uint8_t>(320, 0));
        CHECK_THROWS_AS(audio::read_pcm_wav(tmp.file("b.wav")), FormatError);
    }
    SUBCASE("compressed (non-PCM format tag)") {
        write_raw_wav(tmp.file("c.wav"), 6, 1, 16000, 16, std::vector<uint8_t>(640, 0));
        CHECK_THROWS_AS(audio::read_pcm_wav(tmp.file("c.wav")), FormatError);
    }
    SUBCASE("not a wav at all") {
        std::ofstream f(tmp.file("t.txt"));
        f << "hello";
        f.close();
        CHECK_THROWS_AS(audio::read_pcm_wav(tmp.file("t.txt")), FormatError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(audio::read_pcm_wav(tmp.file("nope.wav")), IoError);
    }
}

TEST_CASE("empty frame list writes a valid zero-length wav") {
    TempDir tmp;
    audio::write_pcm_wav(tmp.file("e.wav"), std::vector<audio::AudioFrame>{});
    auto content = audio::read_pcm_wav(tmp.file("e.wav"));
    CHECK(content.frames.empty());
    CHECK(content.padding_samples == 0);
}

TEST_CASE("mixed sample rates are rejected on write") {
    TempDir tmp;
    std::vector<audio::AudioFrame> frames{
        {std::vector<int16_t>(320, 0), 16000},
        {std::vector<int16_t>(441, 0), 22050},
    };
    CHECK_THROWS_AS(audio::write_pcm_wav(tmp.file("m.wav"), frames), ParamError);
}

TEST_CASE("22.05 kHz wav frames to 441 samples per 20 ms") {
    TempDir tmp;
    std::vector<int16_t> samples(22050, 7);
    audio::write_pcm_wav(tmp.file("t.wav"), samples, 22050);
    auto content = audio::read_pcm_wav(tmp.file("t.wav"));
    CHECK(content.sample_rate_hz == 22050);
    CHECK(content.frames.size() == 50);
    CHECK(content.frames.front().samples.size() == 441);
}

TEST_CASE("framing config validation") {
    CHECK(audio::FramingConfig{}.packets_per_second() == 50);
    CHECK(audio::FramingConfig{}.samples_per_frame() == 320);
    CHECK_NOTHROW(audio::FramingConfig{20, 22050}.validate());
    CHECK_THROWS_AS((audio::FramingConfig{3, 16000}).validate(), ParamError);
    CHECK_THROWS_AS((audio::FramingConfig{0, 16000}).validate(), ParamError);
}

TEST_CASE("rms level") {
    std::vector<int16_t> zeros(512, 0);
    CHECK(audio::rms_dbfs(zeros) == -std::numeric_limits<double>::infinity());

    std::vector<int16_t> full(512, 32767);
    CHECK(audio::rms_dbfs(full) == doctest::Approx(0.0).epsilon(0.001));
}
