#include "doctest.h"

#include <random>

#include "oracles.hpp"
#include "rtva/dsp.hpp"
#include "rtva/errors.hpp"

using namespace rtva;
using audio::AudioFrame;

namespace {

std::vector<int16_t> random_samples(std::mt19937& rng, size_t n) {
    std::uniform_int_distribution<int> dist(-32768, 32767);
    std::vector<int16_t> v(n);
    for (auto& s : v) s = (int16_t)dist(rng);
    return v;
}

AudioFrame frame16k(std::vector<int16_t> samples) {
    return AudioFrame{std::move(samples), audio::kPipelineRateHz};
}

}  // namespace

TEST_CASE("drc golden values") {
    dsp::DrcConfig cfg;
    // Frozen from the scalar oracle (long double recomputation of the
    // per-sample rule). 16384 sits 4 dB over the -10 dBFS threshold and is
    // pulled halfway back; -32768 is full scale and lands at -5 dBFS.
    CHECK(dsp::drc_compress_sample(16384, cfg) == 13029);
    CHECK(dsp::drc_compress_sample(0, cfg) == 0);
    CHECK(dsp::drc_compress_sample(1000, cfg) == 1000);
    CHECK(dsp::drc_compress_sample(-32768, cfg) == -18427);
    CHECK(oracle::drc_sample(16384) == 13029);
    CHECK(oracle::drc_sample(-32768) == -18427);
}

TEST_CASE("drc matches scalar oracle on random frames") {
    std::mt19937 rng(7);
    dsp::DrcConfig cfg;
    for (int iter = 0; iter < 200; ++iter) {
        auto samples = random_samples(rng, 320);
        auto out = dsp::drc_compress(frame16k(samples), cfg);
        REQUIRE(out.samples.size() == samples.size());
        for (size_t i = 0; i < samples.size(); ++i) {
            CAPTURE(samples[i]);
            REQUIRE(out.samples[i] == oracle::drc_sample(samples[i]));
        }
    }
}

TEST_CASE("drc sign and magnitude properties") {
    std::mt19937 rng(11);
    dsp::DrcConfig cfg;
    auto samples = random_samples(rng, 4096);
    auto out = dsp::drc_compress(frame16k(samples), cfg);
    for (size_t i = 0; i < samples.size(); ++i) {
        const int in = samples[i], o = out.samples[i];
        CHECK((in >= 0) == (o >= 0));
        CHECK(std::abs(o) <= std::abs(in));
        // Below-threshold samples are bit identical. -10 dBFS ~ 10362.3.
        if (std::abs(in) <= 10362) CHECK(o == in);
    }
}

TEST_CASE("drc config validation") {
    CHECK_THROWS_AS((dsp::DrcConfig{-10.0, 0.5}).validate(), ParamError);
    CHECK_THROWS_AS((dsp::DrcConfig{1.0, 2.0}).validate(), ParamError);
    CHECK_NOTHROW(dsp::DrcConfig{}.validate());
}

TEST_CASE("upsample hand traces") {
    dsp::ResampleState st;
    SUBCASE("x=[3,6] r=3 p=0") {
        const int16_t x[] = {3, 6};
        auto y = dsp::upsample_linear(x, 3, st);
        CHECK(y == std::vector<int16_t>{0, 1, 2, 3, 4, 5});
        CHECK(st.previous_sample == 6);
    }
    SUBCASE("r=1 passes the previous sample through") {
        st.previous_sample = 7;
        const int16_t x[] = {5};
        auto y = dsp::upsample_linear(x, 1, st);
        CHECK(y == std::vector<int16_t>{7});
    }
    SUBCASE("floor(-0.5) = -1") {
        st.previous_sample = 32767;
        const int16_t x[] = {-32768};
        auto y = dsp::upsample_linear(x, 2, st);
        CHECK(y == std::vector<int16_t>{32767, -1});
    }
    SUBCASE("r < 1 rejected") {
        const int16_t x[] = {1};
        CHECK_THROWS_AS(dsp::upsample_linear(x, 0, st), ParamError);
    }
}

TEST_CASE("downsample hand traces") {
    SUBCASE("x=[1..6] r=3") {
        const int16_t x[] = {1, 2, 3, 4, 5, 6};
        CHECK(dsp::downsample_decimate(x, 3) == std::vector<int16_t>{1, 4});
    }
    SUBCASE("r=1 is the identity") {
        const int16_t x[] = {9, -4, 0};
        CHECK(dsp::downsample_decimate(x, 1) == std::vector<int16_t>{9, -4, 0});
    }
    SUBCASE("length floor(7/3) = 2") {
        const int16_t x[] = {9, 8, 7, 6, 5, 4, 3};
        CHECK(dsp::downsample_decimate(x, 3) == std::vector<int16_t>{9, 6});
    }
    SUBCASE("r < 1 rejected") {
        const int16_t x[] = {1};
        CHECK_THROWS_AS(dsp::downsample_decimate(x, 0), ParamError);
    }
}

TEST_CASE("resamplers match long-double oracle on random frames") {
    std::mt19937 rng(23);
    for (int iter = 0; iter < 300; ++iter) {
        const int r = 1 + (int)(rng() % 4);
        auto x = random_samples(rng, 1 + rng() % 400);
        const auto p0 = (int16_t)std::uniform_int_distribution<int>(-32768, 32767)(rng);

        dsp::ResampleState st{p0};
        auto up = dsp::upsample_linear(x, r, st);
        REQUIRE(up == oracle::upsample(x, r, p0));

        auto down = dsp::downsample_decimate(x, r);
        REQUIRE(down == oracle::downsample(x, r));
    }
}

TEST_CASE("round-trip delay law: down(up(x,r,p),r) == [p] ++ x[0..N-2]") {
    std::mt19937 rng(31);
    for (int iter = 0; iter < 500; ++iter) {
        const int r = 1 + (int)(rng() % 4);
        auto x = random_samples(rng, 1 + rng() % 256);
        const auto p0 = (int16_t)std::uniform_int_distribution<int>(-32768, 32767)(rng);

        dsp::ResampleState st{p0};
        auto up = dsp::upsample_linear(x, r, st);
        auto down = dsp::downsample_decimate(up, r);

        std::vector<int16_t> expected;
        expected.push_back(p0);
        expected.insert(expected.end(), x.begin(), x.end() - 1);
        REQUIRE(down == expected);
    }
}

TEST_CASE("upsample outputs stay within the [p, cur] interval pre-clip") {
    std::mt19937 rng(37);
    auto x = random_samples(rng, 512);
    dsp::ResampleState st{0};
    auto y = dsp::upsample_linear(x, 3, st);
    int16_t p = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        const auto lo = std::min(p, x[i]);
        const auto hi = std::max(p, x[i]);
        for (int j = 0; j < 3; ++j) {
            // Floor can land one below the interval for negative slopes.
            CHECK(y[i * 3 + j] >= (int)lo - 1);
            CHECK(y[i * 3 + j] <= hi);
        }
        p = x[i];
    }
}

TEST_CASE("frame denoiser with identity inner is the one-sample-delay map") {
    dsp::FrameDenoiser fd(dsp::identity_denoiser());
    std::mt19937 rng(41);

    auto x1 = random_samples(rng, 320);
    auto out1 = fd.process(frame16k(x1));
    REQUIRE(out1.samples.size() == 320);
    CHECK(out1.samples[0] == 0);  // initial previous sample
    for (size_t i = 1; i < 320; ++i) CHECK(out1.samples[i] == x1[i - 1]);

    // Stream state carries into the next frame.
    auto x2 = random_samples(rng, 320);
    auto out2 = fd.process(frame16k(x2));
    CHECK(out2.samples[0] == x1[319]);
    for (size_t i = 1; i < 320; ++i) CHECK(out2.samples[i] == x2[i - 1]);
}

TEST_CASE("frame denoiser edge cases") {
    dsp::FrameDenoiser fd(dsp::identity_denoiser());
    SUBCASE("silence in, silence out") {
        auto out = fd.process(frame16k(std::vector<int16_t>(320, 0)));
        CHECK(out.samples == std::vector<int16_t>(320, 0));
    }
    SUBCASE("wrong frame length") {
        CHECK_THROWS_AS(fd.process(frame16k(std::vector<int16_t>(319, 0))), FramingError);
    }
    SUBCASE("wrong sample rate") {
        AudioFrame f{std::vector<int16_t>(320, 0), 48000};
        CHECK_THROWS_AS(fd.process(f), FramingError);
    }
}

TEST_CASE("gate denoiser") {
    auto gate = dsp::gate_denoiser(-45.0);
    SUBCASE("all-zero frame stays zero") {
        std::vector<int16_t> f(480, 0);
        gate->process(f);
        CHECK(f == std::vector<int16_t>(480, 0));
    }
    SUBCASE("full-scale square wave passes through") {
        std::vector<int16_t> f(480);
        for (size_t i = 0; i < f.size(); ++i) f[i] = (i % 2) ? 32767 : -32767;
        auto copy = f;
        gate->process(f);
        CHECK(f == copy);
    }
    SUBCASE("quiet noise is zeroed") {
        std::vector<int16_t> f(480, 3);  // ~ -80 dBFS
        gate->process(f);
        CHECK(f == std::vector<int16_t>(480, 0));
    }
}

TEST_CASE("identity denoiser is the identity") {
    auto ident = dsp::identity_denoiser();
    std::mt19937 rng(43);
    auto f = random_samples(rng, 480);
    auto copy = f;
    ident->process(f);
    CHECK(f == copy);
}

TEST_CASE("fractional resampler 22050 -> 16000") {
    SUBCASE("441 samples -> 320 samples") {
        std::mt19937 rng(47);
        auto x = random_samples(rng, 441);
        CHECK(dsp::resample_22050_to_16000(x).size() == 320);
    }
    SUBCASE("one second -> one second") {
        std::vector<int16_t> x(22050, 100);
        CHECK(dsp::resample_22050_to_16000(x).size() == 16000);
    }
    SUBCASE("constant input -> constant output") {
        std::vector<int16_t> x(4410, -1234);
        auto y = dsp::resample_22050_to_16000(x);
        for (auto s : y) CHECK(s == -1234);
    }
    SUBCASE("monotone input -> monotone output") {
        std::vector<int16_t> x(2000);
        for (size_t i = 0; i < x.size(); ++i) x[i] = (int16_t)(i * 5 - 5000);
        auto y = dsp::resample_22050_to_16000(x);
        for (size_t i = 1; i < y.size(); ++i) CHECK(y[i] >= y[i - 1]);
    }
    SUBCASE("output count within +/-1 of the exact ratio") {
        std::mt19937 rng(53);
        for (int iter = 0; iter < 50; ++iter) {
            const size_t n = 1 + rng() % 30000;
            std::vector<int16_t> x(n, 1);
            const auto got = (long long)dsp::resample_22050_to_16000(x).size();
            const auto want = (long long)(n * 320 / 441);
            CHECK(std::abs(got - want) <= 1);
        }
    }
}

TEST_CASE("resample_fractional reframes at 16 kHz") {
    std::vector<audio::AudioFrame> in;
    std::mt19937 rng(59);
    // 1 s of 22.05 kHz audio in 441-sample frames.
    for (int i = 0; i < 50; ++i) {
        in.push_back(AudioFrame{random_samples(rng, 441), audio::kTtsNativeRateHz});
    }
    auto out = dsp::resample_fractional(in);
    REQUIRE(out.size() == 50);  // 16000 samples / 320
    for (const auto& f : out) {
        CHECK(f.sample_rate_hz == audio::kPipelineRateHz);
        CHECK(f.samples.size() == (size_t)audio::kFrameSamples);
    }

    AudioFrame wrong{std::vector<int16_t>(320, 0), 16000};
    CHECK_THROWS_AS(dsp::resample_fractional({wrong}), ParamError);
}

TEST_CASE("dsp determinism: same input and state give same output") {
    std::mt19937 rng(61);
    auto x = random_samples(rng, 320);
    dsp::ResampleState a{55}, b{55};
    CHECK(dsp::upsample_linear(x, 3, a) == dsp::upsample_linear(x, 3, b));
    dsp::DrcConfig cfg;
    CHECK(dsp::drc_compress(frame16k(x), cfg) == dsp::drc_compress(frame16k(x), cfg));
}
