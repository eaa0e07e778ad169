// Acceptance suite: runs every criterion end to end and prints one PASS/FAIL
// line per criterion. Exit code is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "rtva/backends.hpp"
#include "rtva/eval.hpp"
#include "rtva/pipeline.hpp"
#include "rtva/rtp.hpp"
#include "rtva/utf8.hpp"

using namespace rtva;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Criterion {
    bool ok = true;
    std::ostringstream notes;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes << (notes.str().empty() ? "" : "; ") << what;
        }
    }
};

struct Fixture {
    fs::path dir;
    Fixture() {
        dir = fs::temp_directory_path() /
              ("rtva_acceptance_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    ~Fixture() { std::error_code ec; fs::remove_all(dir, ec); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<int16_t> random_frame(std::mt19937& rng, size_t n) {
    std::uniform_int_distribution<int> dist(-32768, 32767);
    std::vector<int16_t> v(n);
    for (auto& s : v) s = (int16_t)dist(rng);
    return v;
}

std::vector<int16_t> tone(size_t n, double freq, double amplitude = 0.6) {
    std::vector<int16_t> v(n);
    for (size_t i = 0; i < n; ++i) {
        v[i] = (int16_t)std::lround(amplitude * 32767.0 *
                                    std::sin(2.0 * M_PI * freq * (double)i / 16000.0));
    }
    return v;
}

// Deterministic speech-shaped signal: three moving tones plus low noise.
std::vector<int16_t> speech_like(size_t n, uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> noise(-1500, 1500);
    std::vector<int16_t> v(n);
    for (size_t i = 0; i < n; ++i) {
        const double t = (double)i / 16000.0;
        double s = 0.30 * std::sin(2.0 * M_PI * (220.0 + 40.0 * std::sin(2.0 * M_PI * 0.7 * t)) * t) +
                   0.22 * std::sin(2.0 * M_PI * 680.0 * t + 1.1) +
                   0.12 * std::sin(2.0 * M_PI * 1320.0 * t + 0.4);
        s *= 0.75 + 0.25 * std::sin(2.0 * M_PI * 2.3 * t);  // syllable-ish envelope
        int sample = (int)std::lround(s * 32767.0) + noise(rng);
        v[i] = (int16_t)std::clamp(sample, -32768, 32767);
    }
    return v;
}

std::vector<seg::SpeechSegment> predict_segments(const std::vector<int16_t>& samples,
                                                 const pipeline::ServerConfig& cfg) {
    seg::SegmenterSession session(
        cfg.eoq, seg::energy_vad(cfg.vad_threshold_dbfs, cfg.vad_hangover_frames));
    std::vector<seg::SpeechSegment> out;
    auto [frames, pad] = audio::frames_from_samples(samples, 16000);
    (void)pad;
    for (const auto& f : frames) {
        for (auto& ev : session.push(f)) {
            if (ev.kind == seg::SegmentEvent::Kind::end_of_query) {
                out.push_back(std::move(ev.segment));
            }
        }
    }
    return out;
}

// 1. drc/upsample/downsample match the scalar oracles on 1000 random frames.
Criterion criterion_dsp_oracle() {
    Criterion c;
    const auto t0 = Clock::now();
    std::mt19937 rng(101);
    dsp::DrcConfig drc;
    for (int iter = 0; iter < 1000 && c.ok; ++iter) {
        const auto frame = random_frame(rng, 320);
        const auto compressed =
            dsp::drc_compress({frame, audio::kPipelineRateHz}, drc);
        for (size_t i = 0; i < frame.size(); ++i) {
            if (compressed.samples[i] != oracle::drc_sample(frame[i])) {
                c.expect(false, "drc mismatch at sample " + std::to_string(frame[i]));
                break;
            }
        }

        const int r = 1 + (int)(rng() % 4);
        const auto p0 = (int16_t)std::uniform_int_distribution<int>(-32768, 32767)(rng);
        dsp::ResampleState st{p0};
        c.expect(dsp::upsample_linear(frame, r, st) == oracle::upsample(frame, r, p0),
                 "upsample mismatch");
        c.expect(dsp::downsample_decimate(frame, r) == oracle::downsample(frame, r),
                 "downsample mismatch");
    }
    const double elapsed = seconds_since(t0);
    c.expect(elapsed < 5.0, "runtime " + std::to_string(elapsed) + "s exceeds 5s");
    return c;
}

// 2. down(up(x, r, p), r) == [p] ++ x[0..N-2] on 500 random triples.
Criterion criterion_roundtrip_law() {
    Criterion c;
    const auto t0 = Clock::now();
    std::mt19937 rng(103);
    for (int iter = 0; iter < 500 && c.ok; ++iter) {
        const auto x = random_frame(rng, 1 + rng() % 320);
        const int r = 1 + (int)(rng() % 4);
        const auto p0 = (int16_t)std::uniform_int_distribution<int>(-32768, 32767)(rng);
        dsp::ResampleState st{p0};
        const auto round = dsp::downsample_decimate(dsp::upsample_linear(x, r, st), r);
        std::vector<int16_t> expected;
        expected.push_back(p0);
        expected.insert(expected.end(), x.begin(), x.end() - 1);
        c.expect(round == expected, "delay law violated");
    }
    const double elapsed = seconds_since(t0);
    c.expect(elapsed < 2.0, "runtime " + std::to_string(elapsed) + "s exceeds 2s");
    return c;
}

// 3. DRC golden values, frozen from the scalar oracle.
Criterion criterion_drc_golden() {
    Criterion c;
    dsp::DrcConfig cfg;
    c.expect(dsp::drc_compress_sample(16384, cfg) == 13029, "16384 -> 13029");
    c.expect(dsp::drc_compress_sample(0, cfg) == 0, "0 -> 0");
    c.expect(dsp::drc_compress_sample(1000, cfg) == 1000, "1000 -> 1000");
    // Full-scale negative input sits at 0 dBFS and compresses to -5 dBFS:
    // floor(10^(-0.25) * -32767) = floor(-18426.238) = -18427.
    c.expect(oracle::drc_sample(-32768) == -18427, "oracle value for -32768");
    c.expect(dsp::drc_compress_sample(-32768, cfg) == -18427, "-32768 -> -18427");
    return c;
}

// 4. RTP wire format: fuzz identity, golden bytes, sequence wraparound.
Criterion criterion_rtp_wire() {
    Criterion c;
    std::mt19937 rng(107);
    for (int i = 0; i < 10000 && c.ok; ++i) {
        rtp::RtpPacket p;
        p.header.padding = rng() & 1;
        p.header.extension = rng() & 1;
        p.header.marker = rng() & 1;
        p.header.payload_type = (uint8_t)(rng() % 128);
        p.header.sequence_number = (uint16_t)rng();
        p.header.timestamp = rng();
        p.header.ssrc = rng();
        p.payload.resize(1 + rng() % 256);
        for (auto& b : p.payload) b = (uint8_t)rng();
        c.expect(rtp::parse(rtp::serialize(p)) == p, "parse(serialize(p)) != p");
    }

    rtp::RtpPacket golden;
    golden.header.payload_type = 111;
    golden.header.sequence_number = 1;
    golden.header.timestamp = 320;
    golden.header.ssrc = 0x12345678;
    golden.payload = {0x00};
    const auto bytes = rtp::serialize(golden);
    c.expect(bytes[0] == 0x80 && bytes[1] == 0x6F && bytes[2] == 0x00 && bytes[3] == 0x01,
             "golden header bytes");

    net::Packetizer pk(rtp::kPayloadTypeOpus, 11);
    while (pk.next_sequence() != 65535) (void)pk.packetize({1});
    const auto last = pk.packetize({1});
    const auto wrapped = pk.packetize({1});
    c.expect(last.header.sequence_number == 65535 && wrapped.header.sequence_number == 0,
             "sequence 65535 -> 0");
    return c;
}

// 5. Loopback fidelity: passthrough + identity denoiser + DRC off, 10 s.
Criterion criterion_loopback_fidelity(const Fixture& fx) {
    Criterion c;
    const auto t0 = Clock::now();

    std::vector<int16_t> source;
    for (int burst = 0; burst < 5; ++burst) {
        const auto speech = speech_like(16000, 200 + (uint32_t)burst);
        source.insert(source.end(), speech.begin(), speech.end());
        source.insert(source.end(), 16000, 0);
    }
    audio::write_pcm_wav(fx.file("fidelity_src.wav"), source, 16000);

    pipeline::ServerConfig scfg;
    scfg.listen_port = 0;
    scfg.mode = pipeline::ServerMode::echo;  // sink only; echo replies ignored
    scfg.codec.id = codec::CodecId::passthrough;
    scfg.received_sink_wav = fx.file("fidelity_received.wav");
    pipeline::Server server(scfg);
    server.start();

    pipeline::ClientConfig ccfg;
    ccfg.source_wav = fx.file("fidelity_src.wav");
    ccfg.sent_tap_wav = fx.file("fidelity_sent.wav");
    ccfg.codec.id = codec::CodecId::passthrough;
    ccfg.drc_enabled = false;
    ccfg.denoiser = pipeline::DenoiserMode::identity;
    ccfg.transport.remote = {"127.0.0.1", server.local_port()};
    ccfg.realtime = true;  // paced at 20 ms, as on the wire
    ccfg.response_wait_ms = 200;
    const auto report = pipeline::run_client(ccfg);

    // Give the server's 20 ms poll a moment to drain the tail.
    std::this_thread::sleep_for(std::chrono::milliseconds(200));
    const auto stats = server.stats();
    server.stop();

    c.expect(report.frames_sent == 500, "expected 500 frames sent");
    c.expect(report.send_errors == 0, "send errors on loopback");
    c.expect(stats.packets_received == 500, "server received " +
                                                std::to_string(stats.packets_received) +
                                                "/500 packets");
    c.expect(stats.losses == 0, "unexpected loss events");

    const auto sent = audio::concat(audio::read_pcm_wav(fx.file("fidelity_sent.wav")).frames);
    const auto received =
        audio::concat(audio::read_pcm_wav(fx.file("fidelity_received.wav")).frames);
    c.expect(sent == received, "received PCM differs from sent PCM");

    const double elapsed = seconds_since(t0);
    c.expect(elapsed < 15.0, "runtime " + std::to_string(elapsed) + "s exceeds 15s");
    return c;
}

// 6. Frame budget: mean per-frame client processing below 20 ms, with the
// passthrough codec and with Opus, over >= 3000 frames each.
Criterion criterion_frame_budget(const Fixture& fx) {
    Criterion c;

    const auto speech = speech_like(16000 * 61, 300);  // 61 s -> 3050 frames
    audio::write_pcm_wav(fx.file("budget_src.wav"), speech, 16000);

    net::UdpSocket drain;  // bound but never read; sends are fire-and-forget
    drain.bind(0);

    for (const auto codec_id : {codec::CodecId::passthrough, codec::CodecId::opus}) {
        pipeline::ClientConfig ccfg;
        ccfg.source_wav = fx.file("budget_src.wav");
        ccfg.codec.id = codec_id;
        ccfg.drc_enabled = true;
        ccfg.denoiser = pipeline::DenoiserMode::identity;  // full resampling wrapper
        ccfg.transport.remote = {"127.0.0.1", drain.local_port()};
        ccfg.realtime = false;
        ccfg.response_wait_ms = 0;
        const auto report = pipeline::run_client(ccfg);

        c.expect(report.frames_sent >= 3000, "need >= 3000 frames");
        c.expect(report.stages.stages.size() == 3, "expected drc/denoise/encode stages");
        std::ostringstream what;
        what << codec::codec_name(codec_id) << " total mean "
             << report.stages.total_mean_ms << " ms";
        c.expect(report.stages.total_mean_ms < 20.0, what.str() + " >= 20 ms");
        c.notes << (c.notes.str().empty() ? "" : "; ") << what.str();
    }
    return c;
}

// 7. Opus VBR bitrate on a 60 s speech/silence fixture.
Criterion criterion_bitrate(const Fixture& fx) {
    Criterion c;

    std::vector<int16_t> source;
    for (int block = 0; block < 15; ++block) {  // 2 s speech, 2 s silence, x15
        const auto speech = speech_like(32000, 400 + (uint32_t)block);
        source.insert(source.end(), speech.begin(), speech.end());
        source.insert(source.end(), 32000, 0);
    }
    audio::write_pcm_wav(fx.file("bitrate_src.wav"), source, 16000);

    net::UdpSocket drain;
    drain.bind(0);

    pipeline::ClientConfig ccfg;
    ccfg.source_wav = fx.file("bitrate_src.wav");
    ccfg.codec.id = codec::CodecId::opus;
    ccfg.codec.target_bitrate_bps = 24000;
    ccfg.codec.mode = codec::BitrateMode::vbr;
    ccfg.drc_enabled = false;
    ccfg.denoiser = pipeline::DenoiserMode::off;
    ccfg.transport.remote = {"127.0.0.1", drain.local_port()};
    ccfg.realtime = false;
    ccfg.response_wait_ms = 0;
    const auto report = pipeline::run_client(ccfg);

    c.expect(report.bitrate_windows.size() == 60, "expected 60 one-second windows");
    c.expect(report.mean_upload_kbps >= 8.0 && report.mean_upload_kbps <= 24.0,
             "mean " + std::to_string(report.mean_upload_kbps) + " kbps outside [8,24]");

    double max_silence = 0.0, min_speech = 1e9;
    for (const auto& w : report.bitrate_windows) {
        c.expect(w.kbps() <= 30.0,
                 "window " + std::to_string(w.index) + " above 30 kbps");
        const bool speech_window = (w.index / 2) % 2 == 0;
        if (speech_window) {
            min_speech = std::min(min_speech, w.kbps());
        } else {
            max_silence = std::max(max_silence, w.kbps());
        }
    }
    c.expect(max_silence < min_speech, "silence windows not strictly below speech");
    {
        std::ostringstream what;
        what << "mean " << report.mean_upload_kbps << " kbps, silence<=" << max_silence
             << ", speech>=" << min_speech;
        c.notes << (c.notes.str().empty() ? "" : "; ") << what.str();
    }
    return c;
}

// 8. End-of-query timing: 1216 ms of silence triggers, 1184 ms does not.
Criterion criterion_eoq_timing() {
    Criterion c;

    auto run = [](int silence_ms) {
        seg::SegmenterSession session({}, seg::energy_vad(-40.0, 0));
        std::vector<int16_t> samples = tone(10240, 440.0);  // 640 ms speech
        samples.insert(samples.end(), (size_t)(16 * silence_ms), 0);
        auto [frames, pad] = audio::frames_from_samples(samples, 16000);
        (void)pad;
        int end_of_query = 0, starts = 0;
        for (const auto& f : frames) {
            for (auto& ev : session.push(f)) {
                if (ev.kind == seg::SegmentEvent::Kind::end_of_query) ++end_of_query;
                if (ev.kind == seg::SegmentEvent::Kind::segment_start) ++starts;
            }
        }
        return std::pair{starts, end_of_query};
    };

    const auto with_1216 = run(1216);
    c.expect(with_1216.first == 1, "segment did not start");
    c.expect(with_1216.second == 1, "1216 ms of silence must trigger end_of_query");
    const auto with_1184 = run(1184);
    c.expect(with_1184.second == 0, "1184 ms of silence must not trigger end_of_query");
    return c;
}

// 9. End-to-end delay with mocks over loopback, 10 scripted queries.
Criterion criterion_delay(const Fixture& fx) {
    Criterion c;

    std::vector<int16_t> source = tone(10240, 440.0);        // 640 ms query
    source.insert(source.end(), 22400, 0);                   // 1.4 s tail
    audio::write_pcm_wav(fx.file("delay_q.wav"), source, 16000);

    pipeline::ServerConfig scfg;
    scfg.listen_port = 0;
    scfg.codec.id = codec::CodecId::passthrough;
    scfg.vad_hangover_frames = 0;

    const auto segments = predict_segments(source, scfg);
    c.expect(segments.size() == 1, "fixture must contain one segment");
    if (!c.ok) return c;
    const auto fp = backends::segment_fingerprint(segments[0]);

    pipeline::ServerBackends be;
    be.asr = backends::scripted_asr({{fp, "scripted query"}});
    be.llm = backends::scripted_llm({{"scripted query", "ok|"}}, 8, 0);  // zero delay
    be.tts = backends::tone_tts(22050);
    pipeline::Server server(scfg, std::move(be));
    server.start();

    metrics::DelayReport delays;
    for (int q = 0; q < 10; ++q) {
        pipeline::ClientConfig ccfg;
        ccfg.source_wav = fx.file("delay_q.wav");
        ccfg.codec.id = codec::CodecId::passthrough;
        ccfg.drc_enabled = false;
        ccfg.denoiser = pipeline::DenoiserMode::off;
        ccfg.transport.remote = {"127.0.0.1", server.local_port()};
        ccfg.transport.seed = 1000 + (uint32_t)q;  // fresh stream per query
        ccfg.realtime = true;                      // wall-clock pacing
        ccfg.response_wait_ms = 600;
        const auto report = pipeline::run_client(ccfg);
        if (report.delays.per_query_ms.size() != 1) {
            c.expect(false, "query " + std::to_string(q + 1) + " produced " +
                                std::to_string(report.delays.per_query_ms.size()) +
                                " delay samples");
            break;
        }
        delays.per_query_ms.push_back(report.delays.per_query_ms[0]);
    }
    server.stop();
    if (!c.ok) return c;

    for (double d : delays.per_query_ms) {
        c.expect(d >= 1200.0, "delay " + std::to_string(d) + " below the 1.2 s EOQ wait");
    }
    c.expect(delays.average_ms() <= 2000.0,
             "average delay " + std::to_string(delays.average_ms()) + " above 2 s");
    {
        std::ostringstream what;
        what << "average " << delays.average_ms() << " ms over "
             << delays.per_query_ms.size() << " queries";
        c.notes << (c.notes.str().empty() ? "" : "; ") << what.str();
    }
    return c;
}

// 10. Eval oracle: DP counts vs brute force, golden manifest, NLD properties.
Criterion criterion_eval_oracle() {
    Criterion c;
    std::mt19937 rng(109);
    static const std::vector<std::string> vocab = {"a", "b", "ab", "ka", "kha", "x"};

    auto words = [&](int max_tokens) {
        std::string out;
        const int n = (int)(rng() % (unsigned)(max_tokens + 1));
        for (int i = 0; i < n; ++i) {
            if (!out.empty()) out += " ";
            out += vocab[rng() % vocab.size()];
        }
        return out;
    };
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::istringstream is(s);
        std::string w;
        while (is >> w) out.push_back(w);
        return out;
    };

    for (int iter = 0; iter < 1000 && c.ok; ++iter) {
        const std::string ref = words(12), hyp = words(12);
        if (split(ref).empty()) continue;
        const auto w = eval::wer(ref, hyp);
        c.expect((size_t)w.counts.total() == oracle::edit_distance(split(ref), split(hyp)),
                 "wer counts diverge from brute force");
        const auto ce = eval::cer(ref, hyp);
        std::vector<char32_t> rc, hc;
        for (char32_t ch : utf8::decode(ref)) rc.push_back(ch);
        for (char32_t ch : utf8::decode(hyp)) hc.push_back(ch);
        c.expect((size_t)ce.counts.total() == oracle::edit_distance(rc, hc),
                 "cer counts diverge from brute force");
    }

    std::vector<eval::EvalRecord> records{
        {"1", "r", "a b c", "a x c"},
        {"2", "r", "d e", "d e"},
    };
    const auto report = eval::evaluate_manifest(records, {});
    c.expect(std::abs(report.corpus_wer - 0.2) < 1e-12, "golden manifest WER != 0.2");

    for (int iter = 0; iter < 500 && c.ok; ++iter) {
        const std::string a = words(6), b = words(6);
        const double ab = eval::normalized_levenshtein(a, b);
        c.expect(ab == eval::normalized_levenshtein(b, a), "nld not symmetric");
        c.expect(ab >= 0.0 && ab <= 1.0, "nld out of [0,1]");
    }
    return c;
}

// 11. Invalid query: "$" yields zero response packets; session keeps going.
Criterion criterion_invalid_query(const Fixture& fx) {
    Criterion c;

    std::vector<int16_t> bad = tone(5120, 310.0);
    bad.insert(bad.end(), 24000, 0);
    std::vector<int16_t> good = tone(5120, 440.0);
    good.insert(good.end(), 24000, 0);
    audio::write_pcm_wav(fx.file("bad.wav"), bad, 16000);
    audio::write_pcm_wav(fx.file("good.wav"), good, 16000);

    pipeline::ServerConfig scfg;
    scfg.listen_port = 0;
    scfg.codec.id = codec::CodecId::passthrough;
    scfg.vad_hangover_frames = 0;

    const auto bad_fp = backends::segment_fingerprint(predict_segments(bad, scfg)[0]);
    const auto good_fp = backends::segment_fingerprint(predict_segments(good, scfg)[0]);

    pipeline::ServerBackends be;
    be.asr = backends::scripted_asr({{bad_fp, "invalid"}, {good_fp, "valid"}});
    be.llm = backends::scripted_llm({{"valid", "fine|"}}, 8, 0);  // "invalid" -> "$"
    be.tts = backends::tone_tts(22050);
    pipeline::Server server(scfg, std::move(be));
    server.start();

    auto run = [&](const std::string& wav, uint32_t seed) {
        pipeline::ClientConfig ccfg;
        ccfg.source_wav = wav;
        ccfg.codec.id = codec::CodecId::passthrough;
        ccfg.drc_enabled = false;
        ccfg.denoiser = pipeline::DenoiserMode::off;
        ccfg.transport.remote = {"127.0.0.1", server.local_port()};
        ccfg.transport.seed = seed;
        ccfg.realtime = false;
        ccfg.response_wait_ms = 800;
        return pipeline::run_client(ccfg);
    };

    const auto bad_report = run(fx.file("bad.wav"), 21);
    c.expect(bad_report.packets_received == 0, "invalid query produced response packets");
    c.expect(server.stats().invalid_queries == 1, "invalid query not counted");
    c.expect(server.phase() == pipeline::SessionPhase::listening,
             "session not back to LISTENING");

    const auto good_report = run(fx.file("good.wav"), 22);
    c.expect(good_report.packets_received > 0, "follow-up valid query got no response");
    server.stop();
    c.expect(server.stats().responses == 1, "expected exactly one response");
    return c;
}

// 12. Sentence segmentation conserves characters over random chunkings.
Criterion criterion_sentence_conservation() {
    Criterion c;
    std::mt19937 rng(113);
    const std::vector<std::string> alphabet = {"a", "b", "c", "ক", "া", " ",
                                               "।", "?", "!", "|"};
    for (int iter = 0; iter < 1000 && c.ok; ++iter) {
        std::string text;
        const int len = 1 + (int)(rng() % 48);
        for (int i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
        if (text == "$") continue;

        backends::SentenceSegmenter splitter;
        std::string reassembled;
        size_t pos = 0;
        while (pos < text.size()) {
            const size_t n = 1 + rng() % 9;
            const auto piece = text.substr(pos, n);
            pos += piece.size();
            for (auto& s : splitter.push(piece)) {
                reassembled += s.text;
                if (s.sentinel_terminated) reassembled += "|";
            }
        }
        auto fin = splitter.finish();
        if (fin.residual) reassembled += fin.residual->text;
        c.expect(reassembled == text, "character conservation violated");
    }
    return c;
}

}  // namespace

int main() {
    Fixture fx;
    struct Entry {
        const char* name;
        Criterion result;
    };

    std::vector<Entry> entries;
    entries.push_back({"1 DSP oracle equivalence", criterion_dsp_oracle()});
    entries.push_back({"2 resample round-trip delay law", criterion_roundtrip_law()});
    entries.push_back({"3 DRC golden values", criterion_drc_golden()});
    entries.push_back({"4 RTP wire format", criterion_rtp_wire()});
    entries.push_back({"5 loopback fidelity", criterion_loopback_fidelity(fx)});
    entries.push_back({"6 client frame budget", criterion_frame_budget(fx)});
    entries.push_back({"7 opus VBR bitrate", criterion_bitrate(fx)});
    entries.push_back({"8 end-of-query timing", criterion_eoq_timing()});
    entries.push_back({"9 end-to-end delay with mocks", criterion_delay(fx)});
    entries.push_back({"10 eval oracle", criterion_eval_oracle()});
    entries.push_back({"11 invalid-query contract", criterion_invalid_query(fx)});
    entries.push_back({"12 sentence segmentation conservation",
                       criterion_sentence_conservation()});

    int failures = 0;
    for (const auto& e : entries) {
        const auto notes = e.result.notes.str();
        std::printf("%s: criterion %s%s%s\n", e.result.ok ? "PASS" : "FAIL", e.name,
                    notes.empty() ? "" : " — ", notes.c_str());
        if (!e.result.ok) ++failures;
    }
    return failures;
}
