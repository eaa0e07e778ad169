#include <atomic>
#include <chrono>
#include <csignal>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "cli_util.hpp"
#include "rtva/pipeline.hpp"

using namespace rtva;

namespace {

std::atomic<bool> g_stop{false};
void handle_signal(int) { g_stop = true; }

// Prints the fingerprint of every segment a fixture wav would produce, for
// authoring [asr] tables in mock scripts.
int print_fingerprints(const std::string& wav, const pipeline::ServerConfig& cfg) {
    const auto content = audio::read_pcm_wav(wav);
    if (content.sample_rate_hz != audio::kPipelineRateHz) {
        std::cerr << "server: fingerprint input must be 16 kHz\n";
        return cli::kExitUsage;
    }
    seg::SegmenterSession session(
        cfg.eoq, seg::energy_vad(cfg.vad_threshold_dbfs, cfg.vad_hangover_frames));
    size_t n = 0;
    for (const auto& frame : content.frames) {
        for (auto& ev : session.push(frame)) {
            if (ev.kind == seg::SegmentEvent::Kind::end_of_query) {
                std::cout << backends::segment_fingerprint(ev.segment) << "  # segment "
                          << ++n << ", " << ev.segment.start_time_ms << ".."
                          << ev.segment.end_time_ms << " ms\n";
            }
        }
    }
    if (n == 0) std::cerr << "server: no complete segments in " << wav << "\n";
    return cli::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    cfg::KeyValues file_kv;
    try {
        const std::string config_path = cli::find_config_arg(argc, argv);
        if (!config_path.empty()) {
            file_kv = cfg::strip_prefix(cfg::load_key_values(config_path), "server");
        }
    } catch (const Error& e) {
        std::cerr << "server: " << e.what() << "\n";
        return cli::kExitUsage;
    }

    CLI::App app{"Speech-assistant session server: RTP receive -> decode -> "
                 "VAD/end-of-query -> ASR -> LLM -> TTS -> paced RTP replies"};

    std::string config_path;
    app.add_option("--config", config_path, "key = value config file");

    auto str_or = [&](const char* key, const char* dflt) {
        return cfg::get_string(file_kv, key).value_or(dflt);
    };

    pipeline::ServerConfig cfg;
    std::string mode = str_or("mode", "assist");
    std::string codec_name = str_or("codec", "opus");
    std::string codec_mode = str_or("codec.mode", "vbr");
    std::string backends_arg = str_or("backends", "mock:");
    std::string received_sink = str_or("received-sink", "");
    std::string fingerprint_wav;
    int listen_port = cfg::get_int(file_kv, "listen-port").value_or(5004);
    int bitrate = cfg::get_int(file_kv, "codec.bitrate").value_or(cfg.codec.target_bitrate_bps);
    int jitter_depth = cfg::get_int(file_kv, "jitter.depth").value_or(cfg.jitter_depth);
    int eoq_silence = cfg::get_int(file_kv, "eoq.silence-ms").value_or(cfg.eoq.silence_threshold_ms);
    int eoq_max_segment = cfg::get_int(file_kv, "eoq.max-segment-ms").value_or(cfg.eoq.max_segment_ms);
    double vad_threshold = cfg::get_double(file_kv, "vad.threshold-dbfs").value_or(cfg.vad_threshold_dbfs);
    int vad_hangover = cfg::get_int(file_kv, "vad.hangover").value_or(cfg.vad_hangover_frames);
    int seed = cfg::get_int(file_kv, "seed").value_or((int)cfg.seed);
    int duration_s = cfg::get_int(file_kv, "duration-s").value_or(0);
    bool verbose = false;

    app.add_option("--listen-port", listen_port, "UDP port to receive RTP on");
    app.add_option("--mode", mode, "assist or echo");
    app.add_option("--codec", codec_name, "passthrough or opus");
    app.add_option("--codec.bitrate", bitrate, "response bitrate in bps");
    app.add_option("--codec.mode", codec_mode, "vbr or cbr");
    app.add_option("--jitter.depth", jitter_depth, "reorder depth in frames");
    app.add_option("--eoq.silence-ms", eoq_silence, "end-of-query silence threshold");
    app.add_option("--eoq.max-segment-ms", eoq_max_segment, "segment length cap");
    app.add_option("--vad.threshold-dbfs", vad_threshold, "energy VAD threshold");
    app.add_option("--vad.hangover", vad_hangover, "VAD hangover frames");
    app.add_option("--backends", backends_arg,
                   "mock:<script path> (scripted) or http:<host>:<port>");
    app.add_option("--received-sink", received_sink, "wav path for decoded input PCM");
    app.add_option("--seed", seed, "RTP sequence/SSRC seed for responses");
    app.add_option("--duration-s", duration_s, "run time in seconds (0 = until SIGINT)");
    app.add_option("--fingerprint", fingerprint_wav,
                   "print segment fingerprints for a fixture wav, then exit");
    app.add_flag("-v,--verbose", verbose, "log pipeline events to stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp") {
            std::cout << app.help();
            return cli::kExitOk;
        }
        std::cerr << "server: " << e.what() << "\n";
        return cli::kExitUsage;
    }

    pipeline::ServerBackends injected;
    try {
        cfg.listen_port = (uint16_t)listen_port;
        cfg.mode = pipeline::server_mode_from_name(mode);
        cfg.codec.id = codec::codec_from_name(codec_name);
        cfg.codec.target_bitrate_bps = bitrate;
        if (codec_mode == "vbr") {
            cfg.codec.mode = codec::BitrateMode::vbr;
        } else if (codec_mode == "cbr") {
            cfg.codec.mode = codec::BitrateMode::cbr;
        } else {
            throw ParamError("codec.mode must be vbr or cbr, got " + codec_mode);
        }
        cfg.jitter_depth = jitter_depth;
        cfg.eoq.silence_threshold_ms = eoq_silence;
        cfg.eoq.max_segment_ms = eoq_max_segment;
        cfg.vad_threshold_dbfs = vad_threshold;
        cfg.vad_hangover_frames = vad_hangover;
        cfg.received_sink_wav = received_sink;
        cfg.seed = (uint32_t)seed;
        cfg.log_events = verbose;

        if (backends_arg.rfind("mock:", 0) == 0) {
            cfg.mock_script_path = backends_arg.substr(5);
        } else if (backends_arg.rfind("http:", 0) == 0) {
            const auto ep = net::Endpoint::parse(backends_arg.substr(5));
            backends::HttpBackendConfig hc{ep.host, ep.port, 5000};
            injected.asr = backends::http_asr(hc);
            injected.llm = backends::http_llm(hc);
            injected.tts = backends::http_tts(hc, audio::kTtsNativeRateHz);
        } else {
            throw ParamError("backends must be mock:<path> or http:<host>:<port>");
        }
        cfg.validate();

        if (!fingerprint_wav.empty()) return print_fingerprints(fingerprint_wav, cfg);

        cfg::KeyValues effective{
            {"listen-port", std::to_string(listen_port)},
            {"mode", mode},
            {"codec", codec_name},
            {"codec.bitrate", std::to_string(bitrate)},
            {"codec.mode", codec_mode},
            {"jitter.depth", std::to_string(jitter_depth)},
            {"eoq.silence-ms", std::to_string(eoq_silence)},
            {"eoq.max-segment-ms", std::to_string(eoq_max_segment)},
            {"vad.threshold-dbfs", std::to_string(vad_threshold)},
            {"vad.hangover", std::to_string(vad_hangover)},
            {"backends", backends_arg},
            {"received-sink", received_sink},
            {"seed", std::to_string(seed)},
            {"duration-s", std::to_string(duration_s)},
        };
        cli::echo_config("server", effective);
    } catch (const Error& e) {
        std::cerr << "server: " << e.what() << "\n";
        return cli::kExitUsage;
    }

    try {
        pipeline::Server server(std::move(cfg), std::move(injected));
        server.start();
        std::cerr << "server: listening on UDP port " << server.local_port() << "\n";

        std::signal(SIGINT, handle_signal);
        std::signal(SIGTERM, handle_signal);
        const auto deadline = std::chrono::steady_clock::now() +
                              std::chrono::seconds(duration_s > 0 ? duration_s : 1 << 30);
        while (!g_stop && std::chrono::steady_clock::now() < deadline) {
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        }
        server.stop();

        const auto stats = server.stats();
        std::cout << "packets_received," << stats.packets_received << "\n"
                  << "queries," << stats.queries << "\n"
                  << "responses," << stats.responses << "\n"
                  << "invalid_queries," << stats.invalid_queries << "\n"
                  << "response_packets," << stats.response_packets << "\n"
                  << "losses," << stats.losses << "\n"
                  << "malformed," << stats.malformed << "\n"
                  << "discarded_segments," << stats.discarded_segments << "\n";
        return cli::kExitOk;
    } catch (const IoError& e) {
        std::cerr << "server: " << e.what() << "\n";
        return cli::kExitTransport;
    } catch (const Error& e) {
        std::cerr << "server: " << e.what() << "\n";
        return cli::kExitUsage;
    }
}
