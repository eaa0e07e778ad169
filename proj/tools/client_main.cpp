#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cli_util.hpp"
#include "rtva/pipeline.hpp"

using namespace rtva;

int main(int argc, char** argv) {
    cfg::KeyValues file_kv;
    try {
        const std::string config_path = cli::find_config_arg(argc, argv);
        if (!config_path.empty()) {
            file_kv = cfg::strip_prefix(cfg::load_key_values(config_path), "client");
        }
    } catch (const Error& e) {
        std::cerr << "client: " << e.what() << "\n";
        return cli::kExitUsage;
    }

    CLI::App app{"Frame-paced speech-assistant client: wav source -> DRC -> "
                 "denoise -> encode -> RTP, with a receive/decode sink loop"};

    std::string config_path;
    app.add_option("--config", config_path, "key = value config file");

    auto str_or = [&](const char* key, const char* dflt) {
        return cfg::get_string(file_kv, key).value_or(dflt);
    };

    std::string source = str_or("source", "");
    std::string sink = str_or("sink", "");
    std::string sent_tap = str_or("sent-tap", "");
    std::string server = str_or("server", "127.0.0.1:5004");
    std::string codec_name = str_or("codec", "opus");
    std::string codec_mode = str_or("codec.mode", "vbr");
    std::string denoiser = str_or("denoiser", "identity");
    std::string bitrate_csv = str_or("bitrate-csv", "");

    pipeline::ClientConfig cfg;
    int local_port = cfg::get_int(file_kv, "local-port").value_or(0);
    int bitrate = cfg::get_int(file_kv, "codec.bitrate").value_or(cfg.codec.target_bitrate_bps);
    bool drc_enable = cfg::get_bool(file_kv, "drc.enable").value_or(true);
    double drc_threshold = cfg::get_double(file_kv, "drc.threshold").value_or(cfg.drc.threshold_dbfs);
    double drc_ratio = cfg::get_double(file_kv, "drc.ratio").value_or(cfg.drc.ratio);
    double gate_floor = cfg::get_double(file_kv, "denoiser.gate-floor").value_or(cfg.gate_floor_dbfs);
    int jitter_depth = cfg::get_int(file_kv, "jitter.depth").value_or(cfg.transport.jitter_depth);
    int seed = cfg::get_int(file_kv, "seed").value_or((int)cfg.transport.seed);
    bool realtime = cfg::get_bool(file_kv, "realtime").value_or(true);
    int response_wait = cfg::get_int(file_kv, "response-wait-ms").value_or(cfg.response_wait_ms);
    double probe_threshold = cfg::get_double(file_kv, "probe-threshold-dbfs").value_or(cfg.probe_threshold_dbfs);
    bool machine = false;
    bool verbose = false;

    app.add_option("--source", source, "mono 16 kHz wav to stream");
    app.add_option("--sink", sink, "wav path for decoded response audio");
    app.add_option("--sent-tap", sent_tap, "wav path for the processed outgoing PCM");
    app.add_option("--server", server, "server address ip:port");
    app.add_option("--local-port", local_port, "local UDP port (0 = ephemeral)");
    app.add_option("--codec", codec_name, "passthrough or opus");
    app.add_option("--codec.bitrate", bitrate, "target bitrate in bps");
    app.add_option("--codec.mode", codec_mode, "vbr or cbr");
    app.add_option("--drc.enable", drc_enable, "apply dynamic range compression");
    app.add_option("--drc.threshold", drc_threshold, "DRC threshold in dBFS");
    app.add_option("--drc.ratio", drc_ratio, "DRC compression ratio");
    app.add_option("--denoiser", denoiser, "off, identity or gate");
    app.add_option("--denoiser.gate-floor", gate_floor, "gate floor in dBFS");
    app.add_option("--jitter.depth", jitter_depth, "receive reorder depth in frames");
    app.add_option("--seed", seed, "RTP sequence/SSRC seed");
    app.add_option("--realtime", realtime, "pace sends at one frame per 20 ms");
    app.add_option("--response-wait-ms", response_wait, "idle wait for responses");
    app.add_option("--probe-threshold-dbfs", probe_threshold, "voiced-frame probe level");
    app.add_option("--bitrate-csv", bitrate_csv, "write per-second upload kbps CSV");
    app.add_flag("--machine", machine, "print machine-readable report lines");
    app.add_flag("-v,--verbose", verbose, "log pipeline events to stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp") {
            std::cout << app.help();
            return cli::kExitOk;
        }
        std::cerr << "client: " << e.what() << "\n";
        return cli::kExitUsage;
    }

    try {
        cfg.source_wav = source;
        cfg.sink_wav = sink;
        cfg.sent_tap_wav = sent_tap;
        cfg.codec.id = codec::codec_from_name(codec_name);
        cfg.codec.target_bitrate_bps = bitrate;
        if (codec_mode == "vbr") {
            cfg.codec.mode = codec::BitrateMode::vbr;
        } else if (codec_mode == "cbr") {
            cfg.codec.mode = codec::BitrateMode::cbr;
        } else {
            throw ParamError("codec.mode must be vbr or cbr, got " + codec_mode);
        }
        cfg.drc_enabled = drc_enable;
        cfg.drc.threshold_dbfs = drc_threshold;
        cfg.drc.ratio = drc_ratio;
        cfg.denoiser = pipeline::denoiser_from_name(denoiser);
        cfg.gate_floor_dbfs = gate_floor;
        cfg.transport.remote = net::Endpoint::parse(server);
        cfg.transport.local_port = (uint16_t)local_port;
        cfg.transport.jitter_depth = jitter_depth;
        cfg.transport.seed = (uint32_t)seed;
        cfg.realtime = realtime;
        cfg.response_wait_ms = response_wait;
        cfg.probe_threshold_dbfs = probe_threshold;
        cfg.log_events = verbose;
        cfg.validate();
        if (!std::ifstream(cfg.source_wav)) {
            throw ParamError("source wav not readable: " + cfg.source_wav);
        }

        cfg::KeyValues effective{
            {"source", cfg.source_wav},
            {"sink", cfg.sink_wav},
            {"sent-tap", cfg.sent_tap_wav},
            {"server", cfg.transport.remote.to_string()},
            {"local-port", std::to_string(local_port)},
            {"codec", codec::codec_name(cfg.codec.id)},
            {"codec.bitrate", std::to_string(bitrate)},
            {"codec.mode", codec_mode},
            {"drc.enable", drc_enable ? "true" : "false"},
            {"drc.threshold", std::to_string(drc_threshold)},
            {"drc.ratio", std::to_string(drc_ratio)},
            {"denoiser", pipeline::denoiser_name(cfg.denoiser)},
            {"denoiser.gate-floor", std::to_string(gate_floor)},
            {"jitter.depth", std::to_string(jitter_depth)},
            {"seed", std::to_string(seed)},
            {"realtime", realtime ? "true" : "false"},
            {"response-wait-ms", std::to_string(response_wait)},
            {"probe-threshold-dbfs", std::to_string(probe_threshold)},
        };
        cli::echo_config("client", effective);
    } catch (const Error& e) {
        std::cerr << "client: " << e.what() << "\n";
        return cli::kExitUsage;
    }

    try {
        const auto report = pipeline::run_client(cfg);
        if (machine) {
            std::cout << report.machine_lines();
        } else {
            std::cout << report.text();
        }
        if (!bitrate_csv.empty()) {
            std::ofstream out(bitrate_csv);
            out << "window,kbps\n";
            for (const auto& w : report.bitrate_windows) {
                out << w.index << "," << w.kbps() << "\n";
            }
        }
        return cli::kExitOk;
    } catch (const IoError& e) {
        std::cerr << "client: " << e.what() << "\n";
        return cli::kExitTransport;
    } catch (const Error& e) {
        std::cerr << "client: " << e.what() << "\n";
        return cli::kExitUsage;
    }
}
