#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "rtva/backends.hpp"
#include "rtva/codec.hpp"
#include "rtva/dsp.hpp"
#include "rtva/metrics.hpp"
#include "rtva/segmenter.hpp"
#include "rtva/transport.hpp"

namespace rtva::pipeline {

enum class EventKind {
    segment_start,
    end_of_query,
    transcript_ready,
    response_chunk,
    sentence_ready,
    response_audio_start,
    response_audio_end,
    delay_probe,
};

const char* event_kind_name(EventKind kind);

struct PipelineEvent {
    EventKind kind = EventKind::delay_probe;
    int64_t t_ms = 0;  // monotonic, relative to component start
    std::string detail;
};

// Serialized, thread-safe event spine. Optionally mirrors each event to
// stderr as "t_ms component kind detail".
class EventLog {
public:
    explicit EventLog(std::string component, bool log_lines = false);

    int64_t now_ms() const;
    void emit(EventKind kind, std::string detail = "");
    void emit_at(EventKind kind, int64_t t_ms, std::string detail = "");
    std::vector<PipelineEvent> snapshot() const;

private:
    std::string component_;
    bool log_lines_;
    std::chrono::steady_clock::time_point epoch_;
    mutable std::mutex mu_;
    std::vector<PipelineEvent> events_;
};

// Delay from the last voiced frame captured (delay_probe) to the first
// response packet received (response_audio_start), per query. A response
// with no preceding probe counts as a measurement error.
metrics::DelayReport measure_end_to_end_delay(const std::vector<PipelineEvent>& events);

enum class DenoiserMode { off, identity, gate };
DenoiserMode denoiser_from_name(const std::string& name);
std::string denoiser_name(DenoiserMode mode);

struct TransportConfig {
    net::Endpoint remote{"127.0.0.1", 5004};
    uint16_t local_port = 0;  // 0 picks an ephemeral port
    uint32_t seed = 1;        // initial sequence number / SSRC
    int jitter_depth = 3;
};

struct ClientConfig {
    std::string source_wav;
    std::string sink_wav;      // decoded response audio; empty discards
    std::string sent_tap_wav;  // processed outgoing PCM; empty disables

    bool drc_enabled = true;
    dsp::DrcConfig drc;
    DenoiserMode denoiser = DenoiserMode::identity;
    double gate_floor_dbfs = -45.0;
    codec::CodecConfig codec;
    TransportConfig transport;

    bool realtime = true;          // pace sends at one frame per 20 ms
    int response_wait_ms = 2000;   // linger for responses after the source ends
    double probe_threshold_dbfs = -40.0;  // outgoing voiced-frame delay probe
    bool log_events = false;

    void validate() const;
};

struct ClientReport {
    metrics::StageReport stages;
    std::vector<metrics::BitrateWindow> bitrate_windows;  // stream-time aligned
    double mean_upload_kbps = 0.0;
    size_t frames_sent = 0;
    size_t send_errors = 0;
    size_t packets_received = 0;
    size_t losses = 0;
    metrics::DelayReport delays;
    std::vector<PipelineEvent> events;

    std::string text() const;
    std::string machine_lines() const;
};

// Runs the full client pipeline over a wav source: DRC -> denoise -> encode
// -> packetize -> paced send, with a concurrent receive/decode/sink loop.
// Returns after the source is exhausted and the response side has gone idle.
ClientReport run_client(const ClientConfig& cfg);

enum class ServerMode { assist, echo };
ServerMode server_mode_from_name(const std::string& name);

struct ServerConfig {
    uint16_t listen_port = 5004;  // 0 picks an ephemeral port
    ServerMode mode = ServerMode::assist;
    codec::CodecConfig codec;
    int jitter_depth = 3;

    seg::EoqConfig eoq;
    double vad_threshold_dbfs = -40.0;
    int vad_hangover_frames = 4;

    std::string mock_script_path;   // scripted backends ([asr]/[llm] sections)
    std::string received_sink_wav;  // decoded incoming PCM, written on stop
    uint32_t seed = 2;
    bool log_events = false;

    void validate() const;
};

struct ServerBackends {
    std::unique_ptr<backends::AsrBackend> asr;
    std::unique_ptr<backends::LlmBackend> llm;
    std::unique_ptr<backends::TtsBackend> tts;
};

struct ServerStats {
    size_t packets_received = 0;
    size_t malformed = 0;
    size_t losses = 0;
    size_t queries = 0;
    size_t discarded_segments = 0;  // completed while a response was in flight
    size_t invalid_queries = 0;
    size_t responses = 0;
    size_t response_packets = 0;
};

enum class SessionPhase { listening, processing, responding };

// Session engine: receive -> jitter -> decode -> VAD/EOQ -> ASR -> LLM ->
// sentence segmentation -> TTS -> resample -> encode -> paced RTP send back
// to the packet source. One conversation at a time; segments that complete
// while a response is in flight are discarded.
class Server {
public:
    explicit Server(ServerConfig cfg);
    Server(ServerConfig cfg, ServerBackends backends);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    void start();  // binds the port and spawns the service threads
    void stop();

    uint16_t local_port() const;
    ServerStats stats() const;
    std::vector<PipelineEvent> events() const;
    SessionPhase phase() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace rtva::pipeline
