#include "rtva/pipeline.hpp"

#include <chrono>
#include <condition_variable>
#include <deque>
#include <iostream>
#include <optional>
#include <sstream>

#include "rtva/audio.hpp"
#include "rtva/errors.hpp"
#include "rtva/rtp.hpp"

namespace rtva::pipeline {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

template <typename T>
class BlockingQueue {
public:
    void push(T item) {
        {
            std::lock_guard lock(mu_);
            items_.push_back(std::move(item));
        }
        cv_.notify_one();
    }

    // Blocks until an item arrives or the queue is closed and drained.
    std::optional<T> pop() {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return !items_.empty() || closed_; });
        if (items_.empty()) return std::nullopt;
        T item = std::move(items_.front());
        items_.pop_front();
        return item;
    }

    void close() {
        {
            std::lock_guard lock(mu_);
            closed_ = true;
        }
        cv_.notify_all();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    std::deque<T> items_;
    bool closed_ = false;
};

uint8_t payload_type_for(const codec::CodecConfig& cfg) {
    return cfg.id == codec::CodecId::opus ? rtp::kPayloadTypeOpus
                                          : rtp::kPayloadTypePassthrough;
}

// Response bursts at the client are delimited by arrival gaps; the marker
// bit is informational only.
constexpr int64_t kResponseBurstGapMs = 250;

}  // namespace

const char* event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::segment_start: return "segment_start";
        case EventKind::end_of_query: return "end_of_query";
        case EventKind::transcript_ready: return "transcript_ready";
        case EventKind::response_chunk: return "response_chunk";
        case EventKind::sentence_ready: return "sentence_ready";
        case EventKind::response_audio_start: return "response_audio_start";
        case EventKind::response_audio_end: return "response_audio_end";
        case EventKind::delay_probe: return "delay_probe";
    }
    return "unknown";
}

EventLog::EventLog(std::string component, bool log_lines)
    : component_(std::move(component)), log_lines_(log_lines), epoch_(Clock::now()) {}

int64_t EventLog::now_ms() const {
    return (int64_t)std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() -
                                                                          epoch_)
        .count();
}

void EventLog::emit(EventKind kind, std::string detail) {
    emit_at(kind, now_ms(), std::move(detail));
}

void EventLog::emit_at(EventKind kind, int64_t t_ms, std::string detail) {
    std::lock_guard lock(mu_);
    events_.push_back({kind, t_ms, std::move(detail)});
    if (log_lines_) {
        std::cerr << t_ms << " " << component_ << " " << event_kind_name(kind) << " "
                  << events_.back().detail << "\n";
    }
}

std::vector<PipelineEvent> EventLog::snapshot() const {
    std::lock_guard lock(mu_);
    return events_;
}

metrics::DelayReport measure_end_to_end_delay(const std::vector<PipelineEvent>& events) {
    metrics::DelayReport report;
    int64_t last_probe_ms = -1;
    for (const auto& ev : events) {
        if (ev.kind == EventKind::delay_probe) {
            last_probe_ms = ev.t_ms;
        } else if (ev.kind == EventKind::response_audio_start) {
            if (last_probe_ms < 0) {
                ++report.measurement_errors;  // no voiced frame on record
            } else {
                report.per_query_ms.push_back((double)(ev.t_ms - last_probe_ms));
                last_probe_ms = -1;  // consumed; next response needs a new probe
            }
        }
    }
    return report;
}

DenoiserMode denoiser_from_name(const std::string& name) {
    if (name == "off") return DenoiserMode::off;
    if (name == "identity") return DenoiserMode::identity;
    if (name == "gate") return DenoiserMode::gate;
    throw ParamError("unknown denoiser: " + name);
}

std::string denoiser_name(DenoiserMode mode) {
    switch (mode) {
        case DenoiserMode::off: return "off";
        case DenoiserMode::identity: return "identity";
        case DenoiserMode::gate: return "gate";
    }
    return "off";
}

ServerMode server_mode_from_name(const std::string& name) {
    if (name == "assist") return ServerMode::assist;
    if (name == "echo") return ServerMode::echo;
    throw ParamError("unknown server mode: " + name);
}

void ClientConfig::validate() const {
    if (source_wav.empty()) throw ParamError("client: source wav required");
    codec.validate();
    drc.validate();
    if (transport.jitter_depth < 1) throw ParamError("client: jitter depth must be >= 1");
    if (response_wait_ms < 0) throw ParamError("client: response wait must be >= 0");
}

void ServerConfig::validate() const {
    codec.validate();
    if (jitter_depth < 1) throw ParamError("server: jitter depth must be >= 1");
    if (eoq.silence_threshold_ms <= 0) throw ParamError("server: bad eoq threshold");
    if (vad_hangover_frames < 0) throw ParamError("server: bad vad hangover");
}

// ---------------------------------------------------------------------------
// client

ClientReport run_client(const ClientConfig& cfg) {
    cfg.validate();
    auto content = audio::read_pcm_wav(cfg.source_wav);
    if (content.sample_rate_hz != audio::kPipelineRateHz) {
        throw ParamError("client source must be 16 kHz, got " +
                         std::to_string(content.sample_rate_hz));
    }

    EventLog log("client", cfg.log_events);
    metrics::StageTimerRegistry stages;
    metrics::BitrateTracker bitrate;

    net::UdpSocket socket;
    socket.bind(cfg.transport.local_port);
    net::Packetizer packetizer(payload_type_for(cfg.codec), cfg.transport.seed);
    auto encoder = codec::make_encoder(cfg.codec);
    auto decoder = codec::make_decoder(cfg.codec);

    std::optional<dsp::FrameDenoiser> denoiser;
    if (cfg.denoiser == DenoiserMode::identity) {
        denoiser.emplace(dsp::identity_denoiser());
    } else if (cfg.denoiser == DenoiserMode::gate) {
        denoiser.emplace(dsp::gate_denoiser(cfg.gate_floor_dbfs));
    }

    std::atomic<bool> sending_done{false};
    std::atomic<int64_t> last_activity_ms{log.now_ms()};
    std::vector<int16_t> sink_pcm;
    size_t packets_received = 0, losses = 0, malformed = 0;

    std::thread receiver([&] {
        net::JitterBuffer jb(cfg.transport.jitter_depth);
        bool in_response = false;
        int64_t last_response_ms = -1;

        auto consume = [&](std::vector<net::JitterEvent> events) {
            for (auto& ev : events) {
                if (ev.kind == net::JitterEvent::Kind::packet) {
                    ++packets_received;
                    try {
                        codec::EncodedFrame enc{std::move(ev.packet.payload),
                                                cfg.codec.id};
                        const auto frame = decoder->decode(enc);
                        sink_pcm.insert(sink_pcm.end(), frame.samples.begin(),
                                        frame.samples.end());
                    } catch (const CodecError&) {
                        ++malformed;
                    }
                } else {
                    ++losses;
                    const auto frame = decoder->conceal();
                    sink_pcm.insert(sink_pcm.end(), frame.samples.begin(),
                                    frame.samples.end());
                }
            }
        };

        while (true) {
            auto dg = socket.receive(20);
            const int64_t now = log.now_ms();
            if (!dg) {
                if (in_response && now - last_response_ms > kResponseBurstGapMs) {
                    log.emit(EventKind::response_audio_end);
                    in_response = false;
                }
                if (sending_done && now - last_activity_ms.load() > cfg.response_wait_ms) {
                    break;
                }
                continue;
            }
            last_activity_ms = now;
            rtp::RtpPacket pkt;
            try {
                pkt = rtp::parse(dg->bytes);
            } catch (const ProtocolError&) {
                ++malformed;
                continue;
            }
            if (!in_response || now - last_response_ms > kResponseBurstGapMs) {
                if (in_response) log.emit(EventKind::response_audio_end);
                log.emit_at(EventKind::response_audio_start, now,
                            "seq=" + std::to_string(pkt.header.sequence_number));
                in_response = true;
            }
            last_response_ms = now;
            consume(jb.push(std::move(pkt)));
        }
        consume(jb.flush());
        if (in_response) log.emit(EventKind::response_audio_end);
    });

    std::vector<int16_t> tap_pcm;
    size_t frames_sent = 0, send_errors = 0;
    int64_t stream_ms = 0;
    bool first_packet = true;
    net::Pacer pacer(cfg.codec.frame_ms);

    for (const auto& source_frame : content.frames) {
        if (cfg.realtime) pacer.tick();

        // Probe on the captured frame: the delay baseline is the last voiced
        // frame as captured, before any processing.
        if (audio::rms_dbfs(source_frame.samples) > cfg.probe_threshold_dbfs) {
            log.emit(EventKind::delay_probe, "frame=" + std::to_string(frames_sent));
        }

        audio::AudioFrame work = source_frame;
        if (cfg.drc_enabled) {
            const auto t0 = Clock::now();
            work = dsp::drc_compress(work, cfg.drc);
            stages.record("drc", elapsed_ms_since(t0));
        }
        if (denoiser) {
            const auto t0 = Clock::now();
            work = denoiser->process(work);
            stages.record("denoise", elapsed_ms_since(t0));
        }
        if (!cfg.sent_tap_wav.empty()) {
            tap_pcm.insert(tap_pcm.end(), work.samples.begin(), work.samples.end());
        }

        const auto t0 = Clock::now();
        auto enc = encoder->encode(work);
        stages.record("encode", elapsed_ms_since(t0));

        const size_t payload_bytes = enc.payload.size();
        auto pkt = packetizer.packetize(std::move(enc.payload), first_packet);
        first_packet = false;
        try {
            socket.send_to(cfg.transport.remote, rtp::serialize(pkt));
        } catch (const IoError&) {
            ++send_errors;  // transport errors never break the cadence
        }
        bitrate.on_packet(stream_ms, payload_bytes);
        stream_ms += cfg.codec.frame_ms;
        ++frames_sent;
    }
    last_activity_ms = log.now_ms();
    sending_done = true;
    receiver.join();

    if (!cfg.sent_tap_wav.empty()) {
        audio::write_pcm_wav(cfg.sent_tap_wav, tap_pcm, audio::kPipelineRateHz);
    }
    if (!cfg.sink_wav.empty()) {
        audio::write_pcm_wav(cfg.sink_wav, sink_pcm, audio::kPipelineRateHz);
    }

    ClientReport report;
    report.stages = stages.report();
    report.bitrate_windows = bitrate.windows();
    report.mean_upload_kbps = bitrate.mean_kbps();
    report.frames_sent = frames_sent;
    report.send_errors = send_errors;
    report.packets_received = packets_received;
    report.losses = losses;
    report.events = log.snapshot();
    report.delays = measure_end_to_end_delay(report.events);
    return report;
}

std::string ClientReport::text() const {
    std::ostringstream os;
    os << stages.table() << "\n";
    os << "frames sent        " << frames_sent << "\n";
    os << "send errors        " << send_errors << "\n";
    os << "packets received   " << packets_received << "\n";
    os << "losses concealed   " << losses << "\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "mean upload kbps   %.2f\n", mean_upload_kbps);
    os << buf;
    if (!delays.per_query_ms.empty() || delays.measurement_errors > 0) {
        os << "\n" << delays.table();
    }
    return os.str();
}

std::string ClientReport::machine_lines() const {
    std::ostringstream os;
    os << stages.machine_lines();
    os << "bitrate_mean_kbps,upload," << mean_upload_kbps << "\n";
    os << "frames,sent," << frames_sent << "\n";
    os << "packets,received," << packets_received << "\n";
    os << "packets,lost," << losses << "\n";
    for (size_t i = 0; i < delays.per_query_ms.size(); ++i) {
        os << "delay_ms,query" << (i + 1) << "," << delays.per_query_ms[i] << "\n";
    }
    if (!delays.per_query_ms.empty()) {
        os << "delay_ms,average," << delays.average_ms() << "\n";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// server

struct Server::Impl {
    ServerConfig cfg;
    ServerBackends backends;
    EventLog log;
    net::UdpSocket socket;

    std::atomic<bool> running{false};
    std::thread receiver;
    std::thread session;
    std::thread responder;

    struct SessionInput {
        bool stream_reset = false;  // new SSRC: restart the segmentation timeline
        audio::AudioFrame frame;
    };
    BlockingQueue<SessionInput> frames;
    std::atomic<SessionPhase> phase{SessionPhase::listening};

    mutable std::mutex stats_mu;
    ServerStats stats;

    std::mutex reply_mu;
    net::Endpoint reply_to;
    bool have_reply = false;

    std::mutex pcm_mu;
    std::vector<int16_t> received_pcm;

    std::unique_ptr<codec::Encoder> encoder;  // responder thread only
    net::Packetizer out_packets;

    Impl(ServerConfig c, ServerBackends b)
        : cfg(std::move(c)),
          backends(std::move(b)),
          log("server", cfg.log_events),
          out_packets(payload_type_for(cfg.codec), cfg.seed) {
        cfg.validate();
        encoder = codec::make_encoder(cfg.codec);
    }

    net::Endpoint reply_endpoint() {
        std::lock_guard lock(reply_mu);
        return reply_to;
    }

    void bump(size_t ServerStats::* field, size_t n = 1) {
        std::lock_guard lock(stats_mu);
        stats.*field += n;
    }

    void append_received(const audio::AudioFrame& frame) {
        std::lock_guard lock(pcm_mu);
        received_pcm.insert(received_pcm.end(), frame.samples.begin(),
                            frame.samples.end());
    }

    void receive_loop() {
        net::JitterBuffer jb(cfg.jitter_depth);
        auto decoder = codec::make_decoder(cfg.codec);
        std::optional<uint32_t> ssrc;

        auto consume = [&](std::vector<net::JitterEvent> events) {
            for (auto& ev : events) {
                audio::AudioFrame frame;
                if (ev.kind == net::JitterEvent::Kind::packet) {
                    try {
                        frame = decoder->decode(
                            {std::move(ev.packet.payload), cfg.codec.id});
                    } catch (const CodecError&) {
                        bump(&ServerStats::malformed);
                        continue;
                    }
                } else {
                    bump(&ServerStats::losses);
                    frame = decoder->conceal();
                }
                append_received(frame);
                if (cfg.mode == ServerMode::echo) {
                    echo_frame(frame);
                } else {
                    frames.push({false, std::move(frame)});
                }
            }
        };

        while (running) {
            auto dg = socket.receive(20);
            if (!dg) continue;
            rtp::RtpPacket pkt;
            try {
                pkt = rtp::parse(dg->bytes);
            } catch (const ProtocolError&) {
                bump(&ServerStats::malformed);
                continue;
            }
            bump(&ServerStats::packets_received);
            {
                std::lock_guard lock(reply_mu);
                reply_to = dg->from;
                have_reply = true;
            }
            if (!ssrc || *ssrc != pkt.header.ssrc) {
                // New stream: drop the old reorder state, codec history and
                // segmentation timeline.
                consume(jb.flush());
                jb.reset();
                decoder = codec::make_decoder(cfg.codec);
                ssrc = pkt.header.ssrc;
                if (cfg.mode == ServerMode::assist) frames.push({true, {}});
            }
            consume(jb.push(std::move(pkt)));
        }
        consume(jb.flush());
    }

    void echo_frame(const audio::AudioFrame& frame) {
        auto enc = encoder->encode(frame);
        auto pkt = out_packets.packetize(std::move(enc.payload), false);
        try {
            socket.send_to(reply_endpoint(), rtp::serialize(pkt));
            bump(&ServerStats::response_packets);
        } catch (const IoError&) {
        }
    }

    seg::SegmenterSession make_segmenter() const {
        return seg::SegmenterSession(
            cfg.eoq, seg::energy_vad(cfg.vad_threshold_dbfs, cfg.vad_hangover_frames));
    }

    void session_loop() {
        auto segmenter = make_segmenter();
        bool segment_suppressed = false;

        while (auto input = frames.pop()) {
            if (input->stream_reset) {
                segmenter = make_segmenter();
                segment_suppressed = false;
                continue;
            }
            for (auto& ev : segmenter.push(input->frame)) {
                if (ev.kind == seg::SegmentEvent::Kind::segment_start) {
                    if (phase.load() == SessionPhase::listening) {
                        segment_suppressed = false;
                        log.emit(EventKind::segment_start,
                                 "t=" + std::to_string(ev.t_ms));
                    } else {
                        segment_suppressed = true;  // no barge-in
                    }
                    continue;
                }
                // end_of_query
                if (segment_suppressed || phase.load() != SessionPhase::listening) {
                    bump(&ServerStats::discarded_segments);
                    segment_suppressed = false;
                    continue;
                }
                log.emit(EventKind::end_of_query,
                         "samples=" + std::to_string(ev.segment.samples.size()));
                if (responder.joinable()) responder.join();
                phase = SessionPhase::processing;
                responder = std::thread([this, segment = std::move(ev.segment)] {
                    respond(segment);
                });
            }
        }
    }

    void respond(const seg::SpeechSegment& segment) {
        bump(&ServerStats::queries);
        const std::string transcript = backends.asr->transcribe(segment);
        log.emit(EventKind::transcript_ready, transcript);

        BlockingQueue<backends::Sentence> sentences;
        bool invalid = false;
        std::thread llm([&] {
            backends::SentenceSegmenter splitter;
            backends.llm->generate(transcript, [&](std::string_view chunk) {
                log.emit(EventKind::response_chunk, std::string(chunk));
                for (auto& s : splitter.push(chunk)) sentences.push(std::move(s));
            });
            auto fin = splitter.finish();
            if (fin.residual) sentences.push(std::move(*fin.residual));
            invalid = fin.invalid_query;
            sentences.close();
        });

        bool audio_started = false;
        bool first_packet = true;
        std::vector<int16_t> carry;  // response PCM not yet framed
        net::Pacer pacer(cfg.codec.frame_ms);

        auto send_full_frames = [&](bool flush_tail) {
            size_t pos = 0;
            while (carry.size() - pos >= (size_t)audio::kFrameSamples) {
                audio::AudioFrame f;
                f.samples.assign(carry.begin() + (ptrdiff_t)pos,
                                 carry.begin() + (ptrdiff_t)(pos + audio::kFrameSamples));
                pos += (size_t)audio::kFrameSamples;
                send_frame(f, first_packet, pacer);
                first_packet = false;
            }
            carry.erase(carry.begin(), carry.begin() + (ptrdiff_t)pos);
            if (flush_tail && !carry.empty()) {
                audio::AudioFrame f;
                f.samples = std::move(carry);
                f.samples.resize((size_t)audio::kFrameSamples, 0);  // pad the tail
                carry.clear();
                send_frame(f, first_packet, pacer);
                first_packet = false;
            }
        };

        while (auto sentence = sentences.pop()) {
            log.emit(EventKind::sentence_ready, sentence->text);
            if (sentence->text.empty()) continue;
            std::vector<int16_t> pcm = backends.tts->synthesize(sentence->text);
            if (backends.tts->native_rate_hz() == audio::kTtsNativeRateHz) {
                pcm = dsp::resample_22050_to_16000(pcm);
            }
            if (pcm.empty()) continue;
            if (!audio_started) {
                audio_started = true;
                phase = SessionPhase::responding;
                log.emit(EventKind::response_audio_start);
            }
            carry.insert(carry.end(), pcm.begin(), pcm.end());
            send_full_frames(false);
        }
        llm.join();

        if (audio_started) {
            send_full_frames(true);
            log.emit(EventKind::response_audio_end);
            bump(&ServerStats::responses);
        } else if (invalid) {
            bump(&ServerStats::invalid_queries);
        }
        phase = SessionPhase::listening;
    }

    void send_frame(audio::AudioFrame& frame, bool marker, net::Pacer& pacer) {
        frame.sample_rate_hz = audio::kPipelineRateHz;
        auto enc = encoder->encode(frame);
        auto pkt = out_packets.packetize(std::move(enc.payload), marker);
        pacer.tick();
        try {
            socket.send_to(reply_endpoint(), rtp::serialize(pkt));
            bump(&ServerStats::response_packets);
        } catch (const IoError&) {
        }
    }
};

Server::Server(ServerConfig cfg) : Server(std::move(cfg), ServerBackends{}) {}

Server::Server(ServerConfig cfg, ServerBackends backends) {
    if (!backends.asr || !backends.llm || !backends.tts) {
        // Build scripted backends from the mock script (or empty defaults).
        backends::MockScript script;
        if (!cfg.mock_script_path.empty()) {
            script = backends::MockScript::load(cfg.mock_script_path);
        }
        if (!backends.asr) backends.asr = backends::scripted_asr(script.asr);
        if (!backends.llm) {
            backends.llm = backends::scripted_llm(script.llm, script.llm_chunk_size,
                                                  script.llm_chunk_delay_ms);
        }
        if (!backends.tts) backends.tts = backends::tone_tts(script.tts_rate_hz);
    }
    impl_ = std::make_unique<Impl>(std::move(cfg), std::move(backends));
}

Server::~Server() { stop(); }

void Server::start() {
    impl_->socket.bind(impl_->cfg.listen_port);
    impl_->running = true;
    impl_->receiver = std::thread([this] { impl_->receive_loop(); });
    if (impl_->cfg.mode == ServerMode::assist) {
        impl_->session = std::thread([this] { impl_->session_loop(); });
    }
}

void Server::stop() {
    if (!impl_->running.exchange(false)) return;
    if (impl_->receiver.joinable()) impl_->receiver.join();
    impl_->frames.close();
    if (impl_->session.joinable()) impl_->session.join();
    if (impl_->responder.joinable()) impl_->responder.join();
    if (!impl_->cfg.received_sink_wav.empty()) {
        std::lock_guard lock(impl_->pcm_mu);
        audio::write_pcm_wav(impl_->cfg.received_sink_wav, impl_->received_pcm,
                             audio::kPipelineRateHz);
    }
}

uint16_t Server::local_port() const { return impl_->socket.local_port(); }

ServerStats Server::stats() const {
    std::lock_guard lock(impl_->stats_mu);
    return impl_->stats;
}

std::vector<PipelineEvent> Server::events() const { return impl_->log.snapshot(); }

SessionPhase Server::phase() const { return impl_->phase.load(); }

}  // namespace rtva::pipeline
