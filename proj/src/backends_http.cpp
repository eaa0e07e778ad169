// HTTP adapters for external ASR/LLM/TTS services. One retry on transport
// failure, fixed timeouts, no streaming request bodies. Excluded from the
// mock-driven test pipeline.

#include "httplib.h"
#include "rtva/backends.hpp"
#include "rtva/errors.hpp"

namespace rtva::backends {

namespace {

httplib::Client make_client(const HttpBackendConfig& cfg) {
    httplib::Client client(cfg.host, cfg.port);
    client.set_connection_timeout(0, cfg.timeout_ms * 1000);
    client.set_read_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
    client.set_write_timeout(cfg.timeout_ms / 1000, (cfg.timeout_ms % 1000) * 1000);
    return client;
}

std::string pcm_bytes(const std::vector<int16_t>& samples) {
    std::string body(samples.size() * 2, '\0');
    for (size_t i = 0; i < samples.size(); ++i) {
        const auto u = (uint16_t)samples[i];
        body[2 * i] = (char)(u & 0xff);
        body[2 * i + 1] = (char)(u >> 8);
    }
    return body;
}

class HttpAsr final : public AsrBackend {
public:
    explicit HttpAsr(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {}

    std::string transcribe(const seg::SpeechSegment& segment) override {
        if (segment.samples.empty()) return "";
        const std::string body = pcm_bytes(segment.samples);
        for (int attempt = 0; attempt < 2; ++attempt) {
            auto client = make_client(cfg_);
            auto res = client.Post("/transcribe", body, "application/octet-stream");
            if (res && res->status == 200) return res->body;
        }
        throw IoError("asr service unreachable: " + cfg_.host);
    }

private:
    HttpBackendConfig cfg_;
};

class HttpLlm final : public LlmBackend {
public:
    explicit HttpLlm(HttpBackendConfig cfg) : cfg_(std::move(cfg)) {}

    void generate(const std::string& query,
                  const std::function<void(std::string_view)>& on_chunk) override {
        for (int attempt = 0; attempt < 2; ++attempt) {
            auto client = make_client(cfg_);
            bool any = false;
            httplib::Request req;
            req.method = "POST";
            req.path = "/generate";
            req.body = query;
            req.set_header("Content-Type", "text/plain");
            // Forward body chunks as they arrive so streamed responses keep
            // their incremental delivery.
            req.content_receiver = [&](const char* data, size_t len, uint64_t, uint64_t) {
                any = true;
                on_chunk(std::string_view(data, len));
                return true;
            };
            auto res = client.send(req);
            if (res && res->status == 200) return;
            if (any) throw IoError("llm stream aborted mid response");
        }
        throw IoError("llm service unreachable: " + cfg_.host);
    }

private:
    HttpBackendConfig cfg_;
};

class HttpTts final : public TtsBackend {
public:
    HttpTts(HttpBackendConfig cfg, int rate_hz) : cfg_(std::move(cfg)), rate_hz_(rate_hz) {}

    int native_rate_hz() const override { return rate_hz_; }

    std::vector<int16_t> synthesize(const std::string& sentence) override {
        for (int attempt = 0; attempt < 2; ++attempt) {
            auto client = make_client(cfg_);
            auto res = client.Post("/synthesize", sentence, "text/plain");
            if (res && res->status == 200) {
                const std::string& body = res->body;
                std::vector<int16_t> out(body.size() / 2);
                for (size_t i = 0; i < out.size(); ++i) {
                    out[i] = (int16_t)((uint8_t)body[2 * i] |
                                       ((uint8_t)body[2 * i + 1] << 8));
                }
                return out;
            }
        }
        throw IoError("tts service unreachable: " + cfg_.host);
    }

private:
    HttpBackendConfig cfg_;
    int rate_hz_;
};

}  // namespace

std::unique_ptr<AsrBackend> http_asr(const HttpBackendConfig& cfg) {
    return std::make_unique<HttpAsr>(cfg);
}

std::unique_ptr<LlmBackend> http_llm(const HttpBackendConfig& cfg) {
    return std::make_unique<HttpLlm>(cfg);
}

std::unique_ptr<TtsBackend> http_tts(const HttpBackendConfig& cfg, int native_rate_hz) {
    return std::make_unique<HttpTts>(cfg, native_rate_hz);
}

}  // namespace rtva::backends
