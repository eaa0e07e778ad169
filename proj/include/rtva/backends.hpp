#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rtva/segmenter.hpp"

namespace rtva::backends {

// Speech segment in, transcript out. Deterministic per segment.
class AsrBackend {
public:
    virtual ~AsrBackend() = default;
    virtual std::string transcribe(const seg::SpeechSegment& segment) = 0;
};

// Query in, ordered stream of text chunks out (chunk boundaries arbitrary).
// The concatenation of chunks is the full response; an invalid query yields
// exactly the sentinel "$".
class LlmBackend {
public:
    virtual ~LlmBackend() = default;
    virtual void generate(const std::string& query,
                          const std::function<void(std::string_view)>& on_chunk) = 0;
};

// Sentence in, PCM at the backend's fixed native rate out.
class TtsBackend {
public:
    virtual ~TtsBackend() = default;
    virtual int native_rate_hz() const = 0;
    virtual std::vector<int16_t> synthesize(const std::string& sentence) = 0;
};

struct Sentence {
    std::string text;
    bool sentinel_terminated = false;  // ended with "|", which is stripped
};

// Splits a chunked text stream on sentence delimiters (danda, ?, !, and the
// prompt sentinel "|"). A sentence is emitted as soon as its delimiter
// arrives, even mid-chunk; the "|" sentinel is stripped from the text, the
// other delimiters are kept. No text is lost or duplicated.
class SentenceSegmenter {
public:
    explicit SentenceSegmenter(std::vector<std::string> delimiters = default_delimiters());

    std::vector<Sentence> push(std::string_view chunk);

    struct FlushResult {
        std::optional<Sentence> residual;  // leftover text without a delimiter
        bool invalid_query = false;        // the whole stream was exactly "$"
    };
    FlushResult finish();

    static std::vector<std::string> default_delimiters();

private:
    std::vector<std::string> delimiters_;
    std::string buffer_;
    size_t total_bytes_ = 0;
    char first_byte_ = 0;
};

// (sample count, content hash) key used by the scripted ASR tables.
std::string segment_fingerprint(const seg::SpeechSegment& segment);

// Scripted backends configuration: plain-text key = value with [asr] and
// [llm] section headers, plus an optional [options] section for chunking.
struct MockScript {
    std::map<std::string, std::string> asr;  // fingerprint -> transcript
    std::map<std::string, std::string> llm;  // query -> response
    int llm_chunk_size = 8;
    int llm_chunk_delay_ms = 0;
    int tts_rate_hz = audio::kTtsNativeRateHz;

    static MockScript load(const std::string& path);
};

inline constexpr const char* kUnknownSegmentToken = "<unk>";
inline constexpr const char* kInvalidQuerySentinel = "$";

std::unique_ptr<AsrBackend> scripted_asr(std::map<std::string, std::string> table,
                                         std::string fallback = kUnknownSegmentToken);
std::unique_ptr<LlmBackend> scripted_llm(std::map<std::string, std::string> responses,
                                         int chunk_size, int chunk_delay_ms);
// Deterministic 440 Hz tone generator: 80 ms of audio per character at half
// of full scale. Stands in for a TTS model and exercises the resampling path.
std::unique_ptr<TtsBackend> tone_tts(int rate_hz = audio::kTtsNativeRateHz);

// HTTP adapters to external model services. Timeout with one retry. These
// are interface implementations only and take no part in the test pipeline.
struct HttpBackendConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    int timeout_ms = 5000;
};
std::unique_ptr<AsrBackend> http_asr(const HttpBackendConfig& cfg);
std::unique_ptr<LlmBackend> http_llm(const HttpBackendConfig& cfg);
std::unique_ptr<TtsBackend> http_tts(const HttpBackendConfig& cfg, int native_rate_hz);

}  // namespace rtva::backends
