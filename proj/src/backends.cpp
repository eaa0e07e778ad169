#include "rtva/backends.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <thread>

#include "rtva/errors.hpp"
#include "rtva/utf8.hpp"

namespace rtva::backends {

namespace {

uint64_t fnv1a64(const std::vector<int16_t>& samples) {
    uint64_t h = 1469598103934665603ull;
    for (int16_t s : samples) {
        const auto u = (uint16_t)s;
        h = (h ^ (u & 0xff)) * 1099511628211ull;
        h = (h ^ (u >> 8)) * 1099511628211ull;
    }
    return h;
}

std::string trim(std::string_view s) {
    size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return std::string(s.substr(a, b - a));
}

class ScriptedAsr final : public AsrBackend {
public:
    ScriptedAsr(std::map<std::string, std::string> table, std::string fallback)
        : table_(std::move(table)), fallback_(std::move(fallback)) {}

    std::string transcribe(const seg::SpeechSegment& segment) override {
        if (segment.samples.empty()) return "";
        const auto it = table_.find(segment_fingerprint(segment));
        return it == table_.end() ? fallback_ : it->second;
    }

private:
    std::map<std::string, std::string> table_;
    std::string fallback_;
};

class ScriptedLlm final : public LlmBackend {
public:
    ScriptedLlm(std::map<std::string, std::string> responses, int chunk_size,
                int chunk_delay_ms)
        : responses_(std::move(responses)),
          chunk_size_(chunk_size < 1 ? 1 : chunk_size),
          chunk_delay_ms_(chunk_delay_ms) {}

    void generate(const std::string& query,
                  const std::function<void(std::string_view)>& on_chunk) override {
        const auto it = responses_.find(query);
        if (it == responses_.end()) {
            on_chunk(kInvalidQuerySentinel);
            return;
        }
        bool first = true;
        for (const auto& piece : utf8::chunk(it->second, (size_t)chunk_size_)) {
            if (!first && chunk_delay_ms_ > 0) {
                std::this_thread::sleep_for(std::chrono::milliseconds(chunk_delay_ms_));
            }
            first = false;
            on_chunk(piece);
        }
    }

private:
    std::map<std::string, std::string> responses_;
    int chunk_size_;
    int chunk_delay_ms_;
};

class ToneTts final : public TtsBackend {
public:
    explicit ToneTts(int rate_hz) : rate_hz_(rate_hz) {}

    int native_rate_hz() const override { return rate_hz_; }

    std::vector<int16_t> synthesize(const std::string& sentence) override {
        const size_t chars = utf8::length(sentence);
        const size_t n = chars * (size_t)(rate_hz_ * 8 / 100);  // 80 ms per character
        std::vector<int16_t> out(n);
        for (size_t i = 0; i < n; ++i) {
            out[i] = (int16_t)std::lround(
                0.5 * 32767.0 * std::sin(2.0 * M_PI * 440.0 * (double)i / rate_hz_));
        }
        return out;
    }

private:
    int rate_hz_;
};

}  // namespace

std::vector<std::string> SentenceSegmenter::default_delimiters() {
    return {"।", "?", "!", "|"};  // danda, question, exclamation, sentinel
}

SentenceSegmenter::SentenceSegmenter(std::vector<std::string> delimiters)
    : delimiters_(std::move(delimiters)) {
    for (const auto& d : delimiters_) {
        if (d.empty()) throw ParamError("sentence segmenter: empty delimiter");
    }
}

std::vector<Sentence> SentenceSegmenter::push(std::string_view chunk) {
    if (total_bytes_ == 0 && !chunk.empty()) first_byte_ = chunk[0];
    total_bytes_ += chunk.size();
    buffer_.append(chunk);

    std::vector<Sentence> out;
    size_t pos = 0;
    for (size_t i = pos; i < buffer_.size(); ++i) {
        for (const auto& d : delimiters_) {
            if (buffer_.compare(i, d.size(), d) == 0) {
                Sentence s;
                s.sentinel_terminated = (d == "|");
                const size_t text_end = s.sentinel_terminated ? i : i + d.size();
                s.text = buffer_.substr(pos, text_end - pos);
                out.push_back(std::move(s));
                pos = i + d.size();
                i = pos - 1;  // resume after the delimiter
                break;
            }
        }
    }
    buffer_.erase(0, pos);
    return out;
}

SentenceSegmenter::FlushResult SentenceSegmenter::finish() {
    FlushResult r;
    r.invalid_query = (total_bytes_ == 1 && first_byte_ == '$');
    if (!r.invalid_query && !buffer_.empty()) {
        r.residual = Sentence{buffer_, false};
    }
    buffer_.clear();
    total_bytes_ = 0;
    first_byte_ = 0;
    return r;
}

std::string segment_fingerprint(const seg::SpeechSegment& segment) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  (unsigned long long)fnv1a64(segment.samples));
    return std::to_string(segment.samples.size()) + ":" + buf;
}

MockScript MockScript::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open mock script: " + path);

    MockScript script;
    std::string line, section;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[' && t.back() == ']') {
            section = t.substr(1, t.size() - 2);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw FormatError("mock script line " + std::to_string(lineno) +
                              ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (section == "asr") {
            script.asr[key] = value;
        } else if (section == "llm") {
            script.llm[key] = value;
        } else if (section == "options") {
            if (key == "llm.chunk_size") script.llm_chunk_size = std::stoi(value);
            else if (key == "llm.chunk_delay_ms") script.llm_chunk_delay_ms = std::stoi(value);
            else if (key == "tts.rate_hz") script.tts_rate_hz = std::stoi(value);
            else throw FormatError("mock script: unknown option " + key);
        } else {
            throw FormatError("mock script line " + std::to_string(lineno) +
                              ": key outside a section");
        }
    }
    return script;
}

std::unique_ptr<AsrBackend> scripted_asr(std::map<std::string, std::string> table,
                                         std::string fallback) {
    return std::make_unique<ScriptedAsr>(std::move(table), std::move(fallback));
}

std::unique_ptr<LlmBackend> scripted_llm(std::map<std::string, std::string> responses,
                                         int chunk_size, int chunk_delay_ms) {
    return std::make_unique<ScriptedLlm>(std::move(responses), chunk_size, chunk_delay_ms);
}

std::unique_ptr<TtsBackend> tone_tts(int rate_hz) {
    if (rate_hz != 22050 && rate_hz != 16000) {
        throw ParamError("tone tts: rate must be 22050 or 16000");
    }
    return std::make_unique<ToneTts>(rate_hz);
}

}  // namespace rtva::backends
