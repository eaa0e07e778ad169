#include "doctest.h"

#include <chrono>
#include <fstream>
#include <random>

#include "rtva/backends.hpp"
#include "rtva/errors.hpp"
#include "rtva/utf8.hpp"

using namespace rtva;
using backends::Sentence;
using backends::SentenceSegmenter;

namespace {

// Reassembles the original stream from emitted sentences, re-adding the
// stripped "|" sentinels.
std::string reassemble(const std::vector<Sentence>& sentences,
                       const std::optional<Sentence>& residual) {
    std::string out;
    for (const auto& s : sentences) {
        out += s.text;
        if (s.sentinel_terminated) out += "|";
    }
    if (residual) out += residual->text;
    return out;
}

seg::SpeechSegment make_segment(std::vector<int16_t> samples) {
    seg::SpeechSegment s;
    s.samples = std::move(samples);
    return s;
}

}  // namespace

TEST_CASE("sentence segmenter hand trace") {
    SentenceSegmenter seg;
    auto s1 = seg.push("AB।C");
    REQUIRE(s1.size() == 1);
    CHECK(s1[0].text == "AB।");
    auto s2 = seg.push("D?E");
    REQUIRE(s2.size() == 1);
    CHECK(s2[0].text == "CD?");
    auto end = seg.finish();
    REQUIRE(end.residual.has_value());
    CHECK(end.residual->text == "E");
    CHECK_FALSE(end.invalid_query);
}

TEST_CASE("sentinel is a delimiter and is stripped") {
    SentenceSegmenter seg;
    auto s = seg.push("hello|");
    REQUIRE(s.size() == 1);
    CHECK(s[0].text == "hello");
    CHECK(s[0].sentinel_terminated);
    CHECK_FALSE(seg.finish().residual.has_value());
}

TEST_CASE("a lone dollar is the invalid-query signal") {
    SentenceSegmenter seg;
    CHECK(seg.push("$").empty());
    auto end = seg.finish();
    CHECK(end.invalid_query);
    CHECK_FALSE(end.residual.has_value());
}

TEST_CASE("dollar amid other text is plain text") {
    SentenceSegmenter seg;
    auto s = seg.push("cost $5!");
    REQUIRE(s.size() == 1);
    CHECK(s[0].text == "cost $5!");
    CHECK_FALSE(seg.finish().invalid_query);
}

TEST_CASE("delimiter split across chunks") {
    SentenceSegmenter seg;
    const std::string danda = "।";
    CHECK(seg.push("AB").empty());
    CHECK(seg.push(danda.substr(0, 1)).empty());
    auto s = seg.push(danda.substr(1));
    REQUIRE(s.size() == 1);
    CHECK(s[0].text == "AB।");
}

TEST_CASE("segment_stream conserves characters over random chunkings") {
    std::mt19937 rng(13);
    const std::vector<std::string> alphabet = {"a", "b", "ক", "া", " ",
                                               "।", "?", "!", "|"};
    for (int iter = 0; iter < 1000; ++iter) {
        std::string text;
        const int len = 1 + (int)(rng() % 40);
        for (int i = 0; i < len; ++i) text += alphabet[rng() % alphabet.size()];
        if (text == "$") continue;  // reserved stream

        SentenceSegmenter seg;
        std::vector<Sentence> sentences;
        size_t pos = 0;
        while (pos < text.size()) {
            const size_t n = 1 + rng() % 7;  // byte-level chunking, any boundary
            const auto piece = text.substr(pos, n);
            pos += piece.size();
            for (auto& s : seg.push(piece)) sentences.push_back(std::move(s));
        }
        auto end = seg.finish();
        REQUIRE(reassemble(sentences, end.residual) == text);
    }
}

TEST_CASE("no sentence is emitted before its delimiter arrives") {
    SentenceSegmenter seg;
    CHECK(seg.push("first part ").empty());
    CHECK(seg.push("second part").empty());
    auto s = seg.push("!");
    REQUIRE(s.size() == 1);
    CHECK(s[0].text == "first part second part!");
}

TEST_CASE("scripted asr looks up fingerprints") {
    auto seg_a = make_segment({1, 2, 3, 4});
    auto seg_b = make_segment({5, 6, 7});
    std::map<std::string, std::string> table{
        {backends::segment_fingerprint(seg_a), "transcript a"}};

    auto asr = backends::scripted_asr(table);
    CHECK(asr->transcribe(seg_a) == "transcript a");
    CHECK(asr->transcribe(seg_b) == "<unk>");
    CHECK(asr->transcribe(make_segment({})) == "");
}

TEST_CASE("fingerprint depends on content and length") {
    auto a = backends::segment_fingerprint(make_segment({1, 2, 3}));
    auto b = backends::segment_fingerprint(make_segment({1, 2, 4}));
    auto c = backends::segment_fingerprint(make_segment({1, 2}));
    CHECK(a != b);
    CHECK(a != c);
    CHECK(a == backends::segment_fingerprint(make_segment({1, 2, 3})));
    CHECK(a.substr(0, 2) == "3:");
}

TEST_CASE("scripted llm chunks by code points") {
    auto llm = backends::scripted_llm({{"q", "XY।Z|"}}, 2, 0);
    std::vector<std::string> chunks;
    llm->generate("q", [&](std::string_view c) { chunks.emplace_back(c); });
    REQUIRE(chunks.size() == 3);
    CHECK(chunks[0] == "XY");
    CHECK(chunks[1] == "।Z");
    CHECK(chunks[2] == "|");
}

TEST_CASE("scripted llm yields the sentinel for unknown queries") {
    auto llm = backends::scripted_llm({}, 4, 0);
    std::vector<std::string> chunks;
    llm->generate("anything", [&](std::string_view c) { chunks.emplace_back(c); });
    REQUIRE(chunks.size() == 1);
    CHECK(chunks[0] == "$");
}

TEST_CASE("scripted llm paces chunks") {
    auto llm = backends::scripted_llm({{"q", "abcdef"}}, 2, 50);
    const auto start = std::chrono::steady_clock::now();
    int n = 0;
    llm->generate("q", [&](std::string_view) { ++n; });
    const auto ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    CHECK(n == 3);
    CHECK(ms >= 95.0);
    CHECK(ms <= 250.0);
}

TEST_CASE("tone tts duration arithmetic") {
    auto tts = backends::tone_tts();
    CHECK(tts->native_rate_hz() == 22050);

    // 10 characters -> 0.8 s -> 17640 samples at 22.05 kHz.
    auto audio10 = tts->synthesize("abcdefghij");
    CHECK(audio10.size() == 17640);

    // Code points, not bytes: 2 Bengali characters are 6 bytes.
    auto audio2 = tts->synthesize("কা");
    CHECK(audio2.size() == 2 * 1764);

    CHECK(tts->synthesize("").empty());
    CHECK(tts->synthesize("abc") == tts->synthesize("abc"));

    auto tts16 = backends::tone_tts(16000);
    CHECK(tts16->synthesize("abcdefghij").size() == 12800);
    CHECK_THROWS_AS(backends::tone_tts(44100), ParamError);
}

TEST_CASE("mock script file parsing") {
    const auto path = std::string("mock_script_test.cfg");
    {
        std::ofstream f(path);
        f << "# scripted backends for the loopback fixtures\n"
          << "[asr]\n"
          << "3:0123456789abcdef = some query\n"
          << "[llm]\n"
          << "some query = reply one। reply two|\n"
          << "[options]\n"
          << "llm.chunk_size = 4\n"
          << "llm.chunk_delay_ms = 10\n"
          << "tts.rate_hz = 16000\n";
    }
    auto script = backends::MockScript::load(path);
    std::remove(path.c_str());

    CHECK(script.asr.at("3:0123456789abcdef") == "some query");
    CHECK(script.llm.at("some query") == "reply one। reply two|");
    CHECK(script.llm_chunk_size == 4);
    CHECK(script.llm_chunk_delay_ms == 10);
    CHECK(script.tts_rate_hz == 16000);

    CHECK_THROWS_AS(backends::MockScript::load("missing_file.cfg"), IoError);
}

TEST_CASE("utf8 helpers") {
    CHECK(utf8::length("abc") == 3);
    CHECK(utf8::length("কা") == 2);
    CHECK(utf8::encode(utf8::decode("mixed । text")) == "mixed । text");
    auto chunks = utf8::chunk("কaা", 2);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0] == "কa");
    CHECK(chunks[1] == "া");
}
