#include "doctest.h"

#include <fstream>
#include <random>

#include "oracles.hpp"
#include "rtva/errors.hpp"
#include "rtva/eval.hpp"
#include "rtva/utf8.hpp"

using namespace rtva;

namespace {

std::string random_words(std::mt19937& rng, int max_tokens) {
    static const std::vector<std::string> vocab = {"a",  "b",  "ab", "ba", "ka",
                                                   "kha", "go", "gh", "x",  "y"};
    std::string out;
    const int n = (int)(rng() % (unsigned)(max_tokens + 1));
    for (int i = 0; i < n; ++i) {
        if (!out.empty()) out += " ";
        out += vocab[rng() % vocab.size()];
    }
    return out;
}

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::string write_manifest(const std::string& name, const std::string& body) {
    std::ofstream f(name);
    f << body;
    return name;
}

}  // namespace

TEST_CASE("wer golden examples") {
    CHECK(eval::wer("a b c", "a b c").rate == doctest::Approx(0.0));

    auto sub = eval::wer("a b c", "a x c");
    CHECK(sub.rate == doctest::Approx(1.0 / 3.0));
    CHECK(sub.counts.substitutions == 1);
    CHECK(sub.counts.deletions == 0);
    CHECK(sub.counts.insertions == 0);

    auto del = eval::wer("a b c", "");
    CHECK(del.rate == doctest::Approx(1.0));
    CHECK(del.counts.deletions == 3);

    auto ins = eval::wer("a", "a b");
    CHECK(ins.rate == doctest::Approx(1.0));
    CHECK(ins.counts.insertions == 1);
    CHECK(ins.counts.reference_length == 1);

    CHECK_THROWS_AS(eval::wer("", "anything"), EvalError);
    CHECK_THROWS_AS(eval::wer("   ", "anything"), EvalError);
}

TEST_CASE("cer golden examples") {
    CHECK(eval::cer("abc", "abc").rate == doctest::Approx(0.0));
    CHECK(eval::cer("abc", "axc").rate == doctest::Approx(1.0 / 3.0));

    auto swap = eval::cer("ab", "ba");
    CHECK(swap.rate == doctest::Approx(1.0));
    CHECK(swap.counts.substitutions == 2);

    // Whitespace collapses before counting; the single space is a character.
    auto spaced = eval::cer("a   b", "a b");
    CHECK(spaced.rate == doctest::Approx(0.0));
    CHECK(spaced.counts.reference_length == 3);

    auto stripped = eval::cer("a b", "ab", true);
    CHECK(stripped.rate == doctest::Approx(0.0));
    CHECK(stripped.counts.reference_length == 2);
}

TEST_CASE("wer/cer counts match the brute-force distance on 1000 random pairs") {
    std::mt19937 rng(71);
    for (int iter = 0; iter < 1000; ++iter) {
        const std::string ref = random_words(rng, 12);
        const std::string hyp = random_words(rng, 12);
        if (split_words(ref).empty()) continue;

        const auto w = eval::wer(ref, hyp);
        const auto expect_w =
            oracle::edit_distance(split_words(ref), split_words(hyp));
        REQUIRE((size_t)w.counts.total() == expect_w);
        REQUIRE(w.counts.reference_length == (int)split_words(ref).size());
        REQUIRE(w.rate ==
                doctest::Approx((double)expect_w / split_words(ref).size()));

        const auto c = eval::cer(ref, hyp);
        std::vector<char32_t> ref_chars, hyp_chars;
        for (char32_t ch : utf8::decode(ref)) ref_chars.push_back(ch);
        for (char32_t ch : utf8::decode(hyp)) hyp_chars.push_back(ch);
        // Inputs are single spaced already, so squashing is a no-op.
        REQUIRE((size_t)c.counts.total() ==
                oracle::edit_distance(ref_chars, hyp_chars));
    }
}

TEST_CASE("normalized levenshtein properties") {
    CHECK(eval::normalized_levenshtein("same", "same") == 0.0);
    CHECK(eval::normalized_levenshtein("abcd", "wxyz") == 1.0);
    CHECK(eval::normalized_levenshtein("abcd", "abc") == doctest::Approx(0.25));
    CHECK(eval::normalized_levenshtein("", "") == 0.0);
    CHECK(eval::normalized_levenshtein("", "ab") == 1.0);

    std::mt19937 rng(73);
    for (int iter = 0; iter < 500; ++iter) {
        const std::string a = random_words(rng, 6);
        const std::string b = random_words(rng, 6);
        const double ab = eval::normalized_levenshtein(a, b);
        CHECK(ab == eval::normalized_levenshtein(b, a));  // symmetric
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
    }
}

TEST_CASE("punctuation removal") {
    CHECK(eval::remove_punctuation("ক।") == "ক");
    CHECK(eval::remove_punctuation("a , b") == "a b");
    CHECK(eval::remove_punctuation("no punctuation here") == "no punctuation here");
    CHECK(eval::remove_punctuation("ক॥ '' (x) -") == "ক x");
    CHECK(eval::remove_punctuation("...") == "");

    // Configurable set.
    CHECK(eval::remove_punctuation("a*b", {U'*'}) == "ab");
}

TEST_CASE("wer invariant under matching punctuation removal") {
    // Same trailing marks on both sides: the alignment is unchanged.
    const std::string ref = "ami jabo। tumi ki।";
    const std::string hyp = "ami jabo। tumi ke।";
    const auto before = eval::wer(ref, hyp);
    const auto after =
        eval::wer(eval::remove_punctuation(ref), eval::remove_punctuation(hyp));
    CHECK(before.rate == doctest::Approx(after.rate));

    // Punctuation-free text is a fixed point.
    std::mt19937 rng(79);
    for (int i = 0; i < 50; ++i) {
        const std::string a = random_words(rng, 8);
        const std::string b = random_words(rng, 8);
        if (split_words(a).empty()) continue;
        CHECK(eval::wer(a, b).rate ==
              eval::wer(eval::remove_punctuation(a), eval::remove_punctuation(b)).rate);
    }
}

TEST_CASE("nfc normalizer composes decomposed Bengali vowel signs") {
    auto nfc = eval::nfc_normalizer();
    // U+09C7 + U+09BE compose to the single vowel sign O (U+09CB).
    const std::string decomposed = "মো";
    const std::string composed = "মো";
    CHECK(nfc->normalize(decomposed) == composed);

    CHECK(nfc->normalize("plain ascii") == "plain ascii");

    // Idempotent on arbitrary lines.
    std::vector<std::string> lines = {decomposed, composed, "mixed কা text",
                                      "ábc"};
    for (const auto& line : lines) {
        const auto once = nfc->normalize(line);
        CHECK(nfc->normalize(once) == once);
    }
}

TEST_CASE("processing config applies normalize then punctuation removal") {
    eval::ProcessingConfig cfg;
    cfg.normalize = true;
    cfg.punctuation_removal = true;
    CHECK(cfg.apply("মো।") == "মো");

    eval::ProcessingConfig off;
    CHECK(off.apply("x । y") == "x । y");
}

TEST_CASE("manifest evaluation: corpus WER from aggregate counts") {
    std::vector<eval::EvalRecord> records{
        {"1", "sylhet", "a b c", "a x c"},  // S=1, N=3
        {"2", "sylhet", "d e", "d e"},      // 0, N=2
    };
    auto report = eval::evaluate_manifest(records, {}, eval::ExecutionMode::serial);
    CHECK(report.corpus_wer == doctest::Approx(0.2));
    CHECK(report.records_scored == 2);
    CHECK(report.regions.at("sylhet").wer == doctest::Approx(0.2));
}

TEST_CASE("single-region manifest: region WER equals corpus WER") {
    std::mt19937 rng(83);
    std::vector<eval::EvalRecord> records;
    for (int i = 0; i < 30; ++i) {
        auto ref = random_words(rng, 10);
        if (split_words(ref).empty()) ref = "a";
        records.push_back({std::to_string(i), "only", ref, random_words(rng, 10)});
    }
    auto report = eval::evaluate_manifest(records, {});
    CHECK(report.regions.size() == 1);
    CHECK(report.regions.at("only").wer == doctest::Approx(report.corpus_wer));
}

TEST_CASE("corpus WER is invariant under record order") {
    std::mt19937 rng(89);
    std::vector<eval::EvalRecord> records;
    for (int i = 0; i < 40; ++i) {
        auto ref = random_words(rng, 10);
        if (split_words(ref).empty()) ref = "b";
        records.push_back({std::to_string(i), i % 2 ? "r1" : "r2", ref,
                           random_words(rng, 10)});
    }
    auto a = eval::evaluate_manifest(records, {});
    std::shuffle(records.begin(), records.end(), rng);
    auto b = eval::evaluate_manifest(records, {});
    CHECK(a.corpus_wer == doctest::Approx(b.corpus_wer));
    CHECK(a.corpus_cer == doctest::Approx(b.corpus_cer));
}

TEST_CASE("serial and parallel evaluation agree exactly") {
    std::mt19937 rng(97);
    std::vector<eval::EvalRecord> records;
    for (int i = 0; i < 500; ++i) {
        auto ref = random_words(rng, 12);
        if (split_words(ref).empty()) ref = "c";
        records.push_back({std::to_string(i), "r" + std::to_string(i % 5), ref,
                           random_words(rng, 12)});
    }
    auto serial = eval::evaluate_manifest(records, {}, eval::ExecutionMode::serial);
    auto parallel = eval::evaluate_manifest(records, {}, eval::ExecutionMode::parallel);
    CHECK(serial.corpus_wer == parallel.corpus_wer);
    CHECK(serial.corpus_cer == parallel.corpus_cer);
    CHECK(serial.levenshtein_mean == parallel.levenshtein_mean);
    CHECK(serial.levenshtein_histogram == parallel.levenshtein_histogram);
    CHECK(serial.words.substitutions == parallel.words.substitutions);
    CHECK(serial.regions.size() == parallel.regions.size());
}

TEST_CASE("levenshtein histogram bins by 0.05") {
    std::vector<eval::EvalRecord> records{
        {"1", "r", "abcd", "abcd"},  // nld 0 -> bin 0
        {"2", "r", "abcd", "wxyz"},  // nld 1 -> bin 19
        {"3", "r", "abcd", "abcx"},  // nld 0.25 -> bin 5
    };
    auto report = eval::evaluate_manifest(records, {});
    CHECK(report.levenshtein_histogram[0] == 1);
    CHECK(report.levenshtein_histogram[19] == 1);
    CHECK(report.levenshtein_histogram[5] == 1);
    CHECK(report.levenshtein_mean == doctest::Approx((0.0 + 1.0 + 0.25) / 3));
}

TEST_CASE("records with empty processed reference are excluded and counted") {
    eval::ProcessingConfig cfg;
    cfg.punctuation_removal = true;
    std::vector<eval::EvalRecord> records{
        {"1", "r", "।।", "x"},  // empty after punctuation removal
        {"2", "r", "a b", "a b"},
    };
    auto report = eval::evaluate_manifest(records, cfg);
    CHECK(report.records_scored == 1);
    CHECK(report.records_excluded == 1);
    CHECK(report.corpus_wer == doctest::Approx(0.0));
}

TEST_CASE("manifest file loading") {
    SUBCASE("well-formed with one malformed row") {
        const auto path = write_manifest(
            "eval_manifest_ok.tsv",
            "id\tregion\treference\thypothesis\n"
            "1\tsylhet\tami jabo\tami jabo\n"
            "broken row without tabs\n"
            "2\tbarishal\ttumi ki\ttumi ke\n");
        size_t malformed = 0;
        auto records = eval::load_manifest(path, &malformed);
        std::remove(path.c_str());
        REQUIRE(records.size() == 2);
        CHECK(malformed == 1);
        CHECK(records[1].region == "barishal");
    }
    SUBCASE("all rows malformed") {
        const auto path = write_manifest("eval_manifest_bad.tsv",
                                         "id\tregion\treference\thypothesis\n"
                                         "oops\noops again\n");
        CHECK_THROWS_AS(eval::load_manifest(path), EvalError);
        std::remove(path.c_str());
    }
    SUBCASE("bad header") {
        const auto path =
            write_manifest("eval_manifest_hdr.tsv", "not\tthe\theader\trow\n");
        CHECK_THROWS_AS(eval::load_manifest(path), FormatError);
        std::remove(path.c_str());
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(eval::load_manifest("no_such_manifest.tsv"), IoError);
    }
}

TEST_CASE("report rendering has the expected surfaces") {
    std::vector<eval::EvalRecord> records{{"1", "r", "a b c", "a x c"}};
    auto report = eval::evaluate_manifest(records, {});
    CHECK(report.table().find("corpus WER") != std::string::npos);
    CHECK(report.machine_lines().find("eval_wer,corpus,") != std::string::npos);
    const auto csv = report.histogram_csv();
    CHECK(csv.find("bin_low,bin_high,count") != std::string::npos);
    // 20 bins plus the header line.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
}
