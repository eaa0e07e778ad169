#include "rtva/eval.hpp"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rtva/errors.hpp"
#include "rtva/utf8.hpp"

namespace rtva::eval {

namespace {

bool is_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r';
}

std::vector<std::string> tokenize_words(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char32_t c : utf8::decode(text)) {
        if (is_space(c)) {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += utf8::encode_one(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::u32string squash_whitespace(const std::string& text, bool strip_spaces) {
    std::u32string out;
    bool pending_space = false;
    for (char32_t c : utf8::decode(text)) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space && !strip_spaces) out.push_back(U' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

// Minimum-edit-distance alignment with unit costs. The backtrace prefers a
// match, then substitution, then deletion, then insertion at equal cost, so
// S/D/I are deterministic; the total S+D+I is the plain edit distance either
// way.
template <typename Token>
EditCounts aligned_counts(const std::vector<Token>& ref, const std::vector<Token>& hyp) {
    const size_t n = ref.size(), m = hyp.size();
    std::vector<std::vector<int>> cost(n + 1, std::vector<int>(m + 1, 0));
    for (size_t i = 0; i <= n; ++i) cost[i][0] = (int)i;
    for (size_t j = 0; j <= m; ++j) cost[0][j] = (int)j;
    for (size_t i = 1; i <= n; ++i) {
        for (size_t j = 1; j <= m; ++j) {
            const int sub = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
            cost[i][j] = std::min({sub, cost[i - 1][j] + 1, cost[i][j - 1] + 1});
        }
    }

    EditCounts counts;
    counts.reference_length = (int)n;
    size_t i = n, j = m;
    while (i > 0 || j > 0) {
        if (i > 0 && j > 0 && ref[i - 1] == hyp[j - 1] &&
            cost[i][j] == cost[i - 1][j - 1]) {
            --i, --j;
        } else if (i > 0 && j > 0 && cost[i][j] == cost[i - 1][j - 1] + 1) {
            ++counts.substitutions;
            --i, --j;
        } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
            ++counts.deletions;
            --i;
        } else {
            ++counts.insertions;
            --j;
        }
    }
    return counts;
}

std::vector<char32_t> u32_tokens(const std::u32string& s) {
    return std::vector<char32_t>(s.begin(), s.end());
}

class NfcNormalizer final : public Normalizer {
public:
    std::string normalize(const std::string& text) const override {
        UErrorCode ec = U_ZERO_ERROR;
        const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(ec);
        if (U_FAILURE(ec) || nfc == nullptr) {
            throw Error("ICU NFC normalizer unavailable");
        }
        const icu::UnicodeString in = icu::UnicodeString::fromUTF8(text);
        const icu::UnicodeString out = nfc->normalize(in, ec);
        if (U_FAILURE(ec)) throw Error("NFC normalization failed");
        std::string result;
        out.toUTF8String(result);
        return result;
    }
};

class IdentityNormalizer final : public Normalizer {
public:
    std::string normalize(const std::string& text) const override { return text; }
};

struct RecordScore {
    bool excluded = false;
    EditCounts words;
    EditCounts chars;
    double nld = 0.0;
};

RecordScore score_record(const EvalRecord& rec, const ProcessingConfig& cfg) {
    RecordScore score;
    const std::string ref = cfg.apply(rec.reference);
    const std::string hyp = cfg.apply(rec.hypothesis);
    if (tokenize_words(ref).empty()) {
        score.excluded = true;
        return score;
    }
    score.words = wer(ref, hyp).counts;
    score.chars = cer(ref, hyp, cfg.cer_strip_spaces).counts;
    score.nld = normalized_levenshtein(ref, hyp);
    return score;
}

ManifestReport aggregate(const std::vector<EvalRecord>& records,
                         const std::vector<RecordScore>& scores) {
    ManifestReport report;
    double nld_sum = 0.0;
    for (size_t i = 0; i < records.size(); ++i) {
        const RecordScore& s = scores[i];
        if (s.excluded) {
            ++report.records_excluded;
            continue;
        }
        ++report.records_scored;
        report.words.substitutions += s.words.substitutions;
        report.words.deletions += s.words.deletions;
        report.words.insertions += s.words.insertions;
        report.words.reference_length += s.words.reference_length;
        report.chars.substitutions += s.chars.substitutions;
        report.chars.deletions += s.chars.deletions;
        report.chars.insertions += s.chars.insertions;
        report.chars.reference_length += s.chars.reference_length;

        auto& region = report.regions[records[i].region];
        ++region.records;
        region.words.substitutions += s.words.substitutions;
        region.words.deletions += s.words.deletions;
        region.words.insertions += s.words.insertions;
        region.words.reference_length += s.words.reference_length;

        nld_sum += s.nld;
        int bin = (int)(s.nld / 0.05);
        bin = std::clamp(bin, 0, kHistogramBins - 1);
        report.levenshtein_histogram[(size_t)bin]++;
    }
    if (report.words.reference_length > 0) {
        report.corpus_wer = (double)report.words.total() / report.words.reference_length;
    }
    if (report.chars.reference_length > 0) {
        report.corpus_cer = (double)report.chars.total() / report.chars.reference_length;
    }
    for (auto& [_, region] : report.regions) {
        if (region.words.reference_length > 0) {
            region.wer = (double)region.words.total() / region.words.reference_length;
        }
    }
    if (report.records_scored > 0) {
        report.levenshtein_mean = nld_sum / (double)report.records_scored;
    }
    return report;
}

}  // namespace

RateResult wer(const std::string& reference, const std::string& hypothesis) {
    const auto ref = tokenize_words(reference);
    const auto hyp = tokenize_words(hypothesis);
    if (ref.empty()) throw EvalError("wer undefined: empty reference");
    RateResult r;
    r.counts = aligned_counts(ref, hyp);
    r.rate = (double)r.counts.total() / (double)r.counts.reference_length;
    return r;
}

RateResult cer(const std::string& reference, const std::string& hypothesis,
               bool strip_spaces) {
    const auto ref = u32_tokens(squash_whitespace(reference, strip_spaces));
    const auto hyp = u32_tokens(squash_whitespace(hypothesis, strip_spaces));
    if (ref.empty()) throw EvalError("cer undefined: empty reference");
    RateResult r;
    r.counts = aligned_counts(ref, hyp);
    r.rate = (double)r.counts.total() / (double)r.counts.reference_length;
    return r;
}

double normalized_levenshtein(const std::string& reference, const std::string& hypothesis) {
    const auto ref = u32_tokens(utf8::decode(reference));
    const auto hyp = u32_tokens(utf8::decode(hypothesis));
    const size_t longer = std::max(ref.size(), hyp.size());
    if (longer == 0) return 0.0;
    return (double)aligned_counts(ref, hyp).total() / (double)longer;
}

std::vector<char32_t> default_punctuation() {
    return {U'।', U'॥', U'.', U',', U';', U':', U'!', U'?',
            U'"',      U'\'',     U'(', U')', U'-', U'…'};
}

std::string remove_punctuation(const std::string& text) {
    return remove_punctuation(text, default_punctuation());
}

std::string remove_punctuation(const std::string& text,
                               const std::vector<char32_t>& punctuation) {
    std::u32string kept;
    for (char32_t c : utf8::decode(text)) {
        if (std::find(punctuation.begin(), punctuation.end(), c) == punctuation.end()) {
            kept.push_back(c);
        }
    }
    return utf8::encode(squash_whitespace(utf8::encode(kept), false));
}

std::shared_ptr<const Normalizer> nfc_normalizer() {
    static const auto instance = std::make_shared<const NfcNormalizer>();
    return instance;
}

std::shared_ptr<const Normalizer> identity_normalizer() {
    static const auto instance = std::make_shared<const IdentityNormalizer>();
    return instance;
}

std::string ProcessingConfig::apply(const std::string& text) const {
    std::string out = text;
    if (normalize) {
        const auto& n = normalizer ? *normalizer : *nfc_normalizer();
        out = n.normalize(out);
    }
    if (punctuation_removal) {
        out = punctuation.empty() ? remove_punctuation(out)
                                  : remove_punctuation(out, punctuation);
    }
    return out;
}

std::vector<EvalRecord> load_manifest(const std::string& path, size_t* malformed) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest: " + path);

    std::string line;
    if (!std::getline(in, line)) throw FormatError("manifest has no header: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id\tregion\treference\thypothesis") {
        throw FormatError("manifest header must be id/region/reference/hypothesis: " + path);
    }

    std::vector<EvalRecord> records;
    size_t bad = 0, data_rows = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++data_rows;
        std::vector<std::string> cols;
        size_t start = 0;
        for (size_t i = 0; i <= line.size(); ++i) {
            if (i == line.size() || line[i] == '\t') {
                cols.push_back(line.substr(start, i - start));
                start = i + 1;
            }
        }
        if (cols.size() != 4 || cols[0].empty()) {
            ++bad;
            continue;
        }
        records.push_back({cols[0], cols[1], cols[2], cols[3]});
    }
    if (malformed) *malformed = bad;
    if (data_rows > 0 && records.empty()) {
        throw EvalError("manifest has no well-formed rows: " + path);
    }
    return records;
}

ManifestReport evaluate_manifest(const std::vector<EvalRecord>& records,
                                 const ProcessingConfig& cfg, ExecutionMode mode) {
    std::vector<RecordScore> scores(records.size());
    if (mode == ExecutionMode::serial) {
        for (size_t i = 0; i < records.size(); ++i) {
            scores[i] = score_record(records[i], cfg);
        }
    } else {
#pragma omp parallel for schedule(dynamic, 16)
        for (int64_t i = 0; i < (int64_t)records.size(); ++i) {
            scores[(size_t)i] = score_record(records[(size_t)i], cfg);
        }
    }
    return aggregate(records, scores);
}

std::string ManifestReport::table() const {
    std::ostringstream os;
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "corpus WER %.4f  (S=%d D=%d I=%d N=%d)\n", corpus_wer,
                  words.substitutions, words.deletions, words.insertions,
                  words.reference_length);
    os << buf;
    std::snprintf(buf, sizeof(buf),
                  "corpus CER %.4f  (S=%d D=%d I=%d N=%d)\n", corpus_cer,
                  chars.substitutions, chars.deletions, chars.insertions,
                  chars.reference_length);
    os << buf;
    std::snprintf(buf, sizeof(buf), "levenshtein mean %.4f over %zu records",
                  levenshtein_mean, records_scored);
    os << buf;
    if (records_excluded > 0) os << " (" << records_excluded << " excluded)";
    os << "\n\nregion                WER   records\n";
    for (const auto& [name, stats] : regions) {
        std::snprintf(buf, sizeof(buf), "%-18s %6.4f %9zu\n",
                      name.empty() ? "(none)" : name.c_str(), stats.wer, stats.records);
        os << buf;
    }
    return os.str();
}

std::string ManifestReport::machine_lines() const {
    std::ostringstream os;
    os << "eval_wer,corpus," << corpus_wer << "\n";
    os << "eval_cer,corpus," << corpus_cer << "\n";
    os << "eval_levenshtein_mean,corpus," << levenshtein_mean << "\n";
    os << "eval_records,scored," << records_scored << "\n";
    os << "eval_records,excluded," << records_excluded << "\n";
    for (const auto& [name, stats] : regions) {
        os << "eval_wer,region:" << name << "," << stats.wer << "\n";
    }
    return os.str();
}

std::string ManifestReport::histogram_csv() const {
    std::ostringstream os;
    os << "bin_low,bin_high,count\n";
    for (int i = 0; i < kHistogramBins; ++i) {
        os << (i * 0.05) << "," << ((i + 1) * 0.05) << ","
           << levenshtein_histogram[(size_t)i] << "\n";
    }
    return os.str();
}

}  // namespace rtva::eval
