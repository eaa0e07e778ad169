#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace rtva::eval {

struct EditCounts {
    int substitutions = 0;
    int deletions = 0;
    int insertions = 0;
    int reference_length = 0;

    int total() const { return substitutions + deletions + insertions; }
};

struct RateResult {
    double rate = 0.0;
    EditCounts counts;
};

// Word error rate over a whitespace tokenization, (S+D+I)/N from a
// minimum-edit-distance alignment with unit costs. Empty reference raises
// EvalError (the rate is undefined).
RateResult wer(const std::string& reference, const std::string& hypothesis);

// Character error rate over code points of the whitespace-normalized strings
// (runs of whitespace collapse to one space, which is kept as a character
// unless strip_spaces is set).
RateResult cer(const std::string& reference, const std::string& hypothesis,
               bool strip_spaces = false);

// Character edit distance divided by the longer length, in [0, 1]. Both
// empty is defined as 0.
double normalized_levenshtein(const std::string& reference, const std::string& hypothesis);

// Strips the configured punctuation code points, collapses the resulting
// runs of spaces and trims the ends.
std::vector<char32_t> default_punctuation();
std::string remove_punctuation(const std::string& text);
std::string remove_punctuation(const std::string& text,
                               const std::vector<char32_t>& punctuation);

// Pluggable text normalizer. The default performs Unicode canonical
// composition (NFC), which folds the decomposed Bengali vowel-sign and
// nukta sequences into their composed forms; it is idempotent.
class Normalizer {
public:
    virtual ~Normalizer() = default;
    virtual std::string normalize(const std::string& text) const = 0;
};

std::shared_ptr<const Normalizer> nfc_normalizer();
std::shared_ptr<const Normalizer> identity_normalizer();

struct ProcessingConfig {
    bool normalize = false;
    bool punctuation_removal = false;
    bool cer_strip_spaces = false;
    std::shared_ptr<const Normalizer> normalizer;  // defaults to NFC when null
    std::vector<char32_t> punctuation;             // defaults when empty

    std::string apply(const std::string& text) const;
};

struct EvalRecord {
    std::string id;
    std::string region;
    std::string reference;
    std::string hypothesis;
};

// Tab-separated manifest with the header "id region reference hypothesis".
// Malformed rows are skipped and counted; a manifest whose data rows are all
// malformed raises EvalError.
std::vector<EvalRecord> load_manifest(const std::string& path, size_t* malformed = nullptr);

struct RegionStats {
    EditCounts words;
    size_t records = 0;
    double wer = 0.0;
};

inline constexpr int kHistogramBins = 20;  // normalized distance, width 0.05

struct ManifestReport {
    EditCounts words;
    EditCounts chars;
    double corpus_wer = 0.0;  // aggregate counts, not a mean of rates
    double corpus_cer = 0.0;
    std::map<std::string, RegionStats> regions;
    std::vector<size_t> levenshtein_histogram = std::vector<size_t>(kHistogramBins, 0);
    double levenshtein_mean = 0.0;
    size_t records_scored = 0;
    size_t records_excluded = 0;  // reference empty after processing

    std::string table() const;
    std::string machine_lines() const;
    std::string histogram_csv() const;
};

enum class ExecutionMode {
    serial,    // reference implementation
    parallel,  // OpenMP over records, identical aggregation order
};

ManifestReport evaluate_manifest(const std::vector<EvalRecord>& records,
                                 const ProcessingConfig& cfg,
                                 ExecutionMode mode = ExecutionMode::parallel);

}  // namespace rtva::eval
