// Benchmark: serial reference vs OpenMP evaluation over a synthetic manifest.
// The parallel path must reproduce the serial report exactly.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "rtva/eval.hpp"

using namespace rtva;

namespace {

std::vector<eval::EvalRecord> synthetic_records(size_t count, uint32_t seed) {
    static const std::vector<std::string> vocab = {
        "ami",  "tumi", "bhalo", "achi",  "kothay", "jabo", "keno", "ki",
        "কাল", "ভালো", "না", "hobe"};
    std::mt19937 rng(seed);
    std::vector<eval::EvalRecord> records;
    records.reserve(count);
    for (size_t i = 0; i < count; ++i) {
        std::vector<std::string> ref_words;
        const int n = 8 + (int)(rng() % 30);
        for (int k = 0; k < n; ++k) ref_words.push_back(vocab[rng() % vocab.size()]);

        // Hypothesis: the reference with substitutions, deletions, insertions.
        std::string ref, hyp;
        for (const auto& w : ref_words) {
            if (!ref.empty()) ref += " ";
            ref += w;
            if (rng() % 11 == 0) continue;  // deletion
            if (!hyp.empty()) hyp += " ";
            hyp += (rng() % 5 == 0) ? vocab[rng() % vocab.size()] : w;
            if (rng() % 17 == 0) hyp += " " + vocab[rng() % vocab.size()];
        }
        records.push_back({std::to_string(i), "region" + std::to_string(i % 12),
                           ref + "।", hyp});
    }
    return records;
}

double run_ms(const std::vector<eval::EvalRecord>& records,
              const eval::ProcessingConfig& cfg, eval::ExecutionMode mode,
              eval::ManifestReport& out) {
    const auto t0 = std::chrono::steady_clock::now();
    out = eval::evaluate_manifest(records, cfg, mode);
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                     t0)
        .count();
}

}  // namespace

int main(int argc, char** argv) {
    const size_t count = argc > 1 ? (size_t)std::stoul(argv[1]) : 4000;
    const auto records = synthetic_records(count, 42);

    eval::ProcessingConfig cfg;
    cfg.normalize = true;
    cfg.punctuation_removal = true;

    eval::ManifestReport serial_report, parallel_report;
    // Warm up ICU and the allocator before timing.
    (void)eval::evaluate_manifest({records.front()}, cfg, eval::ExecutionMode::serial);

    const double serial_ms = run_ms(records, cfg, eval::ExecutionMode::serial, serial_report);
    const double parallel_ms =
        run_ms(records, cfg, eval::ExecutionMode::parallel, parallel_report);

    const bool identical =
        serial_report.corpus_wer == parallel_report.corpus_wer &&
        serial_report.corpus_cer == parallel_report.corpus_cer &&
        serial_report.levenshtein_mean == parallel_report.levenshtein_mean &&
        serial_report.levenshtein_histogram == parallel_report.levenshtein_histogram;

    std::printf("records            %zu\n", count);
    std::printf("threads            %d\n", omp_get_max_threads());
    std::printf("serial             %.1f ms\n", serial_ms);
    std::printf("openmp             %.1f ms\n", parallel_ms);
    std::printf("speedup            %.2fx\n", serial_ms / parallel_ms);
    std::printf("reports identical  %s\n", identical ? "yes" : "NO");
    std::printf("corpus WER %.4f CER %.4f\n", serial_report.corpus_wer,
                serial_report.corpus_cer);
    return identical ? 0 : 1;
}
