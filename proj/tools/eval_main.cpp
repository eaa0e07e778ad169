#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "cli_util.hpp"
#include "rtva/eval.hpp"

using namespace rtva;

namespace {

eval::ProcessingConfig make_config(bool normalize, bool punct) {
    eval::ProcessingConfig cfg;
    cfg.normalize = normalize;
    cfg.punctuation_removal = punct;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    cfg::KeyValues file_kv;
    try {
        const std::string config_path = cli::find_config_arg(argc, argv);
        if (!config_path.empty()) {
            file_kv = cfg::strip_prefix(cfg::load_key_values(config_path), "eval");
        }
    } catch (const Error& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return cli::kExitUsage;
    }

    CLI::App app{"ASR evaluation: corpus WER/CER, per-region rates and the "
                 "normalized Levenshtein distribution over a TSV manifest"};

    std::string config_path;
    app.add_option("--config", config_path, "key = value config file");

    std::string manifest = cfg::get_string(file_kv, "manifest").value_or("");
    bool normalize = cfg::get_bool(file_kv, "normalize").value_or(false);
    bool punct = cfg::get_bool(file_kv, "punct-removal").value_or(false);
    bool cer_strip_spaces = cfg::get_bool(file_kv, "cer-strip-spaces").value_or(false);
    std::string hist_csv = cfg::get_string(file_kv, "hist-csv").value_or("");
    bool matrix = false;
    bool machine = false;
    bool serial = false;

    app.add_option("--manifest", manifest, "TSV: id, region, reference, hypothesis");
    app.add_option("--normalize", normalize, "apply Unicode NFC normalization");
    app.add_option("--punct-removal", punct, "strip punctuation before scoring");
    app.add_option("--cer-strip-spaces", cer_strip_spaces,
                   "drop spaces entirely for CER");
    app.add_option("--hist-csv", hist_csv, "write the Levenshtein histogram CSV");
    app.add_flag("--matrix", matrix, "run all four text-processing combinations");
    app.add_flag("--machine", machine, "print machine-readable lines");
    app.add_flag("--serial", serial, "single-threaded evaluation");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp") {
            std::cout << app.help();
            return cli::kExitOk;
        }
        std::cerr << "eval: " << e.what() << "\n";
        return cli::kExitUsage;
    }

    if (manifest.empty()) {
        std::cerr << "eval: --manifest is required\n";
        return cli::kExitUsage;
    }

    try {
        size_t malformed = 0;
        const auto records = eval::load_manifest(manifest, &malformed);
        if (records.empty()) {
            std::cerr << "eval: manifest has no records: " << manifest << "\n";
            return cli::kExitUsage;
        }
        cli::echo_config("eval", {{"manifest", manifest},
                                  {"normalize", normalize ? "true" : "false"},
                                  {"punct-removal", punct ? "true" : "false"},
                                  {"cer-strip-spaces", cer_strip_spaces ? "true" : "false"},
                                  {"records", std::to_string(records.size())},
                                  {"malformed-rows", std::to_string(malformed)}});

        const auto mode =
            serial ? eval::ExecutionMode::serial : eval::ExecutionMode::parallel;

        if (matrix) {
            std::cout << "normalize  punct-removal  WER     CER\n";
            for (const bool n : {false, true}) {
                for (const bool p : {false, true}) {
                    auto cfg = make_config(n, p);
                    cfg.cer_strip_spaces = cer_strip_spaces;
                    const auto report = eval::evaluate_manifest(records, cfg, mode);
                    char buf[96];
                    std::snprintf(buf, sizeof(buf), "%-10s %-14s %.4f  %.4f\n",
                                  n ? "on" : "off", p ? "on" : "off",
                                  report.corpus_wer, report.corpus_cer);
                    std::cout << buf;
                }
            }
            return cli::kExitOk;
        }

        auto cfg = make_config(normalize, punct);
        cfg.cer_strip_spaces = cer_strip_spaces;
        const auto report = eval::evaluate_manifest(records, cfg, mode);
        std::cout << (machine ? report.machine_lines() : report.table());
        if (!hist_csv.empty()) {
            std::ofstream out(hist_csv);
            if (!out) {
                std::cerr << "eval: cannot write " << hist_csv << "\n";
                return cli::kExitUsage;
            }
            out << report.histogram_csv();
        }
        return cli::kExitOk;
    } catch (const Error& e) {
        std::cerr << "eval: " << e.what() << "\n";
        return cli::kExitUsage;
    }
}
