#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "samgp/bundle.hpp"
#include "samgp/complexity.hpp"
#include "samgp/config.hpp"
#include "samgp/data.hpp"
#include "samgp/evolution.hpp"
#include "samgp/wilcoxon.hpp"

namespace samgp {

struct RunReport {
    ExperimentConfig config;
    std::vector<GenerationRecord> records;
    double train_r2 { 0.0 };
    double test_r2 { 0.0 };
    std::size_t train_rows { 0 };
    std::size_t test_rows { 0 };
    bool split_fell_back { false };
    std::size_t model_members { 0 };
    std::vector<std::string> model_expressions; // one line per member
    ModelBundle bundle;
    double wall_seconds { 0.0 }; // training only, dataset loading excluded
    std::uint64_t cache_hits { 0 };
    std::uint64_t cache_misses { 0 };
};

RunReport run_experiment(const ExperimentConfig& cfg, const Dataset& data);
// Loads cfg.dataset first; loading is not timed.
RunReport run_experiment(const ExperimentConfig& cfg);

// Writes config.json, generations.csv, summary.json and model.json into `dir`, plus
// timing.json, which holds the only non-deterministic values.
void emit_metrics(const RunReport& report, const std::filesystem::path& dir);

std::string generations_csv(const RunReport& report);
std::string summary_json(const RunReport& report);

// Long format keyed by (measure, seed, generation) for plotting.
std::string long_format_csv(const std::vector<RunReport>& reports);

struct BatchReport {
    std::vector<RunReport> runs;
    double median_test_r2 { 0.0 };
    double median_train_r2 { 0.0 };
};

// One run per seed under cfg.out/seed-<s>, plus long.csv and an aggregate summary.json.
BatchReport run_batch(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds, bool write = true);

struct PairOutcome {
    std::string dataset;
    MeasureKind reference;
    MeasureKind other;
    Outcome outcome; // from the reference measure's point of view
    WilcoxonResult test;
};

struct ComparisonReport {
    // test R2 per (dataset, measure) in seed order
    std::vector<std::string> datasets;
    std::vector<MeasureKind> measures;
    std::vector<std::vector<std::vector<double>>> test_r2; // [dataset][measure][seed]
    std::vector<PairOutcome> pairs;
};

// Runs every measure on every dataset and seed, then compares `reference` against each other
// measure with a paired Wilcoxon test over seeds (alpha = 0.05).
ComparisonReport compare_measures(const ExperimentConfig& base, const std::vector<std::string>& datasets,
    const std::vector<MeasureKind>& measures, const std::vector<std::uint64_t>& seeds, MeasureKind reference,
    bool write = true);

// Win/tie/loss counts of `reference` against each other measure, summed over datasets.
std::string comparison_table_csv(const ComparisonReport& r);

} // namespace samgp
