#include "samgp/experiment.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>

#include <fmt/core.h>
#include <json.hpp>

#include "samgp/error.hpp"
#include "samgp/inference.hpp"
#include "samgp/selection.hpp"

namespace samgp {

using nlohmann::json;

namespace {

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot write {}", path.string()));
    }
    out << text;
}

// NaN and infinities are not valid JSON numbers.
json number(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

std::string csv_number(double v)
{
    return std::isfinite(v) ? fmt::format("{}", v) : std::string {};
}

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') {
            out += '"';
        }
    }
    return out + "\"";
}

double median_of(std::vector<double> v)
{
    return v.empty() ? std::nan("") : median(std::move(v));
}

} // namespace

RunReport run_experiment(const ExperimentConfig& cfg_in, const Dataset& data)
{
    cfg_in.validate();
    ExperimentConfig cfg = cfg_in;
    cfg.evolution.seed = cfg.seed;
    cfg.evolution.archive_size = cfg.ensemble_size;

    const auto t0 = std::chrono::steady_clock::now();
    auto prep = prepare(data, SplitSpec { cfg.split, cfg.seed, cfg.label_noise });
    auto result = evolve(cfg.evolution, prep.train.features, prep.train.target, TestData { prep.test.features, prep.test.target });

    RunReport rep;
    rep.config = cfg;
    rep.records = result.records;
    rep.train_rows = static_cast<std::size_t>(prep.train.rows());
    rep.test_rows = static_cast<std::size_t>(prep.test.rows());
    rep.split_fell_back = prep.fell_back;
    rep.cache_hits = result.cache_hits;
    rep.cache_misses = result.cache_misses;

    auto& b = rep.bundle;
    for (const auto& ind : result.final_members) {
        b.members.push_back(make_member(ind, prep.train.features));
        rep.model_expressions.push_back(ind.to_string());
    }
    b.bounds = PredictionBounds::from_targets(prep.train.target);
    b.input_stats = prep.feature_stats;
    b.target_mean = prep.target_stats.means(0);
    b.target_stddev = prep.target_stats.stddevs(0);
    b.feature_names = data.names;
    b.target_name = data.target_name;
    b.reduction = cfg.evolution.reduction;
    rep.model_members = b.members.size();

    rep.train_r2 = r2(prep.train.target, ensemble_predict(b.members, prep.train.features, b.bounds, false));
    rep.test_r2 = r2(prep.test.target, ensemble_predict(b.members, prep.test.features, b.bounds, b.reduction));
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

RunReport run_experiment(const ExperimentConfig& cfg)
{
    cfg.validate();
    auto data = load_csv(cfg.dataset, cfg.target);
    return run_experiment(cfg, data);
}

std::string generations_csv(const RunReport& report)
{
    std::string out = "generation,best_o1,best_o2,archive_score,train_r2,test_r2\n";
    for (const auto& r : report.records) {
        out += fmt::format("{},{},{},{},{},{}\n", r.generation, csv_number(r.best_o1), csv_number(r.best_o2),
            csv_number(r.archive_score), csv_number(r.train_r2), csv_number(r.test_r2));
    }
    return out;
}

std::string summary_json(const RunReport& report)
{
    std::vector<double> test;
    for (const auto& r : report.records) {
        if (std::isfinite(r.test_r2)) {
            test.push_back(r.test_r2);
        }
    }
    json j = {
        { "seed", report.config.seed },
        { "measure", to_string(report.config.evolution.measure) },
        { "dataset", report.config.dataset },
        { "generations", report.records.size() },
        { "train_rows", report.train_rows },
        { "test_rows", report.test_rows },
        { "split", to_string(report.config.split) },
        { "split_fell_back", report.split_fell_back },
        { "train_r2", number(report.train_r2) },
        { "test_r2", number(report.test_r2) },
        { "median_generation_test_r2", number(median_of(test)) },
        { "final_archive_score", report.records.empty() ? json(nullptr) : number(report.records.back().archive_score) },
        { "model_members", report.model_members },
        { "model", report.model_expressions },
    };
    return j.dump(2) + "\n";
}

void emit_metrics(const RunReport& report, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);
    write_file(dir / "config.json", config_to_json(report.config));
    write_file(dir / "generations.csv", generations_csv(report));
    write_file(dir / "summary.json", summary_json(report));
    save_bundle(report.bundle, dir / "model.json");

    json per_gen = json::array();
    for (const auto& r : report.records) {
        per_gen.push_back(r.wall_seconds);
    }
    json timing = {
        { "wall_seconds", report.wall_seconds },
        { "generation_wall_seconds", std::move(per_gen) },
        { "cache_hits", report.cache_hits },
        { "cache_misses", report.cache_misses },
    };
    write_file(dir / "timing.json", timing.dump(2) + "\n");
}

std::string long_format_csv(const std::vector<RunReport>& reports)
{
    std::string out = "dataset,measure,seed,generation,best_o1,best_o2,archive_score,train_r2,test_r2\n";
    for (const auto& rep : reports) {
        auto prefix = fmt::format("{},{},{}", csv_field(rep.config.dataset), to_string(rep.config.evolution.measure), rep.config.seed);
        for (const auto& r : rep.records) {
            out += fmt::format("{},{},{},{},{},{},{}\n", prefix, r.generation, csv_number(r.best_o1), csv_number(r.best_o2),
                csv_number(r.archive_score), csv_number(r.train_r2), csv_number(r.test_r2));
        }
    }
    return out;
}

BatchReport run_batch(const ExperimentConfig& cfg, const std::vector<std::uint64_t>& seeds, bool write)
{
    cfg.validate();
    if (seeds.empty()) {
        throw ConfigError("a batch needs at least one seed");
    }
    auto data = load_csv(cfg.dataset, cfg.target);
    BatchReport batch;
    std::vector<double> test;
    std::vector<double> train;
    for (auto s : seeds) {
        ExperimentConfig c = cfg;
        c.seed = s;
        c.out = (std::filesystem::path(cfg.out) / fmt::format("seed-{}", s)).string();
        auto rep = run_experiment(c, data);
        if (write) {
            emit_metrics(rep, c.out);
        }
        test.push_back(rep.test_r2);
        train.push_back(rep.train_r2);
        batch.runs.push_back(std::move(rep));
    }
    batch.median_test_r2 = median_of(test);
    batch.median_train_r2 = median_of(train);
    if (write) {
        json runs = json::array();
        for (const auto& r : batch.runs) {
            runs.push_back({ { "seed", r.config.seed }, { "train_r2", number(r.train_r2) }, { "test_r2", number(r.test_r2) } });
        }
        json j = {
            { "dataset", cfg.dataset },
            { "measure", to_string(cfg.evolution.measure) },
            { "runs", std::move(runs) },
            { "median_test_r2", number(batch.median_test_r2) },
            { "median_train_r2", number(batch.median_train_r2) },
        };
        std::filesystem::create_directories(cfg.out);
        write_file(std::filesystem::path(cfg.out) / "summary.json", j.dump(2) + "\n");
        write_file(std::filesystem::path(cfg.out) / "long.csv", long_format_csv(batch.runs));
    }
    return batch;
}

ComparisonReport compare_measures(const ExperimentConfig& base, const std::vector<std::string>& datasets,
    const std::vector<MeasureKind>& measures, const std::vector<std::uint64_t>& seeds, MeasureKind reference, bool write)
{
    if (datasets.empty() || measures.empty() || seeds.empty()) {
        throw ConfigError("comparison needs at least one dataset, measure and seed");
    }
    if (std::find(measures.begin(), measures.end(), reference) == measures.end()) {
        throw ConfigError(fmt::format("reference measure {} is not among the compared measures", to_string(reference)));
    }
    ComparisonReport rep;
    rep.datasets = datasets;
    rep.measures = measures;
    std::vector<RunReport> all;
    std::string results = "dataset,measure,seed,train_r2,test_r2\n";
    for (std::size_t d = 0; d < datasets.size(); ++d) {
        ExperimentConfig dcfg = base;
        dcfg.dataset = datasets[d];
        dcfg.validate();
        auto data = load_csv(dcfg.dataset, dcfg.target);
        rep.test_r2.emplace_back();
        for (auto m : measures) {
            rep.test_r2.back().emplace_back();
            for (auto s : seeds) {
                ExperimentConfig c = dcfg;
                c.evolution.measure = m;
                c.seed = s;
                c.out = (std::filesystem::path(base.out) / fmt::format("d{}-{}-seed-{}", d, to_string(m), s)).string();
                auto run = run_experiment(c, data);
                if (write) {
                    emit_metrics(run, c.out);
                }
                results += fmt::format("{},{},{},{},{}\n", csv_field(c.dataset), to_string(m), s, csv_number(run.train_r2),
                    csv_number(run.test_r2));
                rep.test_r2.back().back().push_back(run.test_r2);
                run.bundle = {};
                all.push_back(std::move(run));
            }
        }
        const auto ref = static_cast<std::size_t>(std::find(measures.begin(), measures.end(), reference) - measures.begin());
        for (std::size_t m = 0; m < measures.size(); ++m) {
            if (m == ref) {
                continue;
            }
            const auto& a = rep.test_r2.back()[ref];
            const auto& b = rep.test_r2.back()[m];
            auto test = wilcoxon_signed_rank(a, b);
            rep.pairs.push_back({ datasets[d], reference, measures[m], compare_paired(a, b), test });
        }
    }
    if (write) {
        std::filesystem::create_directories(base.out);
        write_file(std::filesystem::path(base.out) / "results.csv", results);
        write_file(std::filesystem::path(base.out) / "long.csv", long_format_csv(all));
        write_file(std::filesystem::path(base.out) / "comparison.csv", comparison_table_csv(rep));
    }
    return rep;
}

std::string comparison_table_csv(const ComparisonReport& r)
{
    // keep measure order stable
    std::vector<MeasureKind> order;
    std::map<int, std::array<int, 3>> counts;
    for (const auto& p : r.pairs) {
        auto key = static_cast<int>(p.other);
        if (counts.find(key) == counts.end()) {
            order.push_back(p.other);
            counts[key] = { 0, 0, 0 };
        }
        counts[key][static_cast<std::size_t>(p.outcome)] += 1;
    }
    std::string out = "reference,other,win,tie,loss\n";
    for (auto m : order) {
        const auto& c = counts[static_cast<int>(m)];
        auto ref = r.pairs.empty() ? std::string {} : to_string(r.pairs.front().reference);
        out += fmt::format("{},{},{},{},{}\n", ref, to_string(m), c[0], c[1], c[2]);
    }
    return out;
}

} // namespace samgp
