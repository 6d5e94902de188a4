#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "samgp/bundle.hpp"
#include "samgp/config.hpp"
#include "samgp/data.hpp"
#include "samgp/error.hpp"
#include "samgp/experiment.hpp"

namespace {

int cmd_run(const samgp::ConfigFlags& flags, const std::string& seeds)
{
    auto cfg = flags.resolve();
    if (!seeds.empty()) {
        auto batch = samgp::run_batch(cfg, samgp::parse_seed_list(seeds));
        for (const auto& r : batch.runs) {
            fmt::print("seed {}: train R2 {:.4f}  test R2 {:.4f}\n", r.config.seed, r.train_r2, r.test_r2);
        }
        fmt::print("median test R2 {:.4f} over {} seeds -> {}\n", batch.median_test_r2, batch.runs.size(), cfg.out);
        return 0;
    }
    auto rep = samgp::run_experiment(cfg);
    samgp::emit_metrics(rep, cfg.out);
    if (rep.split_fell_back) {
        fmt::print("note: fewer than 200 rows, split 50:50 instead of 100 training rows\n");
    }
    fmt::print("train R2 {:.4f}  test R2 {:.4f}  ({} train / {} test rows, {:.1f}s) -> {}\n", rep.train_r2, rep.test_r2,
        rep.train_rows, rep.test_rows, rep.wall_seconds, cfg.out);
    for (const auto& e : rep.model_expressions) {
        fmt::print("  {}\n", e);
    }
    return 0;
}

int cmd_compare(samgp::ConfigFlags& flags, const std::vector<std::string>& datasets, const std::string& measures_text,
    const std::string& seeds, const std::string& reference_text)
{
    if (!datasets.empty()) {
        flags.set_fallback_dataset(datasets.front());
    }
    auto cfg = flags.resolve();
    std::vector<std::string> ds = datasets.empty() ? std::vector<std::string> { cfg.dataset } : datasets;

    std::vector<samgp::MeasureKind> measures;
    if (measures_text.empty()) {
        measures = samgp::all_measures();
    } else {
        std::string_view rest(measures_text);
        while (!rest.empty()) {
            auto comma = rest.find(',');
            std::string name(rest.substr(0, comma));
            auto m = samgp::parse_measure(name);
            if (!m) {
                throw samgp::ConfigError(fmt::format("unknown measure '{}'", name));
            }
            measures.push_back(*m);
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
    }
    auto reference = samgp::parse_measure(reference_text);
    if (!reference) {
        throw samgp::ConfigError(fmt::format("unknown reference measure '{}'", reference_text));
    }
    auto rep = samgp::compare_measures(cfg, ds, measures, samgp::parse_seed_list(seeds), *reference);
    for (std::size_t d = 0; d < rep.datasets.size(); ++d) {
        fmt::print("{}\n", rep.datasets[d]);
        for (std::size_t m = 0; m < rep.measures.size(); ++m) {
            std::vector<double> v = rep.test_r2[d][m];
            std::sort(v.begin(), v.end());
            double med = v.size() % 2 == 1 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
            fmt::print("  {:<5} median test R2 {:.4f}\n", samgp::to_string(rep.measures[m]), med);
        }
    }
    fmt::print("{}", samgp::comparison_table_csv(rep));
    return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path, const std::string& out_path)
{
    auto bundle = samgp::load_bundle(model_path);
    auto data = samgp::load_csv(data_path, std::nullopt);
    // select the model's input columns by name; any other column (such as the target) is ignored
    std::vector<std::string> cols;
    for (const auto& n : data.names) {
        cols.push_back(n);
    }
    cols.push_back(data.target_name);

    Eigen::MatrixXd all(data.rows(), static_cast<Eigen::Index>(cols.size()));
    all.leftCols(data.vars()) = data.features;
    all.col(data.vars()) = data.target;
    Eigen::MatrixXd X(data.rows(), static_cast<Eigen::Index>(bundle.feature_names.size()));
    for (std::size_t j = 0; j < bundle.feature_names.size(); ++j) {
        auto it = std::find(cols.begin(), cols.end(), bundle.feature_names[j]);
        if (it == cols.end()) {
            throw samgp::IngestionError(fmt::format("{} has no column '{}'", data_path, bundle.feature_names[j]));
        }
        X.col(static_cast<Eigen::Index>(j)) = all.col(it - cols.begin());
    }
    auto y = bundle.predict(X);

    std::string out = "prediction\n";
    for (auto v : y) {
        out += fmt::format("{}\n", v);
    }
    if (out_path.empty()) {
        std::cout << out;
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) {
            throw samgp::Error(fmt::format("cannot write {}", out_path));
        }
        f << out;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app("Sharpness-regularized genetic programming for feature construction");
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "train on one dataset (optionally over several seeds)");
    samgp::ConfigFlags run_flags;
    run_flags.attach(*run);
    std::string run_seeds;
    run->add_option("--seeds", run_seeds, "batch over seeds: '1..5' or '1,2,7'");

    auto* compare = app.add_subcommand("compare", "compare measures over seeds with paired Wilcoxon tests");
    samgp::ConfigFlags cmp_flags;
    cmp_flags.attach(*compare);
    std::vector<std::string> datasets;
    std::string measures;
    std::string cmp_seeds = "1..5";
    std::string reference = "sam";
    compare->add_option("--datasets", datasets, "datasets to compare on (repeatable)");
    compare->add_option("--measures", measures, "comma-separated measures (default: all)");
    compare->add_option("--seeds", cmp_seeds, "seeds: '1..5' or '1,2,7'");
    compare->add_option("--reference", reference, "measure the others are compared against");

    auto* predict = app.add_subcommand("predict", "predict with a saved model.json");
    std::string model_path;
    std::string data_path;
    std::string out_path;
    predict->add_option("--model", model_path, "model.json written by run")->required();
    predict->add_option("--data", data_path, "CSV holding the model's input columns")->required();
    predict->add_option("--out", out_path, "output CSV (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return cmd_run(run_flags, run_seeds);
        }
        if (compare->parsed()) {
            return cmd_compare(cmp_flags, datasets, measures, cmp_seeds, reference);
        }
        return cmd_predict(model_path, data_path, out_path);
    } catch (const samgp::ConfigError& e) {
        fmt::print(stderr, "{}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
}
