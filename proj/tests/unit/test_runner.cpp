#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "samgp/config.hpp"
#include "samgp/error.hpp"
#include "samgp/experiment.hpp"
#include "samgp/wilcoxon.hpp"

using namespace samgp;
namespace fs = std::filesystem;

namespace {

std::string diabetes() { return (fs::path(SAMGP_DATA_DIR) / "diabetes.csv").string(); }

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name)
{
    auto dir = fs::temp_directory_path() / ("samgp-test-" + name);
    fs::remove_all(dir);
    return dir;
}

ExperimentConfig tiny(const fs::path& out)
{
    ExperimentConfig c;
    c.dataset = diabetes();
    c.evolution.population = 8;
    c.evolution.generations = 3;
    c.evolution.perturbation.rounds = 3;
    c.out = out.string();
    return c;
}

std::string config_error(const std::vector<std::string>& args)
{
    try {
        parse_config(args);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST_CASE("configuration defaults")
{
    auto c = parse_config({ "data.csv" });
    CHECK(c.dataset == "data.csv");
    CHECK(c.split == SplitRule::Fixed100);
    CHECK(c.label_noise == 0.0);
    CHECK(c.evolution.population == 200);
    CHECK(c.evolution.generations == 100);
    CHECK(c.evolution.crossover_rate == 0.9);
    CHECK(c.evolution.mutation_rate == 0.1);
    CHECK(c.evolution.tree_add_rate == 0.5);
    CHECK(c.evolution.tree_delete_rate == 0.5);
    CHECK(c.evolution.initial_trees == 1);
    CHECK(c.evolution.alpha == 0.1);
    CHECK(c.evolution.measure == MeasureKind::Sam);
    CHECK(c.evolution.perturbation.sigma == 0.3);
    CHECK(c.evolution.perturbation.rounds == 10);
    CHECK(c.evolution.perturbation.noise == NoiseFamily::Normal);
    CHECK(c.evolution.perturbation.adaptivity == Adaptivity::Instance);
    CHECK(c.evolution.perturbation.aggregation.kind == AggregationKind::OneSam);
    CHECK(c.ensemble_size == 1);
    CHECK(c.evolution.cache);
    CHECK(c.evolution.reduction);
}

TEST_CASE("configuration flags")
{
    CHECK(parse_config({ "d.csv", "--measure", "pp" }).evolution.measure == MeasureKind::Pp);
    CHECK(parse_config({ "--dataset", "d.csv", "--split", "ratio-80-20" }).split == SplitRule::Ratio8020);
    CHECK(parse_config({ "d.csv", "--cache", "false" }).evolution.cache == false);

    auto sigma = config_error({ "d.csv", "--sigma", "-1" });
    CHECK(sigma.find("sigma") != std::string::npos);
    CHECK(config_error({ "d.csv", "--bogus", "1" }).find("usage error") != std::string::npos);
    CHECK(config_error({}).find("dataset") != std::string::npos);

    auto many = config_error({ "d.csv", "--sigma", "0", "--population", "1", "--measure", "xyz" });
    CHECK(many.find("sigma") != std::string::npos);
    CHECK(many.find("population") != std::string::npos);
    CHECK(many.find("measure") != std::string::npos);
}

TEST_CASE("configuration file with command-line override")
{
    auto dir = scratch("cfg");
    fs::create_directories(dir);
    auto file = dir / "c.json";
    {
        std::ofstream out(file);
        out << R"({"dataset": "x.csv", "measure": "tk", "population": 40, "sigma": 0.1})";
    }
    auto c = parse_config({ "--config", file.string(), "--population", "50" });
    CHECK(c.dataset == "x.csv");
    CHECK(c.evolution.measure == MeasureKind::Tk);
    CHECK(c.evolution.population == 50);
    CHECK(c.evolution.perturbation.sigma == 0.1);

    {
        std::ofstream out(file);
        out << R"({"dataset": "x.csv", "colour": "red"})";
    }
    CHECK(config_error({ "--config", file.string() }).find("colour") != std::string::npos);

    auto echoed = config_from_json(config_to_json(c));
    CHECK(config_to_json(echoed) == config_to_json(c));
    fs::remove_all(dir);
}

TEST_CASE("seed lists")
{
    CHECK(parse_seed_list("1..5") == std::vector<std::uint64_t> { 1, 2, 3, 4, 5 });
    CHECK(parse_seed_list("1,2,7") == std::vector<std::uint64_t> { 1, 2, 7 });
    CHECK(parse_seed_list("4") == std::vector<std::uint64_t> { 4 });
    CHECK_THROWS_AS(parse_seed_list("5..1"), ConfigError);
    CHECK_THROWS_AS(parse_seed_list("a,b"), ConfigError);
    CHECK_THROWS_AS(parse_seed_list(""), ConfigError);
}

TEST_CASE("a run writes deterministic outputs")
{
    auto dir = scratch("run");
    auto cfg = tiny(dir / "a");
    auto a = run_experiment(cfg);
    emit_metrics(a, dir / "a");
    cfg.out = (dir / "b").string();
    auto b = run_experiment(cfg);
    emit_metrics(b, dir / "b");

    for (const char* f : { "generations.csv", "summary.json", "model.json" }) {
        CAPTURE(f);
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
    CHECK(fs::exists(dir / "a" / "config.json"));
    CHECK(fs::exists(dir / "a" / "timing.json"));

    auto csv = slurp(dir / "a" / "generations.csv");
    CHECK(csv.rfind("generation,best_o1,best_o2,archive_score,train_r2,test_r2\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

    auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
    CHECK(summary["test_r2"].get<double>() == doctest::Approx(a.test_r2));
    CHECK(summary["train_rows"].get<int>() == 100);
    CHECK(summary["test_rows"].get<int>() == 342);

    // the saved model predicts the held-out rows exactly as the run did
    auto model = load_bundle(dir / "a" / "model.json");
    auto data = load_csv(diabetes());
    CHECK(model.predict(data.features).allFinite());
    fs::remove_all(dir);
}

TEST_CASE("batch summary and long format")
{
    auto dir = scratch("batch");
    auto cfg = tiny(dir);
    cfg.evolution.generations = 2;
    auto batch = run_batch(cfg, parse_seed_list("1..5"));
    CHECK(batch.runs.size() == 5);

    std::vector<double> tests;
    for (int s = 1; s <= 5; ++s) {
        auto j = nlohmann::json::parse(slurp(dir / ("seed-" + std::to_string(s)) / "summary.json"));
        tests.push_back(j["test_r2"].get<double>());
    }
    std::sort(tests.begin(), tests.end());
    auto agg = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(agg["median_test_r2"].get<double>() == doctest::Approx(tests[2]));

    auto long_csv = slurp(dir / "long.csv");
    CHECK(long_csv.rfind("dataset,measure,seed,generation,", 0) == 0);
    CHECK(std::count(long_csv.begin(), long_csv.end(), '\n') == 1 + 5 * 2);
    fs::remove_all(dir);
}

TEST_CASE("wilcoxon signed-rank test")
{
    std::vector<double> zero(6, 0.0);
    std::vector<double> up { 1, 2, 3, 4, 5, 6 };
    auto r = wilcoxon_signed_rank(up, zero);
    CHECK(r.exact);
    CHECK(r.p_value == doctest::Approx(0.03125));
    CHECK(r.t_plus == 21.0);
    CHECK(compare_paired(up, zero) == Outcome::Win);
    CHECK(compare_paired(zero, up) == Outcome::Loss);

    std::vector<double> mixed { 1, -2, 3, 4, -5, 6 };
    CHECK(wilcoxon_signed_rank(mixed, zero).p_value == doctest::Approx(0.5625));
    std::vector<double> mixed8 { 1, 2, -3, 4, 5, -6, 7, -8 };
    CHECK(wilcoxon_signed_rank(mixed8, std::vector<double>(8, 0.0)).p_value == doctest::Approx(0.9453125));

    // 40 pairs with tied magnitudes take the normal approximation
    std::vector<double> big { 0.43, 0.17, 0.94, 0.4, -0.24, 0.66, 1.6, 1.25, -0.4, -0.97, -0.32, 0.34, -2.03, 0.08,
        -0.95, -0.43, -0.24, -0.02, 0.71, 1.34, 0.17, 1.67, -0.37, 0.65, 1.2, 0.39, -0.44, -0.62, -0.16, 0.52, -0.71,
        0.09, 0.14, 0.84, 0.51, 0.66, -0.35, 0.17, 1.08, 1.79 };
    auto approx = wilcoxon_signed_rank(big, std::vector<double>(big.size(), 0.0));
    CHECK_FALSE(approx.exact);
    CHECK(approx.p_value == doctest::Approx(0.06263003224339857).epsilon(1e-9));

    std::vector<double> same { 0.1, 0.2, 0.3 };
    auto tie = wilcoxon_signed_rank(same, same);
    CHECK(tie.n == 0);
    CHECK(tie.p_value == 1.0);
    CHECK(compare_paired(same, same) == Outcome::Tie);
}

TEST_CASE("comparison survives a constant target")
{
    auto dir = scratch("cmp");
    fs::create_directories(dir);
    auto csv = dir / "flat.csv";
    {
        std::ofstream out(csv);
        out << "a,b,y\n";
        for (int i = 0; i < 30; ++i) {
            out << i << "," << (i * 7) % 11 << ",0\n";
        }
    }
    auto cfg = tiny(dir / "out");
    cfg.evolution.generations = 2;
    auto rep = compare_measures(cfg, { csv.string() }, { MeasureKind::Sam, MeasureKind::Rc }, { 1, 2 }, MeasureKind::Sam);
    CHECK(rep.pairs.size() == 1);
    CHECK(rep.pairs[0].outcome == Outcome::Tie);
    CHECK(fs::exists(dir / "out" / "comparison.csv"));
    CHECK(comparison_table_csv(rep).rfind("reference,other,win,tie,loss\n", 0) == 0);
    fs::remove_all(dir);
}
