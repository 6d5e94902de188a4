#include "samgp/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "samgp/error.hpp"

namespace samgp {

using nlohmann::json;

namespace {

struct KeyInfo {
    const char* key;
    const char* help;
};

// JSON key -> flag "--" + key with '_' replaced by '-'
constexpr KeyInfo kKeys[] = {
    { "dataset", "CSV file with a header row" },
    { "target", "target column name (default: last column)" },
    { "split", "fixed-100 | ratio-50-50 | ratio-80-20" },
    { "label_noise", "stddev of Gaussian noise added to standardized training targets" },
    { "seed", "master seed" },
    { "population", "population size" },
    { "generations", "number of generations" },
    { "crossover_rate", "crossover probability" },
    { "mutation_rate", "mutation probability" },
    { "tree_add_rate", "tree addition probability" },
    { "tree_delete_rate", "tree deletion probability" },
    { "initial_trees", "trees per initial individual" },
    { "alpha", "ridge regularization strength" },
    { "measure", "sam | pp | tk | gc | rc | wcrv | iodc | none" },
    { "sigma", "perturbation standard deviation" },
    { "rounds", "perturbation rounds K" },
    { "noise", "normal | uniform | laplace | ensemble" },
    { "adaptivity", "instance | batch | none" },
    { "aggregation", "one-sam | m-sam | n-sam | gmp" },
    { "m_batch", "batch size M for m-sam" },
    { "ensemble_size", "archive size averaged at prediction time (1 = single model)" },
    { "cache", "cache perturbed semantics (true | false)" },
    { "cache_capacity", "cache entries" },
    { "reduction", "sharpness reduction at prediction time (true | false)" },
    { "wcrv_raw_inputs", "score raw inputs instead of constructed features in wcrv (true | false)" },
    { "threads", "evaluation threads" },
    { "out", "output directory" },
};

std::string flag_name(std::string_view key)
{
    std::string f = "--";
    for (char c : key) {
        f.push_back(c == '_' ? '-' : c);
    }
    return f;
}

// Reads typed values out of a JSON object, collecting problems instead of throwing.
class Reader {
public:
    explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

    void text(const json& v, const char* key, std::string& out)
    {
        if (v.is_string()) {
            out = v.get<std::string>();
        } else {
            problem(key, v, "a string");
        }
    }

    template <typename T>
    void number(const json& v, const char* key, T& out)
    {
        if (v.is_number()) {
            if constexpr (std::is_floating_point_v<T>) {
                out = v.get<T>();
                return;
            } else {
                if (v.is_number_integer() || v.is_number_unsigned()) {
                    if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0 || std::is_signed_v<T>) {
                        out = v.get<T>();
                        return;
                    }
                }
            }
        } else if (v.is_string()) {
            auto s = v.get<std::string>();
            T parsed {};
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), parsed);
            if (ec == std::errc() && p == s.data() + s.size()) {
                out = parsed;
                return;
            }
        }
        problem(key, v, std::is_floating_point_v<T> ? "a number" : "an integer");
    }

    void boolean(const json& v, const char* key, bool& out)
    {
        if (v.is_boolean()) {
            out = v.get<bool>();
        } else if (v.is_string() && (v == "true" || v == "false")) {
            out = v == "true";
        } else {
            problem(key, v, "true or false");
        }
    }

    template <typename T, typename Parse>
    void choice(const json& v, const char* key, T& out, Parse parse, const char* allowed)
    {
        if (v.is_string()) {
            if (auto p = parse(v.get<std::string>())) {
                out = *p;
                return;
            }
        }
        problem(key, v, allowed);
    }

private:
    void problem(const char* key, const json& v, const char* expected)
    {
        problems_.push_back(fmt::format("{}: expected {}, got {}", key, expected, v.dump()));
    }

    std::vector<std::string>& problems_;
};

ExperimentConfig from_object(const json& obj)
{
    if (!obj.is_object()) {
        throw ConfigError("configuration must be a JSON object");
    }
    ExperimentConfig cfg;
    auto& evo = cfg.evolution;
    auto& pert = evo.perturbation;
    std::vector<std::string> problems;
    Reader r(problems);
    for (const auto& [key, v] : obj.items()) {
        const char* k = key.c_str();
        if (key == "dataset") {
            r.text(v, k, cfg.dataset);
        } else if (key == "target") {
            if (v.is_null()) {
                cfg.target.reset();
            } else {
                std::string t;
                r.text(v, k, t);
                cfg.target = t;
            }
        } else if (key == "split") {
            r.choice(v, k, cfg.split, parse_split_rule, "fixed-100, ratio-50-50 or ratio-80-20");
        } else if (key == "label_noise") {
            r.number(v, k, cfg.label_noise);
        } else if (key == "seed") {
            r.number(v, k, cfg.seed);
        } else if (key == "population") {
            r.number(v, k, evo.population);
        } else if (key == "generations") {
            r.number(v, k, evo.generations);
        } else if (key == "crossover_rate") {
            r.number(v, k, evo.crossover_rate);
        } else if (key == "mutation_rate") {
            r.number(v, k, evo.mutation_rate);
        } else if (key == "tree_add_rate") {
            r.number(v, k, evo.tree_add_rate);
        } else if (key == "tree_delete_rate") {
            r.number(v, k, evo.tree_delete_rate);
        } else if (key == "initial_trees") {
            r.number(v, k, evo.initial_trees);
        } else if (key == "alpha") {
            r.number(v, k, evo.alpha);
        } else if (key == "measure") {
            r.choice(v, k, evo.measure, parse_measure, "sam, pp, tk, gc, rc, wcrv, iodc or none");
        } else if (key == "sigma") {
            r.number(v, k, pert.sigma);
        } else if (key == "rounds") {
            r.number(v, k, pert.rounds);
        } else if (key == "noise") {
            r.choice(v, k, pert.noise, parse_noise_family, "normal, uniform, laplace or ensemble");
        } else if (key == "adaptivity") {
            r.choice(v, k, pert.adaptivity, parse_adaptivity, "instance, batch or none");
        } else if (key == "aggregation") {
            r.choice(v, k, pert.aggregation.kind, parse_aggregation, "one-sam, m-sam, n-sam or gmp");
        } else if (key == "m_batch") {
            r.number(v, k, pert.aggregation.m);
        } else if (key == "ensemble_size") {
            r.number(v, k, cfg.ensemble_size);
        } else if (key == "cache") {
            r.boolean(v, k, evo.cache);
        } else if (key == "cache_capacity") {
            r.number(v, k, evo.cache_capacity);
        } else if (key == "reduction") {
            r.boolean(v, k, evo.reduction);
        } else if (key == "wcrv_raw_inputs") {
            r.boolean(v, k, evo.wcrv_raw_inputs);
        } else if (key == "threads") {
            r.number(v, k, evo.threads);
        } else if (key == "out") {
            r.text(v, k, cfg.out);
        } else {
            problems.push_back(fmt::format("unknown configuration key '{}'", key));
        }
    }
    evo.archive_size = cfg.ensemble_size;
    evo.seed = cfg.seed;
    try {
        cfg.validate();
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        // flatten the nested list into ours
        std::istringstream lines(msg);
        std::string line;
        std::getline(lines, line);
        while (std::getline(lines, line)) {
            auto pos = line.find("- ");
            problems.push_back(pos == std::string::npos ? line : line.substr(pos + 2));
        }
    }
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) {
            msg += "\n  - " + p;
        }
        throw ConfigError(msg);
    }
    return cfg;
}

} // namespace

void ExperimentConfig::validate() const
{
    std::vector<std::string> problems;
    if (dataset.empty()) {
        problems.emplace_back("dataset path is required");
    }
    if (!(label_noise >= 0.0) || !std::isfinite(label_noise)) {
        problems.push_back(fmt::format("label_noise must be >= 0 (got {})", label_noise));
    }
    if (ensemble_size < 1) {
        problems.emplace_back("ensemble_size must be >= 1");
    }
    if (out.empty()) {
        problems.emplace_back("out must name a directory");
    }
    try {
        evolution.validate();
    } catch (const ConfigError& e) {
        std::istringstream lines(e.what());
        std::string line;
        std::getline(lines, line);
        while (std::getline(lines, line)) {
            auto pos = line.find("- ");
            problems.push_back(pos == std::string::npos ? line : line.substr(pos + 2));
        }
    }
    if (!problems.empty()) {
        std::string msg = "invalid configuration:";
        for (const auto& p : problems) {
            msg += "\n  - " + p;
        }
        throw ConfigError(msg);
    }
}

std::string config_to_json(const ExperimentConfig& cfg)
{
    const auto& evo = cfg.evolution;
    const auto& pert = evo.perturbation;
    json j = {
        { "dataset", cfg.dataset },
        { "target", cfg.target ? json(*cfg.target) : json(nullptr) },
        { "split", to_string(cfg.split) },
        { "label_noise", cfg.label_noise },
        { "seed", cfg.seed },
        { "population", evo.population },
        { "generations", evo.generations },
        { "crossover_rate", evo.crossover_rate },
        { "mutation_rate", evo.mutation_rate },
        { "tree_add_rate", evo.tree_add_rate },
        { "tree_delete_rate", evo.tree_delete_rate },
        { "initial_trees", evo.initial_trees },
        { "alpha", evo.alpha },
        { "measure", to_string(evo.measure) },
        { "sigma", pert.sigma },
        { "rounds", pert.rounds },
        { "noise", to_string(pert.noise) },
        { "adaptivity", to_string(pert.adaptivity) },
        { "aggregation", to_string(pert.aggregation) },
        { "m_batch", pert.aggregation.m },
        { "ensemble_size", cfg.ensemble_size },
        { "cache", evo.cache },
        { "cache_capacity", evo.cache_capacity },
        { "reduction", evo.reduction },
        { "wcrv_raw_inputs", evo.wcrv_raw_inputs },
        { "threads", evo.threads },
        { "out", cfg.out },
    };
    return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(std::string_view text)
{
    json obj;
    try {
        obj = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(fmt::format("configuration is not valid JSON: {}", e.what()));
    }
    return from_object(obj);
}

void ConfigFlags::attach(CLI::App& app)
{
    app.add_option("--config", config_file_, "JSON configuration file; command-line flags override it");
    positional_ = app.add_option("dataset_path", dataset_positional_, "CSV file (same as --dataset)");
    for (const auto& k : kKeys) {
        options_[k.key] = app.add_option(flag_name(k.key), values_[k.key], k.help);
    }
}

ExperimentConfig ConfigFlags::resolve() const
{
    json obj = json::object();
    if (!config_file_.empty()) {
        std::ifstream in(config_file_, std::ios::binary);
        if (!in) {
            throw ConfigError(fmt::format("cannot open configuration file {}", config_file_));
        }
        std::stringstream ss;
        ss << in.rdbuf();
        try {
            obj = json::parse(ss.str());
        } catch (const json::exception& e) {
            throw ConfigError(fmt::format("{} is not valid JSON: {}", config_file_, e.what()));
        }
        if (!obj.is_object()) {
            throw ConfigError(fmt::format("{} must hold a JSON object", config_file_));
        }
    }
    if (positional_ != nullptr && positional_->count() > 0) {
        obj["dataset"] = dataset_positional_;
    }
    for (const auto& [key, opt] : options_) {
        if (opt->count() > 0) {
            obj[key] = values_.at(key);
        }
    }
    if (!obj.contains("dataset") && !fallback_dataset_.empty()) {
        obj["dataset"] = fallback_dataset_;
    }
    return from_object(obj);
}

ExperimentConfig parse_config(const std::vector<std::string>& args)
{
    CLI::App app("samgp run");
    ConfigFlags flags;
    flags.attach(app);
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        throw ConfigError(fmt::format("usage error: {}", e.what()));
    }
    return flags.resolve();
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text)
{
    auto parse_one = [&](std::string_view s) {
        std::uint64_t v = 0;
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
            throw ConfigError(fmt::format("bad seed '{}' in '{}'", s, text));
        }
        return v;
    };
    std::vector<std::uint64_t> out;
    if (auto dots = text.find(".."); dots != std::string::npos) {
        auto lo = parse_one(std::string_view(text).substr(0, dots));
        auto hi = parse_one(std::string_view(text).substr(dots + 2));
        if (hi < lo) {
            throw ConfigError(fmt::format("empty seed range '{}'", text));
        }
        for (auto s = lo; s <= hi; ++s) {
            out.push_back(s);
        }
        return out;
    }
    std::string_view rest(text);
    while (!rest.empty()) {
        auto comma = rest.find(',');
        out.push_back(parse_one(rest.substr(0, comma)));
        if (comma == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(comma + 1);
    }
    if (out.empty()) {
        throw ConfigError("empty seed list");
    }
    return out;
}

} // namespace samgp
