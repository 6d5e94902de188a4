#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "samgp/data.hpp"
#include "samgp/evolution.hpp"

namespace CLI {
class App;
class Option;
} // namespace CLI

namespace samgp {

struct ExperimentConfig {
    std::string dataset;
    std::optional<std::string> target;
    SplitRule split { SplitRule::Fixed100 };
    double label_noise { 0.0 };
    std::uint64_t seed { 0 };
    EvolutionConfig evolution;
    std::size_t ensemble_size { 1 }; // 1 = single model; > 1 averages the archive
    std::string out { "samgp-out" };

    // Throws ConfigError listing every problem.
    void validate() const;
};

// Fully resolved configuration as a JSON object (the echo written next to run outputs).
std::string config_to_json(const ExperimentConfig& cfg);

// Keys are those written by config_to_json; absent keys keep their defaults. Unknown keys,
// ill-typed and invalid values are all reported in one ConfigError.
ExperimentConfig config_from_json(std::string_view text);

// Command-line flags for every configuration key plus --config FILE. Values given on the
// command line override the file.
class ConfigFlags {
public:
    void attach(CLI::App& app);
    [[nodiscard]] ExperimentConfig resolve() const;
    // Used when neither the file nor the flags name a dataset.
    void set_fallback_dataset(std::string path) { fallback_dataset_ = std::move(path); }

private:
    std::string config_file_;
    std::string dataset_positional_;
    std::string fallback_dataset_;
    std::map<std::string, std::string> values_;
    std::map<std::string, CLI::Option*> options_;
    CLI::Option* positional_ { nullptr };
};

// Parses `args` (without the program name) as the flags of a run.
ExperimentConfig parse_config(const std::vector<std::string>& args);

// "1..5" (inclusive) or a comma-separated list.
std::vector<std::uint64_t> parse_seed_list(const std::string& text);

} // namespace samgp
