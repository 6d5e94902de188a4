#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace samgp {

struct Dataset {
    Eigen::MatrixXd features; // n_instances x n_vars
    Eigen::VectorXd target;
    std::vector<std::string> names; // one per feature column
    std::string target_name;

    [[nodiscard]] Eigen::Index rows() const noexcept { return features.rows(); }
    [[nodiscard]] Eigen::Index vars() const noexcept { return features.cols(); }

    // Throws ContractError if the shape invariants do not hold.
    void validate() const;

    [[nodiscard]] Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

// Per-column z-score parameters. A constant column is recorded with stddev 1.
struct StandardizationStats {
    Eigen::VectorXd means;
    Eigen::VectorXd stddevs;

    static StandardizationStats fit(const Eigen::MatrixXd& m);
    static StandardizationStats identity(Eigen::Index cols);

    [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd& m) const;
    [[nodiscard]] Eigen::MatrixXd invert(const Eigen::MatrixXd& z) const;
};

enum class SplitRule { Fixed100, Ratio5050, Ratio8020 };

struct SplitSpec {
    SplitRule rule { SplitRule::Fixed100 };
    std::uint64_t seed { 0 };
    double label_noise_sigma { 0.0 }; // applied by prepare(), never by split()
};

struct Split {
    Dataset train;
    Dataset test;
    std::vector<Eigen::Index> train_rows;
    std::vector<Eigen::Index> test_rows;
    bool fell_back { false }; // fixed-100 requested on fewer than 200 rows
};

// CSV with a header row, comma delimiter and '.' decimals. The target defaults to the last column.
Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& target_column = std::nullopt);

Split split(const Dataset& d, const SplitSpec& s);

Dataset inject_label_noise(const Dataset& train, double sigma, std::uint64_t seed);

struct Standardized {
    Dataset train;
    Dataset test;
    StandardizationStats feature_stats;
    StandardizationStats target_stats; // single column; identity when targets are left raw
};

// Train statistics are the only statistics applied to the test partition.
Standardized standardize(const Dataset& train, const Dataset& test, bool standardize_target = false);

struct Prepared {
    Dataset train;
    Dataset test;
    StandardizationStats feature_stats;
    StandardizationStats target_stats;
    std::vector<Eigen::Index> train_rows;
    std::vector<Eigen::Index> test_rows;
    bool fell_back { false };
};

// split -> standardize (train statistics) -> label noise on the standardized training targets.
Prepared prepare(const Dataset& d, const SplitSpec& s, bool standardize_target = true);

std::string to_string(SplitRule r);
std::optional<SplitRule> parse_split_rule(const std::string& s);

} // namespace samgp
