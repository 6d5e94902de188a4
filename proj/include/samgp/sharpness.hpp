#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include <Eigen/Dense>

#include "samgp/individual.hpp"
#include "samgp/ridge.hpp"
#include "samgp/semantics_cache.hpp"

namespace samgp {

enum class NoiseFamily { Normal, Uniform, Laplace, Ensemble };

// How the unit noise is scaled before it is added to a node output:
//   Instance: psi + psi * sigma * eps   (per element, proportional to the semantics)
//   Batch:    psi + sd(psi) * sigma * eps
//   None:     psi + sigma * eps
enum class Adaptivity { Instance, Batch, None };

enum class AggregationKind { OneSam, MSam, NSam, Gmp };

struct Aggregation {
    AggregationKind kind { AggregationKind::OneSam };
    int m { 4 }; // batch size for MSam
};

struct PerturbationConfig {
    double sigma { 0.3 };
    int rounds { 10 };
    NoiseFamily noise { NoiseFamily::Normal };
    Adaptivity adaptivity { Adaptivity::Instance };
    Aggregation aggregation {};
    std::uint64_t seed { 0 }; // base for the per-round seeds

    // Throws ConfigError listing every violated constraint (sigma > 0, rounds >= 1, m >= 1).
    void validate() const;
    [[nodiscard]] std::uint64_t round_seed(int k) const noexcept;
};

struct SharpnessReport {
    Eigen::VectorXd per_instance; // S_i = max(0, max_k diff_ik)
    double aggregate { 0.0 };
};

// Unit-scale noise family used in a given round (Ensemble picks one of the three per round).
NoiseFamily round_noise_family(NoiseFamily configured, std::uint64_t round_seed) noexcept;

// Bottom-up evaluation with every node output (terminals and root included) perturbed.
// Noise is a pure function of (round seed, tree structure, node position), so the result is
// cacheable and identical trees in different individuals get identical perturbations.
// `cfg.sigma` is not validated here, which allows the sigma = 0 identity path.
Eigen::ArrayXd perturb_semantics(const FeatureTree& t, const Eigen::MatrixXd& X, const PerturbationConfig& cfg,
    std::uint64_t round_seed, SemanticsCache* cache = nullptr);

// K x n matrix of (perturbed squared error - unperturbed squared error).
Eigen::MatrixXd sharpness_diffs(std::span<const FeatureTree> trees, const FittedRidgeModel& model, const Eigen::MatrixXd& X,
    const Eigen::VectorXd& y, const PerturbationConfig& cfg, SemanticsCache* cache = nullptr);

// one_sam and m_sam keep the running max from zero; n_sam and gmp are the raw round statistics.
SharpnessReport aggregate_sharpness(const Eigen::MatrixXd& diffs, Aggregation agg);

SharpnessReport estimate_sharpness(std::span<const FeatureTree> trees, const FittedRidgeModel& model, const Eigen::MatrixXd& X,
    const Eigen::VectorXd& y, const PerturbationConfig& cfg, SemanticsCache* cache = nullptr);
SharpnessReport estimate_sharpness(const Individual& ind, const FittedRidgeModel& model, const Eigen::MatrixXd& X,
    const Eigen::VectorXd& y, const PerturbationConfig& cfg, SemanticsCache* cache = nullptr);

std::string to_string(NoiseFamily f);
std::string to_string(Adaptivity a);
std::string to_string(Aggregation a);
std::optional<NoiseFamily> parse_noise_family(const std::string& s);
std::optional<Adaptivity> parse_adaptivity(const std::string& s);
std::optional<AggregationKind> parse_aggregation(const std::string& s);

} // namespace samgp
