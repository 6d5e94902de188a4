#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "samgp/archive.hpp"
#include "samgp/complexity.hpp"
#include "samgp/individual.hpp"
#include "samgp/semantics_cache.hpp"
#include "samgp/sharpness.hpp"
#include "samgp/variation.hpp"

namespace samgp {

struct EvolutionConfig {
    int population { 200 };
    int generations { 100 };
    double crossover_rate { 0.9 };
    double mutation_rate { 0.1 };
    double tree_add_rate { 0.5 };
    double tree_delete_rate { 0.5 };
    DepthRange init_depth { 0, 3 };
    int initial_trees { 1 };
    double alpha { 0.1 };
    MeasureKind measure { MeasureKind::Sam };
    PerturbationConfig perturbation {};
    std::size_t archive_size { 1 };
    bool cache { true };
    std::size_t cache_capacity { SemanticsCache::kDefaultCapacity };
    bool wcrv_raw_inputs { false };
    bool reduction { true }; // sharpness reduction for test-time predictions
    int threads { 1 };
    std::uint64_t seed { 0 };

    // Throws ConfigError listing every problem.
    void validate() const;
};

struct GenerationRecord {
    int generation { 0 };
    double best_o1 { 0.0 }; // population minimum
    double best_o2 { 0.0 }; // population minimum
    double archive_score { 0.0 };
    double train_r2 { 0.0 }; // current final model
    double test_r2 { 0.0 };  // NaN without test data
    double wall_seconds { 0.0 };
};

struct EvolutionResult {
    std::vector<GenerationRecord> records;
    std::vector<Individual> population;
    Archive archive { 1 };
    std::vector<Individual> front;         // nondominated members of the final population
    std::vector<Individual> final_members; // the returned model (one member unless ensembling)
    std::uint64_t cache_hits { 0 };
    std::uint64_t cache_misses { 0 };
};

// Everything an individual's evaluation reads. Pool-level measures (gc, rc) are applied by
// the loop after the per-individual part.
struct EvaluationContext {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& y;
    const EvolutionConfig& cfg;
    SemanticsCache* cache { nullptr };
    const Eigen::VectorXd* input_distances { nullptr }; // iodc only
};

// Fits the ridge model and computes o1 and the per-individual o2. Never throws for a bad
// individual: failures get the worst-objective sentinel.
Evaluation evaluate_individual(const Individual& ind, const EvaluationContext& ctx);

// Recomputes o2 for measures defined over a whole pool (gc, rc); no-op for the others.
void apply_pool_measure(std::vector<Individual>& pool, const EvaluationContext& ctx, int generation);

// Final model members from the current state: archive members for sam (or whenever an
// ensemble is requested), otherwise the knee of the population's first front.
std::vector<Individual> select_final_members(const std::vector<Individual>& population, const Archive& archive,
    const EvolutionConfig& cfg);

struct TestData {
    const Eigen::MatrixXd& X;
    const Eigen::VectorXd& y;
};

EvolutionResult evolve(const EvolutionConfig& cfg, const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
    const std::optional<TestData>& test = std::nullopt);

} // namespace samgp
