#pragma once

#include <optional>
#include <string>
#include <vector>

#include "samgp/ridge.hpp"
#include "samgp/tree.hpp"

namespace samgp {

// Objective values assigned to individuals whose evaluation failed.
inline constexpr double kWorstObjective = 1e15;

struct ObjectiveVector {
    double o1 { 0.0 }; // mean leave-one-out squared error
    double o2 { 0.0 }; // sharpness or baseline complexity

    [[nodiscard]] double sum() const noexcept { return o1 + o2; }
    friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

struct Evaluation {
    ObjectiveVector objectives;
    Eigen::VectorXd case_errors; // per-instance leave-one-out squared errors
    std::optional<FittedRidgeModel> model;
    double tikhonov { 0.0 };
    bool failed { false };
};

// A set of 1..10 feature trees. Any structural change drops the cached evaluation.
class Individual {
public:
    Individual() = default;
    explicit Individual(std::vector<FeatureTree> trees);

    [[nodiscard]] const std::vector<FeatureTree>& trees() const noexcept { return trees_; }
    [[nodiscard]] std::size_t tree_count() const noexcept { return trees_.size(); }

    void set_trees(std::vector<FeatureTree> trees);
    void set_tree(std::size_t index, FeatureTree tree);

    [[nodiscard]] const std::optional<Evaluation>& evaluation() const noexcept { return eval_; }
    [[nodiscard]] std::optional<Evaluation>& evaluation() noexcept { return eval_; }
    [[nodiscard]] bool evaluated() const noexcept { return eval_.has_value(); }
    [[nodiscard]] const ObjectiveVector& objectives() const; // ContractError if unevaluated
    void set_evaluation(Evaluation e) { eval_ = std::move(e); }

    [[nodiscard]] std::size_t node_count() const noexcept;
    [[nodiscard]] std::string to_string() const; // trees' s-expressions joined by " | "
    [[nodiscard]] std::string structural_key() const;

    friend bool operator==(const Individual& a, const Individual& b) noexcept { return a.trees_ == b.trees_; }

private:
    static void check_count(std::size_t n);

    std::vector<FeatureTree> trees_;
    std::optional<Evaluation> eval_;
};

} // namespace samgp
