#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "samgp/individual.hpp"
#include "samgp/ridge.hpp"
#include "samgp/tree.hpp"

namespace samgp {

// A tree plus the sorted training-time outputs of each internal node (empty for terminals).
struct SnapshotTree {
    FeatureTree tree;
    std::vector<std::vector<double>> stored; // indexed by prefix position
};

SnapshotTree snapshot(const FeatureTree& t, const Eigen::MatrixXd& X_train);
std::vector<SnapshotTree> snapshot(const Individual& ind, const Eigen::MatrixXd& X_train);

// Nearest element of a nonempty ascending vector. Binary search for the insertion point,
// clipped to [1, size - 1], then the left neighbour wins unless the right one is strictly closer.
double nearest_stored(const std::vector<double>& sorted, double query);

// Evaluation where each internal node output is replaced by its nearest stored training value
// before it feeds the parent.
double reduce_sharpness_eval(const SnapshotTree& t, const Eigen::RowVectorXd& x);
Eigen::ArrayXd reduce_sharpness_eval(const SnapshotTree& t, const Eigen::MatrixXd& X);

struct PredictionBounds {
    double y_min { 0.0 };
    double y_max { 0.0 };

    static PredictionBounds from_targets(const Eigen::VectorXd& y_train);
};

Eigen::VectorXd bounded_predict(const Eigen::VectorXd& y_hat, const PredictionBounds& b);

// One fitted feature set ready for test-time prediction.
struct ModelMember {
    std::vector<SnapshotTree> trees;
    FittedRidgeModel model;
};

ModelMember make_member(const Individual& ind, const Eigen::MatrixXd& X_train);

// Feature construction (reduced or raw) -> ridge -> bounds.
Eigen::VectorXd member_predict(const ModelMember& m, const Eigen::MatrixXd& X, const PredictionBounds& b, bool reduce = true);

// Unweighted mean of member predictions. Throws ContractError for an empty list.
Eigen::VectorXd ensemble_predict(std::span<const ModelMember> members, const Eigen::MatrixXd& X, const PredictionBounds& b,
    bool reduce = true);

// Coefficient of determination; a constant y_true gives 0 and a logged warning.
double r2(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred);

} // namespace samgp
