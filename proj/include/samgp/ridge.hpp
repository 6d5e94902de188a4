#pragma once

#include <Eigen/Dense>

#include "samgp/data.hpp"

namespace samgp {

// Ridge model over z-scored constructed features with a centered target.
//   w = (Z'Z + aI)^-1 Z'(y - ybar),  h = diag(Z (Z'Z + aI)^-1 Z'),
//   e = ((y - ybar - Zw) / (1 - h))^2
// The intercept is the training target mean, added back at prediction time.
struct FittedRidgeModel {
    Eigen::VectorXd weights;
    double target_mean { 0.0 };
    double alpha { 0.1 };
    StandardizationStats feature_stats;
    Eigen::VectorXd loocv_errors; // squared, one per training instance
    Eigen::VectorXd leverages;
    Eigen::VectorXd fitted; // in-sample predictions

    [[nodiscard]] Eigen::Index feature_count() const noexcept { return weights.size(); }
    [[nodiscard]] double mean_loocv_error() const { return loocv_errors.mean(); }
};

FittedRidgeModel fit_ridge(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, double alpha);

Eigen::VectorXd predict(const FittedRidgeModel& m, const Eigen::MatrixXd& phi_new);

} // namespace samgp
