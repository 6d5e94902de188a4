#include "samgp/ridge.hpp"

#include <cmath>

#include <fmt/core.h>

#include "samgp/error.hpp"

namespace samgp {

FittedRidgeModel fit_ridge(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, double alpha)
{
    const auto n = phi.rows();
    const auto p = phi.cols();
    if (n < 2 || p < 1) {
        throw ContractError(fmt::format("ridge fit needs n >= 2 and p >= 1, got {}x{}", n, p));
    }
    if (y.size() != n) {
        throw ContractError("ridge fit: target length does not match feature rows");
    }
    if (!(alpha > 0.0)) {
        throw ContractError(fmt::format("ridge alpha must be positive, got {}", alpha));
    }
    if (!phi.allFinite()) {
        throw EvaluationError("constructed features contain non-finite values");
    }

    FittedRidgeModel m;
    m.alpha = alpha;
    m.feature_stats = StandardizationStats::fit(phi);
    const Eigen::MatrixXd z = m.feature_stats.apply(phi);
    m.target_mean = y.mean();
    const Eigen::VectorXd yc = y.array() - m.target_mean;

    Eigen::MatrixXd gram = Eigen::MatrixXd::Identity(p, p) * alpha;
    gram.selfadjointView<Eigen::Lower>().rankUpdate(z.transpose());
    gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    if (ldlt.info() != Eigen::Success) {
        throw EvaluationError("ridge normal equations could not be factorized");
    }

    m.weights = ldlt.solve(z.transpose() * yc);
    // h_i = z_i' (Z'Z + aI)^-1 z_i
    const Eigen::MatrixXd solved = ldlt.solve(z.transpose()); // p x n
    m.leverages = (z.array() * solved.transpose().array()).rowwise().sum();

    const Eigen::VectorXd fitted_c = z * m.weights;
    m.fitted = fitted_c.array() + m.target_mean;
    m.loocv_errors = ((yc - fitted_c).array() / (1.0 - m.leverages.array())).square();
    if (!m.loocv_errors.allFinite()) {
        throw EvaluationError("leave-one-out errors are not finite");
    }
    return m;
}

Eigen::VectorXd predict(const FittedRidgeModel& m, const Eigen::MatrixXd& phi_new)
{
    if (phi_new.cols() != m.weights.size()) {
        throw ContractError(fmt::format("model expects {} features, got {}", m.weights.size(), phi_new.cols()));
    }
    Eigen::VectorXd out = m.feature_stats.apply(phi_new) * m.weights;
    return out.array() + m.target_mean;
}

} // namespace samgp
