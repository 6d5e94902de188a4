#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "samgp/individual.hpp"
#include "samgp/random.hpp"
#include "samgp/ridge.hpp"

namespace samgp {

// Second objective used by the evolutionary loop.
enum class MeasureKind { Sam, Pp, Tk, Gc, Rc, Wcrv, Iodc, None };

std::string to_string(MeasureKind k);
std::optional<MeasureKind> parse_measure(const std::string& s);
std::vector<MeasureKind> all_measures();

// Parsimony pressure: total node count across all trees.
double parsimony(const Individual& ind) noexcept;

// Zero-order Tikhonov on the centered output scale: mean of (yhat - ybar)^2.
double tikhonov(const FittedRidgeModel& m);

// Grand complexity: front rank of each (parsimony, tikhonov) pair.
std::vector<int> grand_complexity(std::span<const double> pp, std::span<const double> tk);

// Rademacher estimate: fit the ridge model to -zeta * y and return mean(zeta_i * (f_i - y_i)^2).
double rademacher(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, const Eigen::VectorXd& zeta, double alpha);
// Score from already fitted outputs f (the part after the fit).
double rademacher_score(const Eigen::VectorXd& fitted, const Eigen::VectorXd& y, const Eigen::VectorXd& zeta);
// zeta ~ uniform{-1, +1}^n
Eigen::VectorXd rademacher_signs(Eigen::Index n, Rng& rng);

// Normalized mutual information over an equal-frequency B x B grid with B = ceil(n^0.3)
// capped at 8; in [0, 1]. A constant vector scores 0.
double mic_approx(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Variables with MIC(., y) at or above the median contribute MIC(., y) * MIC(., r), the others
// 1 - MIC(., y). Summed over variables.
double wcrv_from_mic(std::span<const double> mic_y, std::span<const double> mic_r);

// `vars` holds one variable per column (constructed features, or raw inputs if preferred).
double wcrv(const Eigen::MatrixXd& vars, const Eigen::VectorXd& y, const Eigen::VectorXd& fitted);

// Upper-triangular pairwise Euclidean distances between the rows of X, row-major (i < j).
Eigen::VectorXd pairwise_distances(const Eigen::MatrixXd& X);

// Pearson correlation between input distances and |yhat_i - yhat_j|; 0 when either side
// has zero variance.
double iodc_correlation(const Eigen::VectorXd& input_distances, const Eigen::VectorXd& yhat);
// Objective form (smaller is better).
inline double iodc(const Eigen::VectorXd& input_distances, const Eigen::VectorXd& yhat)
{
    return -iodc_correlation(input_distances, yhat);
}

} // namespace samgp
