#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "samgp/error.hpp"
#include "samgp/random.hpp"
#include "samgp/ridge.hpp"

using namespace samgp;

namespace {

Eigen::MatrixXd gaussian(Rng& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0)
{
    std::normal_distribution<double> g(0.0, scale);
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            m(i, j) = g(rng);
        }
    }
    return m;
}

// Explicit leave-one-out: refit on the remaining rows of the same standardized design and
// centered target, then score the held-out row.
Eigen::VectorXd brute_force_loocv(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, double alpha)
{
    const auto n = phi.rows();
    const auto p = phi.cols();
    Eigen::RowVectorXd mean = phi.colwise().mean();
    Eigen::RowVectorXd sd = ((phi.rowwise() - mean).array().square().colwise().mean()).sqrt();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (!(sd(j) > 1e-12 * (1.0 + std::abs(mean(j))))) {
            sd(j) = 1.0;
        }
    }
    Eigen::MatrixXd z = (phi.rowwise() - mean).array().rowwise() / sd.array();
    Eigen::VectorXd yc = y.array() - y.mean();
    Eigen::VectorXd e(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::MatrixXd zi(n - 1, p);
        Eigen::VectorXd yi(n - 1);
        for (Eigen::Index r = 0, k = 0; r < n; ++r) {
            if (r != i) {
                zi.row(k) = z.row(r);
                yi(k) = yc(r);
                ++k;
            }
        }
        Eigen::MatrixXd a = zi.transpose() * zi + alpha * Eigen::MatrixXd::Identity(p, p);
        Eigen::VectorXd w = a.colPivHouseholderQr().solve(zi.transpose() * yi);
        double r = yc(i) - z.row(i).dot(w);
        e(i) = r * r;
    }
    return e;
}

} // namespace

TEST_CASE("constant feature gives the null model")
{
    Eigen::MatrixXd phi = Eigen::MatrixXd::Ones(5, 1);
    Eigen::VectorXd y(5);
    y << 1, 2, 3, 4, 10;
    auto m = fit_ridge(phi, y, 0.1);
    CHECK(m.weights(0) == 0.0);
    CHECK(m.target_mean == doctest::Approx(4.0));
    for (Eigen::Index i = 0; i < 5; ++i) {
        CHECK(m.fitted(i) == doctest::Approx(4.0));
        CHECK(m.loocv_errors(i) == doctest::Approx((y(i) - 4.0) * (y(i) - 4.0)));
    }
    auto pred = predict(m, Eigen::MatrixXd::Constant(3, 1, 7.0));
    CHECK((pred.array() == m.target_mean).all());
}

TEST_CASE("closed-form leave-one-out errors match explicit refitting")
{
    Rng rng(2024);
    const double alphas[] = { 1e-3, 0.1, 1.0 };
    for (int problem = 0; problem < 50; ++problem) {
        auto n = static_cast<Eigen::Index>(6 + uniform_index(rng, 25));
        auto p = static_cast<Eigen::Index>(1 + uniform_index(rng, 5));
        double alpha = alphas[problem % 3];
        auto phi = gaussian(rng, n, p, 3.0);
        Eigen::VectorXd y = gaussian(rng, n, 1).col(0) + phi.col(0);
        auto m = fit_ridge(phi, y, alpha);
        auto oracle = brute_force_loocv(phi, y, alpha);
        CHECK((m.loocv_errors - oracle).cwiseAbs().maxCoeff() < 1e-8);
        CHECK(m.mean_loocv_error() == doctest::Approx(oracle.mean()));
    }
}

TEST_CASE("12x3 problem against an independent solve")
{
    Rng rng(12);
    auto phi = gaussian(rng, 12, 3);
    Eigen::VectorXd y = gaussian(rng, 12, 1).col(0);
    auto m = fit_ridge(phi, y, 0.1);
    CHECK((m.loocv_errors - brute_force_loocv(phi, y, 0.1)).cwiseAbs().maxCoeff() < 1e-8);

    // augmented least squares: [Z; sqrt(a) I] w = [yc; 0]
    auto z = m.feature_stats.apply(phi);
    Eigen::MatrixXd aug(15, 3);
    aug << z, std::sqrt(0.1) * Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(15);
    rhs.head(12) = y.array() - y.mean();
    Eigen::VectorXd w = aug.householderQr().solve(rhs);
    CHECK((w - m.weights).cwiseAbs().maxCoeff() < 1e-10);

    auto new_phi = gaussian(rng, 4, 3);
    Eigen::VectorXd direct = (m.feature_stats.apply(new_phi) * w).array() + y.mean();
    CHECK((predict(m, new_phi) - direct).cwiseAbs().maxCoeff() < 1e-10);

    // a training row predicts its in-sample fitted value
    for (Eigen::Index i = 0; i < 12; ++i) {
        CHECK(predict(m, phi.row(i))(0) == doctest::Approx(m.fitted(i)).epsilon(1e-12));
    }
}

TEST_CASE("leverage bounds")
{
    Rng rng(3);
    for (int k = 0; k < 50; ++k) {
        auto n = static_cast<Eigen::Index>(3 + uniform_index(rng, 28));
        auto p = static_cast<Eigen::Index>(1 + uniform_index(rng, 5));
        auto phi = gaussian(rng, n, p);
        auto m = fit_ridge(phi, gaussian(rng, n, 1).col(0), 1e-3);
        CHECK((m.leverages.array() >= 0.0).all());
        CHECK((m.leverages.array() < 1.0).all());
        CHECK(m.leverages.sum() <= static_cast<double>(p) + 1e-12);
        CHECK((m.loocv_errors.array() >= 0.0).all());
    }
}

TEST_CASE("strong regularization approaches the null model")
{
    Rng rng(4);
    auto phi = gaussian(rng, 20, 3);
    Eigen::VectorXd y = phi.col(1) * 2.0 + gaussian(rng, 20, 1).col(0);
    auto m = fit_ridge(phi, y, 1e12);
    CHECK(m.weights.norm() < 1e-6);
    Eigen::ArrayXd centered = (y.array() - y.mean()).square();
    CHECK((m.loocv_errors.array() - centered).abs().maxCoeff() < 1e-6);

    CHECK(fit_ridge(phi, y, 1e6).mean_loocv_error() == doctest::Approx(centered.mean()).epsilon(1e-3));
    CHECK(fit_ridge(phi, y, 1e9).mean_loocv_error() == doctest::Approx(centered.mean()).epsilon(1e-6));
}

TEST_CASE("ridge preconditions")
{
    Eigen::MatrixXd phi = Eigen::MatrixXd::Ones(4, 2);
    Eigen::VectorXd y = Eigen::VectorXd::Ones(4);
    CHECK_THROWS_AS(fit_ridge(phi, y, 0.0), ContractError);
    CHECK_THROWS_AS(fit_ridge(Eigen::MatrixXd::Ones(1, 2), Eigen::VectorXd::Ones(1), 0.1), ContractError);
    phi(2, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(fit_ridge(phi, y, 0.1), EvaluationError);
    auto m = fit_ridge(Eigen::MatrixXd::Ones(4, 2), y, 0.1);
    CHECK_THROWS_AS(predict(m, Eigen::MatrixXd::Ones(2, 3)), ContractError);
}
