#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "samgp/complexity.hpp"
#include "samgp/error.hpp"
#include "samgp/random.hpp"
#include "samgp/selection.hpp"
#include "samgp/variation.hpp"

using namespace samgp;

namespace {

std::size_t symbol_count(const std::string& s)
{
    std::string spaced;
    for (char c : s) {
        spaced += (c == '(' || c == ')' || c == '|') ? ' ' : c;
    }
    std::istringstream in(spaced);
    std::size_t n = 0;
    std::string tok;
    while (in >> tok) {
        ++n;
    }
    return n;
}

// Pearson over explicit index pairs.
double pair_oracle(const Eigen::MatrixXd& X, const Eigen::VectorXd& yhat)
{
    std::vector<double> a;
    std::vector<double> b;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        for (Eigen::Index j = 0; j < X.rows(); ++j) {
            if (i < j) {
                double s = 0.0;
                for (Eigen::Index c = 0; c < X.cols(); ++c) {
                    s += (X(i, c) - X(j, c)) * (X(i, c) - X(j, c));
                }
                a.push_back(std::sqrt(s));
                b.push_back(std::abs(yhat(i) - yhat(j)));
            }
        }
    }
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ma += a[k];
        mb += b[k];
    }
    ma /= static_cast<double>(a.size());
    mb /= static_cast<double>(b.size());
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        sab += (a[k] - ma) * (b[k] - mb);
        saa += (a[k] - ma) * (a[k] - ma);
        sbb += (b[k] - mb) * (b[k] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace

TEST_CASE("parsimony counts nodes")
{
    CHECK(parsimony(Individual({ parse_sexpr("x0") })) == 1.0);
    CHECK(parsimony(Individual({ parse_sexpr("(add x0 x1)"), parse_sexpr("x2") })) == 4.0);
    Rng rng(1);
    for (int k = 0; k < 200; ++k) {
        Individual ind({ grow_tree(rng, 4, 5), grow_tree(rng, 4, 3) });
        CHECK(parsimony(ind) == static_cast<double>(symbol_count(ind.to_string())));
        Individual round_trip({ parse_sexpr(to_sexpr(ind.trees()[0])), parse_sexpr(to_sexpr(ind.trees()[1])) });
        CHECK(parsimony(round_trip) == parsimony(ind));
    }
}

TEST_CASE("tikhonov is the mean squared centered output")
{
    FittedRidgeModel null;
    null.target_mean = 0.0;
    null.fitted = Eigen::VectorXd::Zero(4);
    CHECK(tikhonov(null) == 0.0);

    FittedRidgeModel m;
    m.target_mean = 0.0;
    m.fitted = Eigen::Vector2d(1.0, -1.0);
    CHECK(tikhonov(m) == 1.0);

    Rng rng(2);
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd phi(20, 2);
    Eigen::VectorXd y(20);
    for (Eigen::Index i = 0; i < 20; ++i) {
        phi(i, 0) = g(rng);
        phi(i, 1) = g(rng);
        y(i) = 3.0 + phi(i, 0) + g(rng);
    }
    auto fit = fit_ridge(phi, y, 0.1);
    double oracle = 0.0;
    for (Eigen::Index i = 0; i < 20; ++i) {
        double c = fit.fitted(i) - y.mean();
        oracle += c * c;
    }
    CHECK(tikhonov(fit) == doctest::Approx(oracle / 20.0));
}

TEST_CASE("grand complexity ranks match an exhaustive dominance oracle")
{
    std::vector<double> pp { 1, 5 };
    std::vector<double> tk { 0.1, 0.5 };
    CHECK(grand_complexity(pp, tk) == std::vector<int> { 0, 1 });
    std::vector<double> pp2 { 1, 2 };
    std::vector<double> tk2 { 0.5, 0.1 };
    auto r2 = grand_complexity(pp2, tk2);
    CHECK(r2[0] == r2[1]);

    Rng rng(3);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 2 + uniform_index(rng, 19);
        std::vector<double> a(n);
        std::vector<double> b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = static_cast<double>(1 + uniform_index(rng, 8));
            b[i] = static_cast<double>(uniform_index(rng, 6)) / 4.0;
        }
        auto ranks = grand_complexity(a, b);
        // peel fronts by brute force
        std::vector<int> oracle(n, -1);
        for (int level = 0;; ++level) {
            std::vector<std::size_t> layer;
            for (std::size_t i = 0; i < n; ++i) {
                if (oracle[i] >= 0) {
                    continue;
                }
                bool dominated = false;
                for (std::size_t j = 0; j < n; ++j) {
                    if (j != i && oracle[j] < 0 && a[j] <= a[i] && b[j] <= b[i] && (a[j] < a[i] || b[j] < b[i])) {
                        dominated = true;
                    }
                }
                if (!dominated) {
                    layer.push_back(i);
                }
            }
            if (layer.empty()) {
                break;
            }
            for (auto i : layer) {
                oracle[i] = level;
            }
        }
        CHECK(ranks == oracle);
    }
}

TEST_CASE("rademacher estimate")
{
    Eigen::VectorXd y(1);
    y << 1.5;
    Eigen::VectorXd plus = Eigen::VectorXd::Ones(1);
    CHECK(rademacher_score(-y, y, plus) == doctest::Approx(4.0 * 1.5 * 1.5));
    CHECK(rademacher_score(y, y, -plus) == 0.0);

    // zero-information features: the fit is the constant mean of -zeta*y
    Eigen::VectorXd ys(4);
    ys << -2, -1, 1, 2;
    Eigen::VectorXd zeta(4);
    zeta << 1, -1, 1, -1;
    Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(4, 2);
    double level = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
        level -= zeta(i) * ys(i) / 4.0;
    }
    double direct = 0.0;
    for (Eigen::Index i = 0; i < 4; ++i) {
        direct += zeta(i) * (level - ys(i)) * (level - ys(i)) / 4.0;
    }
    CHECK(rademacher(zeros, ys, zeta, 0.1) == doctest::Approx(direct));

    Rng rng(4);
    auto z = rademacher_signs(1000, rng);
    CHECK((z.array().abs() == 1.0).all());
    CHECK(std::abs(z.sum()) < 150);
}

TEST_CASE("approximate MIC")
{
    Rng rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    const Eigen::Index n = 2000;
    Eigen::VectorXd a(n);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        a(i) = g(rng);
        b(i) = g(rng);
    }
    CHECK(mic_approx(a, a) == doctest::Approx(1.0));
    Eigen::VectorXd mono = a.array().cube();
    CHECK(mic_approx(a, mono) == doctest::Approx(1.0));
    CHECK(mic_approx(a, b) < 0.02);
    CHECK(mic_approx(a, Eigen::VectorXd::Constant(n, 3.0)) == 0.0);
    double partial = mic_approx(a, a + b);
    CHECK(partial > 0.05);
    CHECK(partial < 0.95);
}

TEST_CASE("wcrv")
{
    std::vector<double> my { 0.9, 0.1 };
    std::vector<double> mr { 0.5, 0.7 };
    CHECK(wcrv_from_mic(my, mr) == doctest::Approx(1.35));

    Rng rng(6);
    std::normal_distribution<double> g(0.0, 1.0);
    const Eigen::Index n = 3000;
    Eigen::VectorXd y(n);
    Eigen::MatrixXd noise(n, 4);
    for (Eigen::Index i = 0; i < n; ++i) {
        y(i) = g(rng);
        for (Eigen::Index j = 0; j < 4; ++j) {
            noise(i, j) = g(rng);
        }
    }
    // independent features: about half sit below the median, each contributing ~1
    double score = wcrv(noise, y, Eigen::VectorXd::Zero(n));
    CHECK(score > 1.8);
    CHECK(score < 2.1);

    // a feature equal to the target with zero residuals contributes nothing
    Eigen::MatrixXd perfect(n, 1);
    perfect.col(0) = y;
    CHECK(wcrv(perfect, y, y) == 0.0);
}

TEST_CASE("iodc correlation")
{
    Eigen::MatrixXd X(5, 1);
    X << 0, 1, 3, 4, 10;
    Eigen::VectorXd affine = 2.0 * X.col(0).array() + 1.0;
    auto d = pairwise_distances(X);
    CHECK(d.size() == 10);
    CHECK(iodc_correlation(d, affine) == doctest::Approx(1.0));
    CHECK(iodc(d, affine) == doctest::Approx(-1.0));
    CHECK(iodc_correlation(d, Eigen::VectorXd::Constant(5, 2.0)) == 0.0);

    Rng rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd P(6, 3);
        Eigen::VectorXd out(6);
        for (Eigen::Index i = 0; i < 6; ++i) {
            for (Eigen::Index j = 0; j < 3; ++j) {
                P(i, j) = g(rng);
            }
            out(i) = g(rng);
        }
        double r = iodc_correlation(pairwise_distances(P), out);
        CHECK(r == doctest::Approx(pair_oracle(P, out)).epsilon(1e-12));
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
    }
}

TEST_CASE("measure names round trip")
{
    for (auto k : all_measures()) {
        CHECK(parse_measure(to_string(k)) == k);
    }
    CHECK(all_measures().size() == 8);
    CHECK_FALSE(parse_measure("mdl").has_value());
}
