#include "samgp/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "samgp/error.hpp"
#include "samgp/selection.hpp"

namespace samgp {

std::string to_string(MeasureKind k)
{
    switch (k) {
    case MeasureKind::Sam: return "sam";
    case MeasureKind::Pp: return "pp";
    case MeasureKind::Tk: return "tk";
    case MeasureKind::Gc: return "gc";
    case MeasureKind::Rc: return "rc";
    case MeasureKind::Wcrv: return "wcrv";
    case MeasureKind::Iodc: return "iodc";
    case MeasureKind::None: return "none";
    }
    return "?";
}

std::vector<MeasureKind> all_measures()
{
    return { MeasureKind::Sam, MeasureKind::Pp, MeasureKind::Tk, MeasureKind::Gc, MeasureKind::Rc, MeasureKind::Wcrv,
        MeasureKind::Iodc, MeasureKind::None };
}

std::optional<MeasureKind> parse_measure(const std::string& s)
{
    for (auto k : all_measures()) {
        if (to_string(k) == s) {
            return k;
        }
    }
    return std::nullopt;
}

double parsimony(const Individual& ind) noexcept
{
    return static_cast<double>(ind.node_count());
}

double tikhonov(const FittedRidgeModel& m)
{
    return (m.fitted.array() - m.target_mean).square().mean();
}

std::vector<int> grand_complexity(std::span<const double> pp, std::span<const double> tk)
{
    if (pp.size() != tk.size()) {
        throw ContractError("grand complexity needs one tikhonov value per parsimony value");
    }
    std::vector<ObjectiveVector> pts(pp.size());
    for (std::size_t i = 0; i < pp.size(); ++i) {
        pts[i] = { pp[i], tk[i] };
    }
    return front_ranks(pts);
}

double rademacher_score(const Eigen::VectorXd& fitted, const Eigen::VectorXd& y, const Eigen::VectorXd& zeta)
{
    if (fitted.size() != y.size() || zeta.size() != y.size() || y.size() == 0) {
        throw ContractError("rademacher score needs equal nonzero lengths");
    }
    return (zeta.array() * (fitted - y).array().square()).mean();
}

double rademacher(const Eigen::MatrixXd& phi, const Eigen::VectorXd& y, const Eigen::VectorXd& zeta, double alpha)
{
    Eigen::VectorXd flipped = -(zeta.array() * y.array()).matrix();
    auto m = fit_ridge(phi, flipped, alpha);
    return rademacher_score(m.fitted, y, zeta);
}

Eigen::VectorXd rademacher_signs(Eigen::Index n, Rng& rng)
{
    Eigen::VectorXd z(n);
    for (auto& v : z) {
        v = coin(rng, 0.5) ? 1.0 : -1.0;
    }
    return z;
}

namespace {

// Equal-frequency bin per element; tied values share the bin of their first sorted position.
std::vector<int> frequency_bins(const Eigen::VectorXd& v, int bins, int& used)
{
    const auto n = static_cast<std::size_t>(v.size());
    std::vector<double> sorted(v.begin(), v.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> out(n);
    std::vector<bool> seen(static_cast<std::size_t>(bins), false);
    used = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto first = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), v(static_cast<Eigen::Index>(i))) - sorted.begin());
        int b = static_cast<int>(first * static_cast<std::size_t>(bins) / n);
        out[i] = b;
        if (!seen[static_cast<std::size_t>(b)]) {
            seen[static_cast<std::size_t>(b)] = true;
            ++used;
        }
    }
    return out;
}

} // namespace

double mic_approx(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    if (a.size() != b.size()) {
        throw ContractError("mic needs equal-length vectors");
    }
    const auto n = a.size();
    if (n < 2 || !a.allFinite() || !b.allFinite()) {
        return 0.0;
    }
    const int bins = std::min(8, static_cast<int>(std::ceil(std::pow(static_cast<double>(n), 0.3))));
    int used_a = 0;
    int used_b = 0;
    auto ba = frequency_bins(a, bins, used_a);
    auto bb = frequency_bins(b, bins, used_b);
    if (std::min(used_a, used_b) < 2) {
        return 0.0;
    }
    const auto nb = static_cast<std::size_t>(bins);
    std::vector<double> joint(nb * nb, 0.0);
    std::vector<double> pa(nb, 0.0);
    std::vector<double> pb(nb, 0.0);
    const double w = 1.0 / static_cast<double>(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto x = static_cast<std::size_t>(ba[static_cast<std::size_t>(i)]);
        auto y = static_cast<std::size_t>(bb[static_cast<std::size_t>(i)]);
        joint[x * nb + y] += w;
        pa[x] += w;
        pb[y] += w;
    }
    double mi = 0.0;
    for (std::size_t x = 0; x < nb; ++x) {
        for (std::size_t y = 0; y < nb; ++y) {
            double p = joint[x * nb + y];
            if (p > 0.0) {
                mi += p * std::log(p / (pa[x] * pb[y]));
            }
        }
    }
    return std::clamp(mi / std::log(static_cast<double>(std::min(used_a, used_b))), 0.0, 1.0);
}

double wcrv_from_mic(std::span<const double> mic_y, std::span<const double> mic_r)
{
    if (mic_y.size() != mic_r.size() || mic_y.empty()) {
        throw ContractError("wcrv needs matching nonempty MIC lists");
    }
    const double mv = median(std::vector<double>(mic_y.begin(), mic_y.end()));
    double s = 0.0;
    for (std::size_t j = 0; j < mic_y.size(); ++j) {
        s += mic_y[j] >= mv ? mic_y[j] * mic_r[j] : 1.0 - mic_y[j];
    }
    return s;
}

double wcrv(const Eigen::MatrixXd& vars, const Eigen::VectorXd& y, const Eigen::VectorXd& fitted)
{
    if (vars.rows() != y.size() || fitted.size() != y.size()) {
        throw ContractError("wcrv: row counts differ");
    }
    const Eigen::VectorXd r = y - fitted;
    std::vector<double> mic_y;
    std::vector<double> mic_r;
    for (Eigen::Index j = 0; j < vars.cols(); ++j) {
        Eigen::VectorXd col = vars.col(j);
        mic_y.push_back(mic_approx(col, y));
        mic_r.push_back(mic_approx(col, r));
    }
    return wcrv_from_mic(mic_y, mic_r);
}

Eigen::VectorXd pairwise_distances(const Eigen::MatrixXd& X)
{
    const auto n = X.rows();
    Eigen::VectorXd d(n * (n - 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            d(k++) = (X.row(i) - X.row(j)).norm();
        }
    }
    return d;
}

double iodc_correlation(const Eigen::VectorXd& input_distances, const Eigen::VectorXd& yhat)
{
    const auto n = yhat.size();
    if (input_distances.size() != n * (n - 1) / 2) {
        throw ContractError(fmt::format("iodc: {} input distances for {} outputs", input_distances.size(), n));
    }
    if (input_distances.size() < 2) {
        return 0.0;
    }
    Eigen::VectorXd out(input_distances.size());
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            out(k++) = std::abs(yhat(i) - yhat(j));
        }
    }
    const Eigen::ArrayXd a = input_distances.array() - input_distances.mean();
    const Eigen::ArrayXd b = out.array() - out.mean();
    const double saa = a.square().sum();
    const double sbb = b.square().sum();
    // relative guard: distances that only differ by rounding count as constant
    const double tol = 1e-24 * static_cast<double>(a.size());
    if (!(saa > tol * (1.0 + input_distances.squaredNorm())) || !(sbb > tol * (1.0 + out.squaredNorm()))) {
        return 0.0;
    }
    const double r = (a * b).sum() / std::sqrt(saa * sbb);
    return std::isfinite(r) ? std::clamp(r, -1.0, 1.0) : 0.0;
}

} // namespace samgp
