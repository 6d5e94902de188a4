#include "samgp/sharpness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include <fmt/core.h>

#include "samgp/error.hpp"
#include "samgp/random.hpp"

namespace samgp {

namespace {

constexpr std::uint64_t kFamilyTag = 0xfa11;

void add_noise(Eigen::ArrayXd& v, NoiseFamily family, Adaptivity adaptivity, double sigma, std::uint64_t stream_seed)
{
    SplitMix64 eng(stream_seed);
    Eigen::ArrayXd eps(v.size());
    switch (family) {
    case NoiseFamily::Uniform: {
        std::uniform_real_distribution<double> d(-1.0, 1.0);
        for (auto& e : eps) {
            e = d(eng);
        }
        break;
    }
    case NoiseFamily::Laplace: {
        // inverse CDF of Laplace(0, 1)
        std::uniform_real_distribution<double> d(-0.5, 0.5);
        for (auto& e : eps) {
            double u = d(eng);
            while (std::abs(u) >= 0.5) {
                u = d(eng);
            }
            e = -std::copysign(1.0, u) * std::log1p(-2.0 * std::abs(u));
        }
        break;
    }
    case NoiseFamily::Normal:
    case NoiseFamily::Ensemble: {
        std::normal_distribution<double> d(0.0, 1.0);
        for (auto& e : eps) {
            e = d(eng);
        }
        break;
    }
    }

    switch (adaptivity) {
    case Adaptivity::Instance:
        v += v * (sigma * eps);
        break;
    case Adaptivity::Batch: {
        double sd = v.size() > 0 ? std::sqrt((v - v.mean()).square().mean()) : 0.0;
        v += (sigma * sd) * eps;
        break;
    }
    case Adaptivity::None:
        v += sigma * eps;
        break;
    }
    v = v.cwiseMax(-kValueClamp).cwiseMin(kValueClamp);
}

Eigen::ArrayXd compute_perturbed(const FeatureTree& t, const Eigen::MatrixXd& X, const PerturbationConfig& cfg, std::uint64_t round_seed)
{
    const NoiseFamily family = round_noise_family(cfg.noise, round_seed);
    const std::uint64_t tree_hash = t.key().hash();
    return evaluate_tree(t, X, [&](std::size_t pos, Eigen::ArrayXd& value) {
        add_noise(value, family, cfg.adaptivity, cfg.sigma, derive_seed(round_seed, { tree_hash, pos }));
    });
}

} // namespace

void PerturbationConfig::validate() const
{
    std::vector<std::string> problems;
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        problems.push_back(fmt::format("perturbation sigma must be > 0 (got {})", sigma));
    }
    if (rounds < 1) {
        problems.push_back(fmt::format("perturbation rounds must be >= 1 (got {})", rounds));
    }
    if (aggregation.m < 1) {
        problems.push_back(fmt::format("m-sharpness batch size must be >= 1 (got {})", aggregation.m));
    }
    if (!problems.empty()) {
        std::string msg = "invalid perturbation config:";
        for (const auto& p : problems) {
            msg += "\n  - " + p;
        }
        throw ConfigError(msg);
    }
}

std::uint64_t PerturbationConfig::round_seed(int k) const noexcept
{
    return derive_seed(seed, { 0x5eedU, static_cast<std::uint64_t>(k) });
}

NoiseFamily round_noise_family(NoiseFamily configured, std::uint64_t round_seed) noexcept
{
    if (configured != NoiseFamily::Ensemble) {
        return configured;
    }
    double xi = static_cast<double>(mix64(round_seed ^ kFamilyTag) >> 11U) * 0x1.0p-53;
    if (xi < 1.0 / 3.0) {
        return NoiseFamily::Normal;
    }
    if (xi < 2.0 / 3.0) {
        return NoiseFamily::Uniform;
    }
    return NoiseFamily::Laplace;
}

Eigen::ArrayXd perturb_semantics(const FeatureTree& t, const Eigen::MatrixXd& X, const PerturbationConfig& cfg,
    std::uint64_t round_seed, SemanticsCache* cache)
{
    if (cache != nullptr && cache->enabled()) {
        // the entry also depends on the noise settings, so a shared cache cannot mix configurations
        const auto slot = derive_seed(round_seed,
            { static_cast<std::uint64_t>(cfg.noise), static_cast<std::uint64_t>(cfg.adaptivity), std::bit_cast<std::uint64_t>(cfg.sigma) });
        return cache->get_or_compute(t.key(), slot, [&] { return compute_perturbed(t, X, cfg, round_seed); });
    }
    return compute_perturbed(t, X, cfg, round_seed);
}

Eigen::MatrixXd sharpness_diffs(std::span<const FeatureTree> trees, const FittedRidgeModel& model, const Eigen::MatrixXd& X,
    const Eigen::VectorXd& y, const PerturbationConfig& cfg, SemanticsCache* cache)
{
    const auto p = static_cast<Eigen::Index>(trees.size());
    if (p == 0 || model.weights.size() != p || model.feature_stats.means.size() != p) {
        throw ContractError(fmt::format("sharpness needs a model fitted on the same {} trees", p));
    }
    if (y.size() != X.rows()) {
        throw ContractError("sharpness: target length does not match input rows");
    }
    if (cfg.rounds < 1) {
        throw ContractError("sharpness needs at least one perturbation round");
    }
    const auto n = X.rows();
    const Eigen::ArrayXd base_loss = (predict(model, evaluate_trees(trees, X)) - y).array().square();

    Eigen::MatrixXd diffs(cfg.rounds, n);
    Eigen::MatrixXd phi(n, p);
    for (int k = 0; k < cfg.rounds; ++k) {
        auto seed = cfg.round_seed(k);
        for (Eigen::Index j = 0; j < p; ++j) {
            phi.col(j) = perturb_semantics(trees[static_cast<std::size_t>(j)], X, cfg, seed, cache).matrix();
        }
        diffs.row(k) = ((predict(model, phi) - y).array().square() - base_loss).matrix().transpose();
    }
    return diffs;
}

SharpnessReport aggregate_sharpness(const Eigen::MatrixXd& diffs, Aggregation agg)
{
    const auto rounds = diffs.rows();
    const auto n = diffs.cols();
    if (rounds < 1 || n < 1) {
        throw ContractError("sharpness aggregation needs at least one round and one instance");
    }
    SharpnessReport r;
    r.per_instance.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double s = 0.0;
        for (Eigen::Index k = 0; k < rounds; ++k) {
            s = std::max(s, diffs(k, i));
        }
        r.per_instance(i) = s;
    }

    // Every estimator sums raw differences and divides once, so the orderings between them
    // survive rounding whenever the sums themselves are exact.
    const double dn = static_cast<double>(n);
    auto round_sum = [&](Eigen::Index k) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            s += diffs(k, i);
        }
        return s;
    };

    switch (agg.kind) {
    case AggregationKind::OneSam: {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            s += r.per_instance(i);
        }
        r.aggregate = s / dn;
        break;
    }
    case AggregationKind::NSam: {
        double best = round_sum(0);
        for (Eigen::Index k = 1; k < rounds; ++k) {
            best = std::max(best, round_sum(k));
        }
        r.aggregate = best / dn;
        break;
    }
    case AggregationKind::Gmp: {
        double s = 0.0;
        for (Eigen::Index k = 0; k < rounds; ++k) {
            s += round_sum(k);
        }
        r.aggregate = s / (dn * static_cast<double>(rounds));
        break;
    }
    case AggregationKind::MSam: {
        if (agg.m < 1) {
            throw ContractError("m-sharpness batch size must be >= 1");
        }
        // contiguous batches of m instances (the last may be shorter), weighted by size
        const auto m = static_cast<Eigen::Index>(agg.m);
        double total = 0.0;
        for (Eigen::Index b = 0; b < n; b += m) {
            auto e = std::min(n, b + m);
            double best = 0.0;
            for (Eigen::Index k = 0; k < rounds; ++k) {
                double s = 0.0;
                for (Eigen::Index i = b; i < e; ++i) {
                    s += diffs(k, i);
                }
                best = std::max(best, s);
            }
            total += best;
        }
        r.aggregate = total / dn;
        break;
    }
    }
    return r;
}

SharpnessReport estimate_sharpness(std::span<const FeatureTree> trees, const FittedRidgeModel& model, const Eigen::MatrixXd& X,
    const Eigen::VectorXd& y, const PerturbationConfig& cfg, SemanticsCache* cache)
{
    return aggregate_sharpness(sharpness_diffs(trees, model, X, y, cfg, cache), cfg.aggregation);
}

SharpnessReport estimate_sharpness(const Individual& ind, const FittedRidgeModel& model, const Eigen::MatrixXd& X,
    const Eigen::VectorXd& y, const PerturbationConfig& cfg, SemanticsCache* cache)
{
    return estimate_sharpness(std::span<const FeatureTree>(ind.trees()), model, X, y, cfg, cache);
}

std::string to_string(NoiseFamily f)
{
    switch (f) {
    case NoiseFamily::Normal: return "normal";
    case NoiseFamily::Uniform: return "uniform";
    case NoiseFamily::Laplace: return "laplace";
    case NoiseFamily::Ensemble: return "ensemble";
    }
    return "?";
}

std::string to_string(Adaptivity a)
{
    switch (a) {
    case Adaptivity::Instance: return "instance";
    case Adaptivity::Batch: return "batch";
    case Adaptivity::None: return "none";
    }
    return "?";
}

std::string to_string(Aggregation a)
{
    switch (a.kind) {
    case AggregationKind::OneSam: return "one-sam";
    case AggregationKind::MSam: return "m-sam";
    case AggregationKind::NSam: return "n-sam";
    case AggregationKind::Gmp: return "gmp";
    }
    return "?";
}

std::optional<NoiseFamily> parse_noise_family(const std::string& s)
{
    for (auto f : { NoiseFamily::Normal, NoiseFamily::Uniform, NoiseFamily::Laplace, NoiseFamily::Ensemble }) {
        if (to_string(f) == s) {
            return f;
        }
    }
    return std::nullopt;
}

std::optional<Adaptivity> parse_adaptivity(const std::string& s)
{
    for (auto a : { Adaptivity::Instance, Adaptivity::Batch, Adaptivity::None }) {
        if (to_string(a) == s) {
            return a;
        }
    }
    return std::nullopt;
}

std::optional<AggregationKind> parse_aggregation(const std::string& s)
{
    for (auto k : { AggregationKind::OneSam, AggregationKind::MSam, AggregationKind::NSam, AggregationKind::Gmp }) {
        if (to_string(Aggregation { k, 4 }) == s) {
            return k;
        }
    }
    return std::nullopt;
}

} // namespace samgp
