#include "samgp/inference.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include <fmt/core.h>

#include "samgp/error.hpp"

namespace samgp {

SnapshotTree snapshot(const FeatureTree& t, const Eigen::MatrixXd& X_train)
{
    SnapshotTree s { t, std::vector<std::vector<double>>(t.size()) };
    const auto& nodes = t.nodes();
    evaluate_tree(t, X_train, [&](std::size_t pos, Eigen::ArrayXd& value) {
        if (nodes[pos].is_var) {
            return;
        }
        auto& out = s.stored[pos];
        out.assign(value.begin(), value.end());
        std::sort(out.begin(), out.end());
    });
    return s;
}

std::vector<SnapshotTree> snapshot(const Individual& ind, const Eigen::MatrixXd& X_train)
{
    std::vector<SnapshotTree> out;
    out.reserve(ind.tree_count());
    for (const auto& t : ind.trees()) {
        out.push_back(snapshot(t, X_train));
    }
    return out;
}

double nearest_stored(const std::vector<double>& sorted, double query)
{
    if (sorted.empty()) {
        throw ContractError("nearest stored value of an empty snapshot");
    }
    if (sorted.size() == 1) {
        return sorted.front();
    }
    auto index = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), query) - sorted.begin());
    index = std::clamp<std::size_t>(index, 1, sorted.size() - 1);
    const double left = sorted[index - 1];
    const double right = sorted[index];
    return std::abs(query - left) <= std::abs(right - query) ? left : right;
}

Eigen::ArrayXd reduce_sharpness_eval(const SnapshotTree& t, const Eigen::MatrixXd& X)
{
    const auto& nodes = t.tree.nodes();
    if (t.stored.size() != nodes.size()) {
        throw ContractError("snapshot does not match its tree");
    }
    return evaluate_tree(t.tree, X, [&](std::size_t pos, Eigen::ArrayXd& value) {
        if (nodes[pos].is_var) {
            return;
        }
        const auto& stored = t.stored[pos];
        for (auto& v : value) {
            v = nearest_stored(stored, v);
        }
    });
}

double reduce_sharpness_eval(const SnapshotTree& t, const Eigen::RowVectorXd& x)
{
    Eigen::MatrixXd X = x;
    return reduce_sharpness_eval(t, X)(0);
}

PredictionBounds PredictionBounds::from_targets(const Eigen::VectorXd& y_train)
{
    if (y_train.size() == 0) {
        throw ContractError("prediction bounds need at least one training target");
    }
    return { y_train.minCoeff(), y_train.maxCoeff() };
}

Eigen::VectorXd bounded_predict(const Eigen::VectorXd& y_hat, const PredictionBounds& b)
{
    if (b.y_min > b.y_max) {
        throw ContractError("prediction bounds are inverted");
    }
    return y_hat.cwiseMax(b.y_min).cwiseMin(b.y_max);
}

ModelMember make_member(const Individual& ind, const Eigen::MatrixXd& X_train)
{
    const auto& ev = ind.evaluation();
    if (!ev || ev->failed || !ev->model) {
        throw ContractError("model member needs a successfully evaluated individual");
    }
    return { snapshot(ind, X_train), *ev->model };
}

Eigen::VectorXd member_predict(const ModelMember& m, const Eigen::MatrixXd& X, const PredictionBounds& b, bool reduce)
{
    Eigen::MatrixXd phi(X.rows(), static_cast<Eigen::Index>(m.trees.size()));
    for (std::size_t j = 0; j < m.trees.size(); ++j) {
        phi.col(static_cast<Eigen::Index>(j))
            = (reduce ? reduce_sharpness_eval(m.trees[j], X) : evaluate_tree(m.trees[j].tree, X)).matrix();
    }
    return bounded_predict(predict(m.model, phi), b);
}

Eigen::VectorXd ensemble_predict(std::span<const ModelMember> members, const Eigen::MatrixXd& X, const PredictionBounds& b, bool reduce)
{
    if (members.empty()) {
        throw ContractError("ensemble prediction needs at least one member");
    }
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(X.rows());
    for (const auto& m : members) {
        sum += member_predict(m, X, b, reduce);
    }
    return sum / static_cast<double>(members.size());
}

double r2(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_pred)
{
    if (y_true.size() != y_pred.size() || y_true.size() < 2) {
        throw ContractError(fmt::format("r2 needs equal lengths >= 2 (got {} and {})", y_true.size(), y_pred.size()));
    }
    const double ss_tot = (y_true.array() - y_true.mean()).square().sum();
    if (!(ss_tot > 0.0)) {
        static std::atomic<bool> warned { false };
        if (!warned.exchange(true)) {
            fmt::print(stderr, "warning: r2 of a constant target is defined as 0\n");
        }
        return 0.0;
    }
    return 1.0 - (y_true - y_pred).squaredNorm() / ss_tot;
}

} // namespace samgp
