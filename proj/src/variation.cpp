#include "samgp/variation.hpp"

#include <fmt/core.h>

#include "samgp/error.hpp"

namespace samgp {

namespace {

Node random_terminal(Rng& rng, std::uint32_t var_count)
{
    return Node::variable(static_cast<std::uint32_t>(uniform_index(rng, var_count)));
}

Node random_function(Rng& rng)
{
    return Node::function(kAllOps[uniform_index(rng, kAllOps.size())]);
}

// grow: below max_depth a node is a terminal with probability |T| / (|T| + |F|), once min_depth is reached
void grow_into(std::vector<Node>& out, Rng& rng, std::uint32_t var_count, int level, int min_depth, int max_depth, bool full)
{
    bool leaf = false;
    if (level >= max_depth) {
        leaf = true;
    } else if (!full && level >= min_depth) {
        double terminal_ratio = static_cast<double>(var_count) / static_cast<double>(var_count + kAllOps.size());
        leaf = uniform01(rng) < terminal_ratio;
    }
    if (leaf) {
        out.push_back(random_terminal(rng, var_count));
        return;
    }
    auto f = random_function(rng);
    out.push_back(f);
    for (int i = 0; i < f.arity(); ++i) {
        grow_into(out, rng, var_count, level + 1, min_depth, max_depth, full);
    }
}

void check_vars(std::uint32_t var_count)
{
    if (var_count < 1) {
        throw ContractError("tree generation needs at least one input variable");
    }
}

} // namespace

FeatureTree grow_tree(Rng& rng, std::uint32_t var_count, int max_depth, int min_depth)
{
    check_vars(var_count);
    std::vector<Node> nodes;
    grow_into(nodes, rng, var_count, 0, min_depth, max_depth, false);
    return FeatureTree(std::move(nodes));
}

FeatureTree full_tree(Rng& rng, std::uint32_t var_count, int depth)
{
    check_vars(var_count);
    std::vector<Node> nodes;
    grow_into(nodes, rng, var_count, 0, depth, depth, true);
    return FeatureTree(std::move(nodes));
}

RampedHalfAndHalf::RampedHalfAndHalf(std::uint32_t var_count, DepthRange range) : var_count_(var_count), range_(range)
{
    check_vars(var_count);
    if (range.min < 0 || range.max < range.min || range.max > kMaxTreeDepth) {
        throw ContractError(fmt::format("invalid depth range [{}, {}]", range.min, range.max));
    }
}

FeatureTree RampedHalfAndHalf::operator()(Rng& rng)
{
    auto span = static_cast<std::size_t>(range_.max - range_.min + 1);
    int depth = range_.min + static_cast<int>(uniform_index(rng, span));
    bool full = next_full_;
    next_full_ = !next_full_;
    if (full) {
        return full_tree(rng, var_count_, depth);
    }
    return grow_tree(rng, var_count_, depth, 0);
}

std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, Rng& rng)
{
    for (int attempt = 0; attempt < kVariationAttempts; ++attempt) {
        auto ia = uniform_index(rng, a.tree_count());
        auto ib = uniform_index(rng, b.tree_count());
        const auto& ta = a.trees()[ia];
        const auto& tb = b.trees()[ib];
        auto pa = uniform_index(rng, ta.size());
        auto pb = uniform_index(rng, tb.size());
        auto ca = ta.replace_subtree(pa, tb.subtree(pb));
        auto cb = tb.replace_subtree(pb, ta.subtree(pa));
        if (ca.depth() > kMaxTreeDepth || cb.depth() > kMaxTreeDepth) {
            continue;
        }
        Individual oa = a;
        Individual ob = b;
        oa.set_tree(ia, std::move(ca));
        ob.set_tree(ib, std::move(cb));
        return { std::move(oa), std::move(ob) };
    }
    Individual oa = a;
    Individual ob = b;
    oa.evaluation().reset();
    ob.evaluation().reset();
    return { std::move(oa), std::move(ob) };
}

Individual mutate(const Individual& a, Rng& rng, std::uint32_t var_count)
{
    for (int attempt = 0; attempt < kVariationAttempts; ++attempt) {
        auto it = uniform_index(rng, a.tree_count());
        const auto& t = a.trees()[it];
        auto pos = uniform_index(rng, t.size());
        auto fresh = grow_tree(rng, var_count, 3, 0);
        auto child = t.replace_subtree(pos, fresh.nodes());
        if (child.depth() > kMaxTreeDepth) {
            continue;
        }
        Individual out = a;
        out.set_tree(it, std::move(child));
        return out;
    }
    Individual out = a;
    out.evaluation().reset();
    return out;
}

Individual maybe_mutate(const Individual& a, double rate, Rng& rng, std::uint32_t var_count)
{
    if (coin(rng, rate)) {
        return mutate(a, rng, var_count);
    }
    return a;
}

Individual add_tree(const Individual& a, Rng& rng, std::uint32_t var_count)
{
    if (a.tree_count() >= kMaxTrees) {
        return a;
    }
    // same distribution as initialization, with the full/grow method picked by a coin flip
    int depth = static_cast<int>(uniform_index(rng, 4));
    auto tree = coin(rng, 0.5) ? full_tree(rng, var_count, depth) : grow_tree(rng, var_count, depth, 0);
    auto trees = a.trees();
    trees.push_back(std::move(tree));
    Individual out = a;
    out.set_trees(std::move(trees));
    return out;
}

Individual delete_tree(const Individual& a, Rng& rng)
{
    if (a.tree_count() <= 1) {
        return a;
    }
    return delete_tree_at(a, uniform_index(rng, a.tree_count()));
}

Individual delete_tree_at(const Individual& a, std::size_t index)
{
    if (a.tree_count() <= 1 || index >= a.tree_count()) {
        return a;
    }
    auto trees = a.trees();
    trees.erase(trees.begin() + static_cast<std::ptrdiff_t>(index));
    Individual out = a;
    out.set_trees(std::move(trees));
    return out;
}

} // namespace samgp
