#include "samgp/individual.hpp"

#include <fmt/core.h>

#include "samgp/error.hpp"

namespace samgp {

Individual::Individual(std::vector<FeatureTree> trees) : trees_(std::move(trees))
{
    check_count(trees_.size());
}

void Individual::check_count(std::size_t n)
{
    if (n < 1 || n > kMaxTrees) {
        throw ContractError(fmt::format("an individual holds 1..{} trees, got {}", kMaxTrees, n));
    }
}

void Individual::set_trees(std::vector<FeatureTree> trees)
{
    check_count(trees.size());
    trees_ = std::move(trees);
    eval_.reset();
}

void Individual::set_tree(std::size_t index, FeatureTree tree)
{
    trees_.at(index) = std::move(tree);
    eval_.reset();
}

const ObjectiveVector& Individual::objectives() const
{
    if (!eval_) {
        throw ContractError("individual has not been evaluated");
    }
    return eval_->objectives;
}

std::size_t Individual::node_count() const noexcept
{
    std::size_t n = 0;
    for (const auto& t : trees_) {
        n += t.size();
    }
    return n;
}

std::string Individual::to_string() const
{
    std::string out;
    for (std::size_t i = 0; i < trees_.size(); ++i) {
        if (i > 0) {
            out += " | ";
        }
        out += to_sexpr(trees_[i]);
    }
    return out;
}

std::string Individual::structural_key() const
{
    std::string out;
    for (const auto& t : trees_) {
        out += t.key().bytes();
        out.push_back('\xff');
    }
    return out;
}

} // namespace samgp
