#pragma once

#include <cstdint>
#include <utility>

#include "samgp/individual.hpp"
#include "samgp/random.hpp"

namespace samgp {

struct DepthRange {
    int min { 0 };
    int max { 3 };
};

FeatureTree grow_tree(Rng& rng, std::uint32_t var_count, int max_depth, int min_depth = 0);
FeatureTree full_tree(Rng& rng, std::uint32_t var_count, int depth);

// Ramped half-and-half. Successive calls alternate between the full and grow methods; the
// target depth is drawn uniformly from the range.
class RampedHalfAndHalf {
public:
    RampedHalfAndHalf(std::uint32_t var_count, DepthRange range = {});

    FeatureTree operator()(Rng& rng);
    [[nodiscard]] bool next_is_full() const noexcept { return next_full_; }

private:
    std::uint32_t var_count_;
    DepthRange range_;
    bool next_full_ { true };
};

// Attempts per operator before giving up and returning the parents unchanged (1 + 3 retries).
inline constexpr int kVariationAttempts = 4;

std::pair<Individual, Individual> crossover(const Individual& a, const Individual& b, Rng& rng);
Individual mutate(const Individual& a, Rng& rng, std::uint32_t var_count);
// Applies mutate() with probability `rate`, otherwise returns a copy.
Individual maybe_mutate(const Individual& a, double rate, Rng& rng, std::uint32_t var_count);

// No-ops at the tree-count bounds.
Individual add_tree(const Individual& a, Rng& rng, std::uint32_t var_count);
Individual delete_tree(const Individual& a, Rng& rng);
Individual delete_tree_at(const Individual& a, std::size_t index);

} // namespace samgp
