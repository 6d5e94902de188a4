#include "samgp/archive.hpp"

#include <algorithm>
#include <cmath>

#include "samgp/error.hpp"

namespace samgp {

Archive::Archive(std::size_t capacity) : capacity_(capacity)
{
    if (capacity == 0) {
        throw ContractError("archive capacity must be at least 1");
    }
}

bool Archive::offer(const Individual& ind)
{
    const auto& ev = ind.evaluation();
    if (!ev || ev->failed) {
        return false;
    }
    const double score = ev->objectives.sum();
    if (!std::isfinite(score)) {
        return false;
    }
    if (members_.size() == capacity_ && !(score < members_.back().score)) {
        return false;
    }
    auto key = ind.structural_key();
    if (keys_.count(key) != 0) {
        return false;
    }
    // after existing members with an equal score, so earlier entries win ties
    auto pos = std::upper_bound(members_.begin(), members_.end(), score, [](double s, const Member& m) { return s < m.score; });
    members_.insert(pos, Member { ind, score });
    keys_.insert(std::move(key));
    if (members_.size() > capacity_) {
        keys_.erase(members_.back().individual.structural_key());
        members_.pop_back();
    }
    return true;
}

void Archive::offer_all(std::span<const Individual> pop)
{
    for (const auto& ind : pop) {
        offer(ind);
    }
}

const Archive::Member& Archive::best() const
{
    if (members_.empty()) {
        throw ContractError("archive is empty");
    }
    return members_.front();
}

} // namespace samgp
