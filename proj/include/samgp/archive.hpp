#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "samgp/individual.hpp"

namespace samgp {

// Best individuals ever seen by o1 + o2, ascending, without structural duplicates.
class Archive {
public:
    struct Member {
        Individual individual;
        double score;
    };

    explicit Archive(std::size_t capacity = 1);

    // Returns true if the individual entered the archive. Failed or unevaluated individuals
    // and structural duplicates of current members are ignored.
    bool offer(const Individual& ind);
    void offer_all(std::span<const Individual> pop);

    [[nodiscard]] const std::vector<Member>& members() const noexcept { return members_; }
    [[nodiscard]] std::size_t size() const noexcept { return members_.size(); }
    [[nodiscard]] bool empty() const noexcept { return members_.empty(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] const Member& best() const; // ContractError when empty

private:
    std::size_t capacity_;
    std::vector<Member> members_;
    std::unordered_set<std::string> keys_;
};

} // namespace samgp
