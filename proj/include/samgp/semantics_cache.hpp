#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <mutex>
#include <optional>
#include <unordered_map>

#include <Eigen/Dense>

#include "samgp/tree.hpp"

namespace samgp {

// LRU store of perturbed tree semantics keyed by (tree structure, round seed).
// A cache instance is bound to one training matrix and one perturbation config.
// All operations are serialized by an internal mutex.
class SemanticsCache {
public:
    static constexpr std::size_t kDefaultCapacity = 100'000;

    explicit SemanticsCache(std::size_t capacity = kDefaultCapacity, bool enabled = true);

    std::optional<Eigen::ArrayXd> lookup(const TreeKey& tree, std::uint64_t round_seed);
    void insert(const TreeKey& tree, std::uint64_t round_seed, const Eigen::ArrayXd& value);
    Eigen::ArrayXd get_or_compute(const TreeKey& tree, std::uint64_t round_seed, const std::function<Eigen::ArrayXd()>& compute);

    void clear();

    [[nodiscard]] bool enabled() const noexcept { return enabled_; }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] std::uint64_t hits() const;
    [[nodiscard]] std::uint64_t misses() const;

private:
    struct Key {
        TreeKey tree;
        std::uint64_t round_seed;
        friend bool operator==(const Key&, const Key&) = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept;
    };
    struct Entry {
        Key key;
        Eigen::ArrayXd value;
    };

    std::size_t capacity_;
    bool enabled_;
    mutable std::mutex mutex_;
    std::list<Entry> entries_; // most recently used at the front
    std::unordered_map<Key, std::list<Entry>::iterator, KeyHash> index_;
    std::uint64_t hits_ { 0 };
    std::uint64_t misses_ { 0 };
};

} // namespace samgp
