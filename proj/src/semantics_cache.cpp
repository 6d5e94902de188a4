#include "samgp/semantics_cache.hpp"

#include "samgp/random.hpp"

namespace samgp {

SemanticsCache::SemanticsCache(std::size_t capacity, bool enabled) : capacity_(capacity), enabled_(enabled && capacity > 0) {}

std::size_t SemanticsCache::KeyHash::operator()(const Key& k) const noexcept
{
    return static_cast<std::size_t>(mix64(k.tree.hash() ^ mix64(k.round_seed)));
}

std::optional<Eigen::ArrayXd> SemanticsCache::lookup(const TreeKey& tree, std::uint64_t round_seed)
{
    if (!enabled_) {
        return std::nullopt;
    }
    std::lock_guard lock(mutex_);
    auto it = index_.find(Key { tree, round_seed });
    if (it == index_.end()) {
        ++misses_;
        return std::nullopt;
    }
    ++hits_;
    entries_.splice(entries_.begin(), entries_, it->second);
    return it->second->value;
}

void SemanticsCache::insert(const TreeKey& tree, std::uint64_t round_seed, const Eigen::ArrayXd& value)
{
    if (!enabled_) {
        return;
    }
    std::lock_guard lock(mutex_);
    Key key { tree, round_seed };
    auto it = index_.find(key);
    if (it != index_.end()) {
        // a concurrent computation got here first; contents are identical by construction
        entries_.splice(entries_.begin(), entries_, it->second);
        return;
    }
    entries_.push_front(Entry { key, value });
    index_.emplace(std::move(key), entries_.begin());
    while (entries_.size() > capacity_) {
        index_.erase(entries_.back().key);
        entries_.pop_back();
    }
}

Eigen::ArrayXd SemanticsCache::get_or_compute(const TreeKey& tree, std::uint64_t round_seed, const std::function<Eigen::ArrayXd()>& compute)
{
    if (auto hit = lookup(tree, round_seed)) {
        return std::move(*hit);
    }
    Eigen::ArrayXd value = compute();
    insert(tree, round_seed, value);
    return value;
}

void SemanticsCache::clear()
{
    std::lock_guard lock(mutex_);
    entries_.clear();
    index_.clear();
    hits_ = 0;
    misses_ = 0;
}

std::size_t SemanticsCache::size() const
{
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::uint64_t SemanticsCache::hits() const
{
    std::lock_guard lock(mutex_);
    return hits_;
}

std::uint64_t SemanticsCache::misses() const
{
    std::lock_guard lock(mutex_);
    return misses_;
}

} // namespace samgp
