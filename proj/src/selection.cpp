#include "samgp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "samgp/error.hpp"

namespace samgp {

bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept
{
    return a.o1 <= b.o1 && a.o2 <= b.o2 && (a.o1 < b.o1 || a.o2 < b.o2);
}

std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const ObjectiveVector> objs)
{
    const std::size_t n = objs.size();
    std::vector<std::vector<std::size_t>> dominated_by_me(n);
    std::vector<std::size_t> domination_count(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (dominates(objs[p], objs[q])) {
                dominated_by_me[p].push_back(q);
            } else if (dominates(objs[q], objs[p])) {
                ++domination_count[p];
            }
        }
        if (domination_count[p] == 0) {
            current.push_back(p);
        }
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current) {
            for (auto q : dominated_by_me[p]) {
                if (--domination_count[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<int> front_ranks(std::span<const ObjectiveVector> objs)
{
    std::vector<int> ranks(objs.size(), 0);
    auto fronts = nondominated_sort(objs);
    for (std::size_t f = 0; f < fronts.size(); ++f) {
        for (auto i : fronts[f]) {
            ranks[i] = static_cast<int>(f);
        }
    }
    return ranks;
}

std::vector<double> crowding_distance(std::span<const ObjectiveVector> objs, std::span<const std::size_t> front)
{
    const std::size_t m = front.size();
    std::vector<double> dist(m, 0.0);
    if (m <= 2) {
        std::fill(dist.begin(), dist.end(), std::numeric_limits<double>::infinity());
        return dist;
    }
    std::vector<std::size_t> order(m);
    for (int obj = 0; obj < 2; ++obj) {
        auto value = [&](std::size_t k) { return obj == 0 ? objs[front[k]].o1 : objs[front[k]].o2; };
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
        const double lo = value(order.front());
        const double hi = value(order.back());
        dist[order.front()] = std::numeric_limits<double>::infinity();
        dist[order.back()] = std::numeric_limits<double>::infinity();
        if (!(hi > lo)) {
            continue;
        }
        for (std::size_t k = 1; k + 1 < m; ++k) {
            dist[order[k]] += (value(order[k + 1]) - value(order[k - 1])) / (hi - lo);
        }
    }
    return dist;
}

std::vector<std::size_t> nsga2_survival(std::span<const ObjectiveVector> objs, std::size_t n, Rng& rng)
{
    if (n > objs.size()) {
        throw ContractError("survival cannot select more points than it is given");
    }
    std::vector<std::size_t> canon(objs.size());
    std::iota(canon.begin(), canon.end(), 0);
    std::stable_sort(canon.begin(), canon.end(), [&](std::size_t a, std::size_t b) {
        if (objs[a].o1 != objs[b].o1) {
            return objs[a].o1 < objs[b].o1;
        }
        return objs[a].o2 < objs[b].o2;
    });
    shuffle_range(canon.begin(), canon.end(), rng);

    std::vector<ObjectiveVector> shuffled(canon.size());
    for (std::size_t i = 0; i < canon.size(); ++i) {
        shuffled[i] = objs[canon[i]];
    }
    auto fronts = nondominated_sort(shuffled);

    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    for (const auto& front : fronts) {
        if (chosen.size() + front.size() <= n) {
            for (auto i : front) {
                chosen.push_back(canon[i]);
            }
            if (chosen.size() == n) {
                break;
            }
            continue;
        }
        auto dist = crowding_distance(shuffled, front);
        std::vector<std::size_t> order(front.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
        for (std::size_t k = 0; chosen.size() < n; ++k) {
            chosen.push_back(canon[front[order[k]]]);
        }
        break;
    }
    return chosen;
}

std::vector<std::size_t> elitist_survival(std::span<const ObjectiveVector> objs, std::size_t parent_count, std::size_t n)
{
    if (parent_count == 0 || parent_count > objs.size() || n == 0 || n > objs.size()) {
        throw ContractError("elitist survival needs at least one parent and n within the pool");
    }
    std::size_t elite = 0;
    for (std::size_t i = 1; i < parent_count; ++i) {
        if (objs[i].o1 < objs[elite].o1) {
            elite = i;
        }
    }
    std::vector<std::size_t> rest;
    for (std::size_t i = parent_count; i < objs.size(); ++i) {
        rest.push_back(i);
    }
    if (rest.size() < n - 1) {
        // not enough offspring: top up with the remaining parents
        for (std::size_t i = 0; i < parent_count; ++i) {
            if (i != elite) {
                rest.push_back(i);
            }
        }
    }
    std::stable_sort(rest.begin(), rest.end(), [&](std::size_t a, std::size_t b) { return objs[a].o1 < objs[b].o1; });
    std::vector<std::size_t> chosen { elite };
    for (std::size_t k = 0; chosen.size() < n; ++k) {
        chosen.push_back(rest[k]);
    }
    return chosen;
}

double median(std::vector<double> values)
{
    if (values.empty()) {
        throw ContractError("median of an empty sample");
    }
    std::sort(values.begin(), values.end());
    const std::size_t m = values.size();
    return m % 2 == 1 ? values[m / 2] : 0.5 * (values[m / 2 - 1] + values[m / 2]);
}

double median_absolute_deviation(std::vector<double> values)
{
    const double med = median(values);
    for (auto& v : values) {
        v = std::abs(v - med);
    }
    return median(std::move(values));
}

std::size_t lexicase_select(const Eigen::MatrixXd& errors, Rng& rng)
{
    const auto pop = static_cast<std::size_t>(errors.rows());
    const auto cases = static_cast<std::size_t>(errors.cols());
    if (pop == 0) {
        throw ContractError("lexicase selection on an empty population");
    }
    std::vector<std::size_t> order(cases);
    std::iota(order.begin(), order.end(), 0);
    shuffle_range(order.begin(), order.end(), rng);

    std::vector<std::size_t> alive(pop);
    std::iota(alive.begin(), alive.end(), 0);
    std::vector<double> losses;
    for (auto c : order) {
        if (alive.size() <= 1) {
            break;
        }
        losses.clear();
        for (auto i : alive) {
            losses.push_back(errors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)));
        }
        const double best = *std::min_element(losses.begin(), losses.end());
        const double threshold = best + median_absolute_deviation(losses);
        std::vector<std::size_t> kept;
        for (std::size_t k = 0; k < alive.size(); ++k) {
            if (losses[k] <= threshold) {
                kept.push_back(alive[k]);
            }
        }
        alive = std::move(kept);
    }
    return alive[uniform_index(rng, alive.size())];
}

std::size_t mmd_knee(std::span<const ObjectiveVector> front)
{
    if (front.empty()) {
        throw ContractError("knee point of an empty front");
    }
    double lo1 = front[0].o1;
    double hi1 = front[0].o1;
    double lo2 = front[0].o2;
    double hi2 = front[0].o2;
    for (const auto& p : front) {
        lo1 = std::min(lo1, p.o1);
        hi1 = std::max(hi1, p.o1);
        lo2 = std::min(lo2, p.o2);
        hi2 = std::max(hi2, p.o2);
    }
    auto norm = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };
    std::size_t best = 0;
    double best_sum = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < front.size(); ++i) {
        double s = norm(front[i].o1, lo1, hi1) + norm(front[i].o2, lo2, hi2);
        if (s < best_sum || (s == best_sum && front[i].o1 < front[best].o1)) {
            best = i;
            best_sum = s;
        }
    }
    return best;
}

} // namespace samgp
