#include "samgp/wilcoxon.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "samgp/error.hpp"

namespace samgp {

WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw ContractError("wilcoxon needs paired samples of equal length");
    }
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double v = a[i] - b[i];
        if (v != 0.0) {
            d.push_back(v);
        }
    }
    WilcoxonResult r;
    r.n = d.size();
    if (r.n == 0) {
        return r;
    }
    std::vector<std::size_t> order(r.n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return std::abs(d[x]) < std::abs(d[y]); });

    // doubled ranks stay integral under averaging
    std::vector<long> rank2(r.n);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < r.n;) {
        std::size_t j = i;
        while (j + 1 < r.n && std::abs(d[order[j + 1]]) == std::abs(d[order[i]])) {
            ++j;
        }
        const auto t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        for (std::size_t k = i; k <= j; ++k) {
            rank2[order[k]] = static_cast<long>(i + j + 2); // 2 * mean of ranks i+1 .. j+1
        }
        i = j + 1;
    }
    long plus2 = 0;
    long total2 = 0;
    for (std::size_t i = 0; i < r.n; ++i) {
        total2 += rank2[i];
        if (d[i] > 0.0) {
            plus2 += rank2[i];
        }
    }
    r.t_plus = static_cast<double>(plus2) / 2.0;
    r.t_minus = static_cast<double>(total2 - plus2) / 2.0;
    const long tmin2 = std::min(plus2, total2 - plus2);

    if (r.n <= 25) {
        // count sign assignments by doubled positive-rank sum
        std::vector<double> ways(static_cast<std::size_t>(total2) + 1, 0.0);
        ways[0] = 1.0;
        long reach = 0;
        for (auto rk : rank2) {
            for (long s = reach; s >= 0; --s) {
                if (ways[static_cast<std::size_t>(s)] != 0.0) {
                    ways[static_cast<std::size_t>(s + rk)] += ways[static_cast<std::size_t>(s)];
                }
            }
            reach += rk;
        }
        double below = 0.0;
        for (long s = 0; s <= tmin2; ++s) {
            below += ways[static_cast<std::size_t>(s)];
        }
        r.p_value = std::min(1.0, 2.0 * below / std::ldexp(1.0, static_cast<int>(r.n)));
        r.exact = true;
    } else {
        const auto n = static_cast<double>(r.n);
        const double mean = n * (n + 1.0) / 4.0;
        const double var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - tie_term / 48.0;
        const double z = var > 0.0 ? (static_cast<double>(tmin2) / 2.0 - mean) / std::sqrt(var) : 0.0;
        r.p_value = std::min(1.0, std::erfc(std::abs(z) / std::sqrt(2.0)));
        r.exact = false;
    }
    return r;
}

Outcome compare_paired(std::span<const double> a, std::span<const double> b, double alpha)
{
    auto r = wilcoxon_signed_rank(a, b);
    if (r.n == 0 || !(r.p_value < alpha) || r.t_plus == r.t_minus) {
        return Outcome::Tie;
    }
    return r.t_plus > r.t_minus ? Outcome::Win : Outcome::Loss;
}

std::string to_string(Outcome o)
{
    switch (o) {
    case Outcome::Win: return "win";
    case Outcome::Tie: return "tie";
    case Outcome::Loss: return "loss";
    }
    return "?";
}

} // namespace samgp
