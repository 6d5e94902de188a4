#pragma once

#include <cstddef>
#include <span>
#include <string>

namespace samgp {

struct WilcoxonResult {
    std::size_t n { 0 }; // pairs with a nonzero difference
    double t_plus { 0.0 };
    double t_minus { 0.0 };
    double p_value { 1.0 }; // two-sided
    bool exact { true };
};

// Paired signed-rank test on a - b. Zero differences are dropped and tied magnitudes get
// average ranks. Exact null distribution for n <= 25, normal approximation (with tie
// correction, no continuity correction) above.
WilcoxonResult wilcoxon_signed_rank(std::span<const double> a, std::span<const double> b);

enum class Outcome { Win, Tie, Loss };

// Win when a is significantly larger than b at level `alpha`, loss when significantly smaller.
Outcome compare_paired(std::span<const double> a, std::span<const double> b, double alpha = 0.05);

std::string to_string(Outcome o);

} // namespace samgp
