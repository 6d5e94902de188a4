#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "samgp/individual.hpp"
#include "samgp/random.hpp"

namespace samgp {

// Pareto dominance for minimization: no worse in both objectives and strictly better in one.
bool dominates(const ObjectiveVector& a, const ObjectiveVector& b) noexcept;

// Fronts of indices into `objs`, best first (fast nondominated sort).
std::vector<std::vector<std::size_t>> nondominated_sort(std::span<const ObjectiveVector> objs);

// Front number per point (0 = nondominated).
std::vector<int> front_ranks(std::span<const ObjectiveVector> objs);

// Crowding distance of each member of `front` (same order as `front`). Boundary points of
// every objective get +infinity.
std::vector<double> crowding_distance(std::span<const ObjectiveVector> objs, std::span<const std::size_t> front);

// NSGA-II environmental selection of `n` indices. Points are canonically ordered by objective
// value and then shuffled, so equal points are broken uniformly at random and the selected
// objective multiset does not depend on the input order.
std::vector<std::size_t> nsga2_survival(std::span<const ObjectiveVector> objs, std::size_t n, Rng& rng);

// Single-objective survival with one elite: the best of the first `parent_count` points by o1,
// followed by the best n - 1 of the remaining points by o1 (stable on index).
std::vector<std::size_t> elitist_survival(std::span<const ObjectiveVector> objs, std::size_t parent_count, std::size_t n);

// Epsilon-lexicase parent selection. `errors` is individuals x cases. Case order is shuffled;
// each filter keeps the candidates within min + MAD of the current case losses, where the MAD
// is taken over the surviving candidates. Remaining ties are broken uniformly.
std::size_t lexicase_select(const Eigen::MatrixXd& errors, Rng& rng);

// Median absolute deviation around the median.
double median_absolute_deviation(std::vector<double> values);
double median(std::vector<double> values);

// Knee point: argmin of the sum of min-max normalized objectives over the front. Ties go to
// the lowest o1, then to the lowest index.
std::size_t mmd_knee(std::span<const ObjectiveVector> front);

} // namespace samgp
