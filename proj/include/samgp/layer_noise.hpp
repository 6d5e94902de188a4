#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "samgp/random.hpp"

namespace samgp {

// Noise applied to a single linear layer sum_i w_i x_i when sampling its output distribution.
enum class LayerNoise {
    Weight,         // w_i + eps_i,  eps_i ~ N(0, w_i^2)
    Input,          // x_i + eps_i,  eps_i ~ N(0, x_i^2)
    UnscaledInput,  // x_i + eps_i,  eps_i ~ N(0, 1)   (negative control)
};

// `samples` outputs of the layer; sample s uses input row s mod inputs.rows().
std::vector<double> layer_output_samples(const Eigen::VectorXd& weights, const Eigen::MatrixXd& inputs, std::size_t samples,
    LayerNoise noise, Rng& rng);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct LayerSetup {
    Eigen::VectorXd weights;
    Eigen::MatrixXd inputs;
};

// Random layer of the given width: weights ~ N(0, 1) and `input_count` inputs ~ N(0, input_scale^2).
LayerSetup random_layer(int width, Rng& rng, int input_count = 100, double input_scale = 2.0);

// KS statistic between weight-noise outputs and `against` outputs on a random layer.
double noise_equivalence_ks(int width, std::size_t samples, Rng& rng, LayerNoise against = LayerNoise::Input);
double noise_equivalence_ks(const LayerSetup& layer, std::size_t samples, Rng& rng, LayerNoise against = LayerNoise::Input);

} // namespace samgp
