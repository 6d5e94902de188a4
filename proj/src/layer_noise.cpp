#include "samgp/layer_noise.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/core.h>

#include "samgp/error.hpp"

namespace samgp {

std::vector<double> layer_output_samples(const Eigen::VectorXd& weights, const Eigen::MatrixXd& inputs, std::size_t samples,
    LayerNoise noise, Rng& rng)
{
    const auto width = weights.size();
    if (width < 1 || inputs.cols() != width || inputs.rows() < 1) {
        throw ContractError(fmt::format("layer sampling: {} weights vs {}x{} inputs", width, inputs.rows(), inputs.cols()));
    }
    SplitMix64 eng(rng());
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> out(samples);
    for (std::size_t s = 0; s < samples; ++s) {
        auto row = static_cast<Eigen::Index>(s % static_cast<std::size_t>(inputs.rows()));
        double acc = 0.0;
        for (Eigen::Index i = 0; i < width; ++i) {
            const double w = weights(i);
            const double x = inputs(row, i);
            const double e = unit(eng);
            switch (noise) {
            case LayerNoise::Weight:
                acc += (w + std::abs(w) * e) * x;
                break;
            case LayerNoise::Input:
                acc += w * (x + std::abs(x) * e);
                break;
            case LayerNoise::UnscaledInput:
                acc += w * (x + e);
                break;
            }
        }
        out[s] = acc;
    }
    return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty()) {
        throw ContractError("KS statistic needs two nonempty samples");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) {
            ++i;
        }
        while (j < b.size() && b[j] <= v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

LayerSetup random_layer(int width, Rng& rng, int input_count, double input_scale)
{
    if (width < 1 || input_count < 1) {
        throw ContractError("random layer needs width >= 1 and at least one input");
    }
    std::normal_distribution<double> unit(0.0, 1.0);
    LayerSetup l;
    l.weights.resize(width);
    for (auto& w : l.weights) {
        w = unit(rng);
    }
    l.inputs.resize(input_count, width);
    for (Eigen::Index r = 0; r < l.inputs.rows(); ++r) {
        for (Eigen::Index c = 0; c < l.inputs.cols(); ++c) {
            l.inputs(r, c) = input_scale * unit(rng);
        }
    }
    return l;
}

double noise_equivalence_ks(int width, std::size_t samples, Rng& rng, LayerNoise against)
{
    auto layer = random_layer(width, rng);
    return noise_equivalence_ks(layer, samples, rng, against);
}

double noise_equivalence_ks(const LayerSetup& layer, std::size_t samples, Rng& rng, LayerNoise against)
{
    auto weight_side = layer_output_samples(layer.weights, layer.inputs, samples, LayerNoise::Weight, rng);
    auto other_side = layer_output_samples(layer.weights, layer.inputs, samples, against, rng);
    return ks_statistic(std::move(weight_side), std::move(other_side));
}

} // namespace samgp
