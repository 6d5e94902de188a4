#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "samgp/data.hpp"
#include "samgp/inference.hpp"

namespace samgp {

// Self-contained trained model: raw inputs in, predictions in target units out.
struct ModelBundle {
    std::vector<ModelMember> members;
    PredictionBounds bounds;          // on the model's internal target scale
    StandardizationStats input_stats; // raw inputs -> model inputs
    double target_mean { 0.0 };       // model target scale -> target units
    double target_stddev { 1.0 };
    std::vector<std::string> feature_names;
    std::string target_name;
    bool reduction { true };

    // `raw` columns must follow feature_names.
    [[nodiscard]] Eigen::VectorXd predict(const Eigen::MatrixXd& raw) const;
};

std::string bundle_to_json(const ModelBundle& b);
// Throws IngestionError on a malformed document.
ModelBundle bundle_from_json(std::string_view text);

void save_bundle(const ModelBundle& b, const std::filesystem::path& path);
ModelBundle load_bundle(const std::filesystem::path& path);

} // namespace samgp
