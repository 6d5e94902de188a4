#include "samgp/bundle.hpp"

#include <fstream>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "samgp/error.hpp"

namespace samgp {

using nlohmann::json;

namespace {

constexpr const char* kFormat = "samgp-model";
constexpr int kVersion = 1;

json vec_json(const Eigen::VectorXd& v)
{
    return json(std::vector<double>(v.begin(), v.end()));
}

Eigen::VectorXd json_vec(const json& j)
{
    auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

json member_json(const ModelMember& m)
{
    json trees = json::array();
    for (const auto& s : m.trees) {
        json snaps = json::array();
        for (std::size_t pos = 0; pos < s.stored.size(); ++pos) {
            if (!s.stored[pos].empty()) {
                snaps.push_back({ { "position", pos }, { "values", s.stored[pos] } });
            }
        }
        trees.push_back({ { "expression", to_sexpr(s.tree) }, { "snapshots", std::move(snaps) } });
    }
    return {
        { "trees", std::move(trees) },
        { "ridge",
            {
                { "alpha", m.model.alpha },
                { "weights", vec_json(m.model.weights) },
                { "target_mean", m.model.target_mean },
                { "feature_means", vec_json(m.model.feature_stats.means) },
                { "feature_stddevs", vec_json(m.model.feature_stats.stddevs) },
            } },
    };
}

ModelMember member_from_json(const json& j)
{
    ModelMember m;
    for (const auto& t : j.at("trees")) {
        SnapshotTree s;
        s.tree = parse_sexpr(t.at("expression").get<std::string>());
        s.stored.assign(s.tree.size(), {});
        for (const auto& snap : t.at("snapshots")) {
            auto pos = snap.at("position").get<std::size_t>();
            if (pos >= s.tree.size() || s.tree.nodes()[pos].is_var) {
                throw IngestionError(fmt::format("snapshot position {} is not an internal node of {}", pos, to_sexpr(s.tree)));
            }
            s.stored[pos] = snap.at("values").get<std::vector<double>>();
        }
        for (std::size_t pos = 0; pos < s.tree.size(); ++pos) {
            if (!s.tree.nodes()[pos].is_var && s.stored[pos].empty()) {
                throw IngestionError(fmt::format("missing snapshot for node {} of {}", pos, to_sexpr(s.tree)));
            }
        }
        m.trees.push_back(std::move(s));
    }
    const auto& r = j.at("ridge");
    m.model.alpha = r.at("alpha").get<double>();
    m.model.weights = json_vec(r.at("weights"));
    m.model.target_mean = r.at("target_mean").get<double>();
    m.model.feature_stats.means = json_vec(r.at("feature_means"));
    m.model.feature_stats.stddevs = json_vec(r.at("feature_stddevs"));
    const auto p = static_cast<Eigen::Index>(m.trees.size());
    if (m.model.weights.size() != p || m.model.feature_stats.means.size() != p || m.model.feature_stats.stddevs.size() != p) {
        throw IngestionError(fmt::format("member has {} trees but ridge vectors of other lengths", p));
    }
    return m;
}

} // namespace

Eigen::VectorXd ModelBundle::predict(const Eigen::MatrixXd& raw) const
{
    if (raw.cols() != input_stats.means.size()) {
        throw ContractError(fmt::format("model expects {} input columns, got {}", input_stats.means.size(), raw.cols()));
    }
    Eigen::VectorXd z = ensemble_predict(members, input_stats.apply(raw), bounds, reduction);
    return (z.array() * target_stddev + target_mean).matrix();
}

std::string bundle_to_json(const ModelBundle& b)
{
    json members = json::array();
    for (const auto& m : b.members) {
        members.push_back(member_json(m));
    }
    json doc = {
        { "format", kFormat },
        { "version", kVersion },
        { "feature_names", b.feature_names },
        { "target_name", b.target_name },
        { "input_stats", { { "means", vec_json(b.input_stats.means) }, { "stddevs", vec_json(b.input_stats.stddevs) } } },
        { "target_stats", { { "mean", b.target_mean }, { "stddev", b.target_stddev } } },
        { "bounds", { { "y_min", b.bounds.y_min }, { "y_max", b.bounds.y_max } } },
        { "reduction", b.reduction },
        { "members", std::move(members) },
    };
    return doc.dump(1) + "\n";
}

ModelBundle bundle_from_json(std::string_view text)
{
    try {
        json doc = json::parse(text);
        if (doc.at("format").get<std::string>() != kFormat || doc.at("version").get<int>() != kVersion) {
            throw IngestionError("not a version 1 samgp model document");
        }
        ModelBundle b;
        b.feature_names = doc.at("feature_names").get<std::vector<std::string>>();
        b.target_name = doc.at("target_name").get<std::string>();
        b.input_stats.means = json_vec(doc.at("input_stats").at("means"));
        b.input_stats.stddevs = json_vec(doc.at("input_stats").at("stddevs"));
        b.target_mean = doc.at("target_stats").at("mean").get<double>();
        b.target_stddev = doc.at("target_stats").at("stddev").get<double>();
        b.bounds.y_min = doc.at("bounds").at("y_min").get<double>();
        b.bounds.y_max = doc.at("bounds").at("y_max").get<double>();
        b.reduction = doc.at("reduction").get<bool>();
        for (const auto& m : doc.at("members")) {
            b.members.push_back(member_from_json(m));
        }
        if (b.members.empty()) {
            throw IngestionError("model document has no members");
        }
        if (b.input_stats.means.size() != b.input_stats.stddevs.size()
            || static_cast<std::size_t>(b.input_stats.means.size()) != b.feature_names.size()) {
            throw IngestionError("input statistics do not match the feature names");
        }
        return b;
    } catch (const json::exception& e) {
        throw IngestionError(fmt::format("malformed model document: {}", e.what()));
    } catch (const StructuralError& e) {
        throw IngestionError(fmt::format("malformed tree in model document: {}", e.what()));
    }
}

void save_bundle(const ModelBundle& b, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(fmt::format("cannot write {}", path.string()));
    }
    out << bundle_to_json(b);
}

ModelBundle load_bundle(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestionError(fmt::format("cannot open {}", path.string()));
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return bundle_from_json(ss.str());
}

} // namespace samgp
