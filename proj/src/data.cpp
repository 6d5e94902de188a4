#include "samgp/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <fmt/core.h>

#include "samgp/error.hpp"
#include "samgp/random.hpp"

namespace samgp {

namespace {

std::string trim(std::string_view s)
{
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// RFC-4180 field splitting (quoted fields may contain commas and doubled quotes).
std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

std::optional<double> parse_number(const std::string& s)
{
    if (s.empty()) {
        return std::nullopt;
    }
    double v {};
    auto const* first = s.data();
    auto const* last = s.data() + s.size();
    if (*first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc {} || ptr != last || !std::isfinite(v)) {
        return std::nullopt;
    }
    return v;
}

} // namespace

void Dataset::validate() const
{
    if (features.rows() != target.size()) {
        throw ContractError(fmt::format("dataset has {} feature rows but {} targets", features.rows(), target.size()));
    }
    if (features.cols() < 1) {
        throw ContractError("dataset needs at least one feature column");
    }
    if (static_cast<Eigen::Index>(names.size()) != features.cols()) {
        throw ContractError("dataset column names do not match the feature count");
    }
    if (!features.allFinite() || !target.allFinite()) {
        throw ContractError("dataset contains non-finite values");
    }
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const
{
    Dataset out;
    out.names = names;
    out.target_name = target_name;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
    out.target.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto r = rows[i];
        out.features.row(static_cast<Eigen::Index>(i)) = features.row(r);
        out.target(static_cast<Eigen::Index>(i)) = target(r);
    }
    return out;
}

StandardizationStats StandardizationStats::fit(const Eigen::MatrixXd& m)
{
    StandardizationStats s;
    const auto n = static_cast<double>(m.rows());
    s.means = m.colwise().mean().transpose();
    s.stddevs.resize(m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        double ss = (m.col(j).array() - s.means(j)).square().sum();
        double sd = std::sqrt(ss / n);
        // relative guard so columns that are constant up to rounding count as constant
        if (!(sd > 1e-12 * (1.0 + std::abs(s.means(j))))) {
            sd = 1.0;
        }
        s.stddevs(j) = sd;
    }
    return s;
}

StandardizationStats StandardizationStats::identity(Eigen::Index cols)
{
    return { Eigen::VectorXd::Zero(cols), Eigen::VectorXd::Ones(cols) };
}

Eigen::MatrixXd StandardizationStats::apply(const Eigen::MatrixXd& m) const
{
    if (m.cols() != means.size()) {
        throw ContractError(fmt::format("standardization expects {} columns, got {}", means.size(), m.cols()));
    }
    Eigen::MatrixXd z(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        z.col(j) = (m.col(j).array() - means(j)) / stddevs(j);
    }
    return z;
}

Eigen::MatrixXd StandardizationStats::invert(const Eigen::MatrixXd& z) const
{
    if (z.cols() != means.size()) {
        throw ContractError(fmt::format("standardization expects {} columns, got {}", means.size(), z.cols()));
    }
    Eigen::MatrixXd m(z.rows(), z.cols());
    for (Eigen::Index j = 0; j < z.cols(); ++j) {
        m.col(j) = z.col(j).array() * stddevs(j) + means(j);
    }
    return m;
}

Dataset load_csv(const std::filesystem::path& path, const std::optional<std::string>& target_column)
{
    std::ifstream in(path);
    if (!in) {
        throw IngestionError(fmt::format("cannot open '{}'", path.string()));
    }
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (!trim(line).empty()) {
            header = split_fields(line);
            break;
        }
    }
    if (header.empty()) {
        throw IngestionError(fmt::format("'{}' is empty", path.string()));
    }
    if (header.size() < 2) {
        throw IngestionError(fmt::format("'{}' needs at least one feature column and a target column", path.string()));
    }

    std::size_t target_idx = header.size() - 1;
    if (target_column) {
        auto it = std::find(header.begin(), header.end(), *target_column);
        if (it == header.end()) {
            throw IngestionError(fmt::format("target column '{}' not found in '{}'", *target_column, path.string()));
        }
        target_idx = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<std::vector<double>> rows;
    std::size_t data_row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        ++data_row;
        auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw IngestionError(fmt::format("row {} (line {}) has {} fields, header has {}", data_row, line_no, fields.size(), header.size()));
        }
        std::vector<double> values(fields.size());
        for (std::size_t c = 0; c < fields.size(); ++c) {
            auto v = parse_number(fields[c]);
            if (!v) {
                throw IngestionError(fmt::format("row {} (line {}), column '{}': non-numeric value '{}'", data_row, line_no, header[c], fields[c]));
            }
            values[c] = *v;
        }
        rows.push_back(std::move(values));
    }
    if (rows.empty()) {
        throw IngestionError(fmt::format("'{}' has a header but no data rows", path.string()));
    }

    Dataset d;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(header.size() - 1);
    d.features.resize(n, p);
    d.target.resize(n);
    d.target_name = header[target_idx];
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c != target_idx) {
            d.names.push_back(header[c]);
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        Eigen::Index j = 0;
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (c == target_idx) {
                d.target(i) = r[c];
            } else {
                d.features(i, j++) = r[c];
            }
        }
    }
    return d;
}

Split split(const Dataset& d, const SplitSpec& s)
{
    d.validate();
    const auto n = static_cast<std::size_t>(d.rows());
    if (n < 2) {
        throw ContractError("splitting needs at least two rows");
    }

    SplitRule rule = s.rule;
    bool fell_back = false;
    if (rule == SplitRule::Fixed100 && n < 200) {
        rule = SplitRule::Ratio5050;
        fell_back = true;
    }

    std::size_t n_train = 0;
    switch (rule) {
    case SplitRule::Fixed100:
        n_train = 100;
        break;
    case SplitRule::Ratio5050:
        n_train = n / 2;
        break;
    case SplitRule::Ratio8020:
        n_train = (n * 4) / 5;
        break;
    }
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    std::vector<Eigen::Index> idx(n);
    std::iota(idx.begin(), idx.end(), Eigen::Index { 0 });
    Rng rng(derive_seed(s.seed, { 0x5b1u }));
    shuffle_range(idx.begin(), idx.end(), rng);

    Split out;
    out.train_rows.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test_rows.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
    out.train = d.subset(out.train_rows);
    out.test = d.subset(out.test_rows);
    out.fell_back = fell_back;
    return out;
}

Dataset inject_label_noise(const Dataset& train, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ContractError(fmt::format("label noise sigma must be a nonnegative number, got {}", sigma));
    }
    Dataset out = train;
    if (sigma == 0.0) {
        return out;
    }
    Rng rng(seed);
    std::normal_distribution<double> noise(0.0, sigma);
    for (Eigen::Index i = 0; i < out.target.size(); ++i) {
        out.target(i) += noise(rng);
    }
    return out;
}

Standardized standardize(const Dataset& train, const Dataset& test, bool standardize_target)
{
    if (train.rows() < 1) {
        throw ContractError("cannot standardize an empty training set");
    }
    Standardized s;
    s.feature_stats = StandardizationStats::fit(train.features);
    s.train = train;
    s.test = test;
    s.train.features = s.feature_stats.apply(train.features);
    if (test.rows() > 0) {
        s.test.features = s.feature_stats.apply(test.features);
    }
    if (standardize_target) {
        s.target_stats = StandardizationStats::fit(train.target);
        s.train.target = s.target_stats.apply(train.target).col(0);
        if (test.rows() > 0) {
            s.test.target = s.target_stats.apply(test.target).col(0);
        }
    } else {
        s.target_stats = StandardizationStats::identity(1);
    }
    return s;
}

Prepared prepare(const Dataset& d, const SplitSpec& s, bool standardize_target)
{
    auto parts = split(d, s);
    auto z = standardize(parts.train, parts.test, standardize_target);
    Prepared out;
    out.train = std::move(z.train);
    out.test = std::move(z.test);
    out.feature_stats = std::move(z.feature_stats);
    out.target_stats = std::move(z.target_stats);
    out.train_rows = std::move(parts.train_rows);
    out.test_rows = std::move(parts.test_rows);
    out.fell_back = parts.fell_back;
    if (s.label_noise_sigma != 0.0) {
        out.train = inject_label_noise(out.train, s.label_noise_sigma, derive_seed(s.seed, { 0x701u }));
    }
    return out;
}

std::string to_string(SplitRule r)
{
    switch (r) {
    case SplitRule::Fixed100:
        return "fixed-100";
    case SplitRule::Ratio5050:
        return "ratio-50-50";
    case SplitRule::Ratio8020:
        return "ratio-80-20";
    }
    return "?";
}

std::optional<SplitRule> parse_split_rule(const std::string& s)
{
    if (s == "fixed-100") {
        return SplitRule::Fixed100;
    }
    if (s == "ratio-50-50") {
        return SplitRule::Ratio5050;
    }
    if (s == "ratio-80-20") {
        return SplitRule::Ratio8020;
    }
    return std::nullopt;
}

} // namespace samgp
