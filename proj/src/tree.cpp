#include "samgp/tree.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include <fmt/core.h>

#include "samgp/error.hpp"

namespace samgp {

namespace {

inline double clampv(double v) noexcept
{
    return std::clamp(v, -kValueClamp, kValueClamp);
}

inline double sigmoid(double x) noexcept
{
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

// The single source of truth for primitive arithmetic; the vector path calls it per element
// so per-instance and batched evaluation agree bit for bit.
inline double raw_apply(Op op, double a, double b) noexcept
{
    switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::AQ: return a / std::sqrt(1.0 + b * b);
    case Op::Square: return a * a;
    case Op::Sqrt: return std::sqrt(std::abs(a));
    case Op::Abs: return std::abs(a);
    case Op::Log: return std::log(1.0 + std::sqrt(a * a));
    case Op::Max: return std::max(a, b);
    case Op::Min: return std::min(a, b);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Neg: return -a;
    case Op::Sigmoid: return sigmoid(a);
    }
    return 0.0;
}

Eigen::ArrayXd apply_vec(Op op, const Eigen::ArrayXd& a, const Eigen::ArrayXd* b)
{
    Eigen::ArrayXd out(a.size());
    if (arity(op) == 2) {
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            out(i) = clampv(raw_apply(op, a(i), (*b)(i)));
        }
    } else {
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            out(i) = clampv(raw_apply(op, a(i), 0.0));
        }
    }
    return out;
}

constexpr std::array<std::string_view, kAllOps.size()> kOpNames {
    "add", "sub", "mul", "AQ", "square", "sqrt", "abs", "log", "max", "min", "sin", "cos", "neg", "sigmoid",
};

} // namespace

int arity(Op op) noexcept
{
    switch (op) {
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::AQ:
    case Op::Max:
    case Op::Min:
        return 2;
    default:
        return 1;
    }
}

std::string_view op_name(Op op) noexcept
{
    return kOpNames[static_cast<std::size_t>(op)];
}

std::optional<Op> op_from_name(std::string_view name) noexcept
{
    for (std::size_t i = 0; i < kOpNames.size(); ++i) {
        if (kOpNames[i] == name) {
            return static_cast<Op>(i);
        }
    }
    return std::nullopt;
}

double apply_op(Op op, double a, double b) noexcept
{
    return clampv(raw_apply(op, a, b));
}

Eigen::ArrayXd primitive_semantics(std::string_view name, std::span<const Eigen::ArrayXd> inputs)
{
    auto op = op_from_name(name);
    if (!op) {
        throw StructuralError(fmt::format("unknown primitive '{}'", name));
    }
    auto k = static_cast<std::size_t>(arity(*op));
    if (inputs.size() != k) {
        throw ContractError(fmt::format("primitive '{}' takes {} inputs, got {}", name, k, inputs.size()));
    }
    if (k == 2 && inputs[0].size() != inputs[1].size()) {
        throw ContractError(fmt::format("primitive '{}' got inputs of length {} and {}", name, inputs[0].size(), inputs[1].size()));
    }
    return apply_vec(*op, inputs[0], k == 2 ? &inputs[1] : nullptr);
}

FeatureTree::FeatureTree(std::vector<Node> nodes) : nodes_(std::move(nodes))
{
    if (nodes_.empty()) {
        throw StructuralError("a tree needs at least one node");
    }
    // prefix validity: the count of open argument slots must reach zero exactly at the end
    long open = 1;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (open <= 0) {
            throw StructuralError("trailing nodes after a complete expression");
        }
        open += nodes_[i].arity() - 1;
    }
    if (open != 0) {
        throw StructuralError("incomplete prefix expression");
    }
    auto levels = node_levels();
    depth_ = *std::max_element(levels.begin(), levels.end());

    std::string bytes;
    bytes.reserve(nodes_.size() * 3);
    for (const auto& n : nodes_) {
        if (n.is_var) {
            // 0x80 tag followed by a 16-bit little-endian index
            bytes.push_back(static_cast<char>(0x80));
            bytes.push_back(static_cast<char>(n.var & 0xffU));
            bytes.push_back(static_cast<char>((n.var >> 8U) & 0xffU));
        } else {
            bytes.push_back(static_cast<char>(n.op));
        }
    }
    key_ = TreeKey(std::move(bytes));
}

std::uint32_t FeatureTree::max_var() const noexcept
{
    std::uint32_t m = 0;
    for (const auto& n : nodes_) {
        if (n.is_var) {
            m = std::max(m, n.var);
        }
    }
    return m;
}

std::size_t FeatureTree::subtree_end(std::size_t pos) const
{
    if (pos >= nodes_.size()) {
        throw ContractError("subtree position out of range");
    }
    long open = 1;
    std::size_t i = pos;
    while (open > 0) {
        open += nodes_[i].arity() - 1;
        ++i;
    }
    return i;
}

std::vector<int> FeatureTree::node_levels() const
{
    std::vector<int> levels(nodes_.size(), 0);
    // stack of (level, remaining children) for open function nodes
    std::vector<std::pair<int, int>> stack;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        int level = stack.empty() ? 0 : stack.back().first + 1;
        levels[i] = level;
        if (!stack.empty()) {
            if (--stack.back().second == 0) {
                stack.pop_back();
            }
        }
        if (nodes_[i].arity() > 0) {
            stack.emplace_back(level, nodes_[i].arity());
        }
    }
    return levels;
}

std::span<const Node> FeatureTree::subtree(std::size_t pos) const
{
    auto end = subtree_end(pos);
    return { nodes_.data() + pos, end - pos };
}

FeatureTree FeatureTree::replace_subtree(std::size_t pos, std::span<const Node> replacement) const
{
    auto end = subtree_end(pos);
    std::vector<Node> out;
    out.reserve(nodes_.size() - (end - pos) + replacement.size());
    out.insert(out.end(), nodes_.begin(), nodes_.begin() + static_cast<std::ptrdiff_t>(pos));
    out.insert(out.end(), replacement.begin(), replacement.end());
    out.insert(out.end(), nodes_.begin() + static_cast<std::ptrdiff_t>(end), nodes_.end());
    return FeatureTree(std::move(out));
}

TreeKey canonical_key(const FeatureTree& t)
{
    return t.key();
}

std::string to_sexpr(const FeatureTree& t)
{
    std::string out;
    std::vector<int> remaining; // children still to print for each open paren
    for (const auto& n : t.nodes()) {
        if (!out.empty() && out.back() != '(') {
            out.push_back(' ');
        }
        if (n.is_var) {
            out += fmt::format("x{}", n.var);
        } else {
            out.push_back('(');
            out += op_name(n.op);
            remaining.push_back(n.arity());
            continue;
        }
        while (!remaining.empty() && --remaining.back() == 0) {
            remaining.pop_back();
            out.push_back(')');
        }
    }
    return out;
}

namespace {

class SexprParser {
public:
    explicit SexprParser(std::string_view s) : s_(s) {}

    std::vector<Node> parse()
    {
        std::vector<Node> out;
        expr(out);
        skip_ws();
        if (pos_ != s_.size()) {
            fail("trailing characters");
        }
        return out;
    }

private:
    void expr(std::vector<Node>& out)
    {
        skip_ws();
        if (pos_ >= s_.size()) {
            fail("unexpected end of input");
        }
        if (s_[pos_] == '(') {
            ++pos_;
            auto name = token();
            auto op = op_from_name(name);
            if (!op) {
                fail(fmt::format("unknown primitive '{}'", name));
            }
            out.push_back(Node::function(*op));
            for (int i = 0; i < arity(*op); ++i) {
                expr(out);
            }
            skip_ws();
            if (pos_ >= s_.size() || s_[pos_] != ')') {
                fail(fmt::format("expected ')' closing '{}'", name));
            }
            ++pos_;
            return;
        }
        auto tok = token();
        if (tok.size() < 2 || tok[0] != 'x' || !std::all_of(tok.begin() + 1, tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; })) {
            fail(fmt::format("expected a terminal like x0, got '{}'", tok));
        }
        unsigned long v = std::stoul(std::string(tok.substr(1)));
        if (v > 0xffffUL) {
            fail("variable index too large");
        }
        out.push_back(Node::variable(static_cast<std::uint32_t>(v)));
    }

    std::string_view token()
    {
        skip_ws();
        auto b = pos_;
        while (pos_ < s_.size() && s_[pos_] != '(' && s_[pos_] != ')' && std::isspace(static_cast<unsigned char>(s_[pos_])) == 0) {
            ++pos_;
        }
        return s_.substr(b, pos_ - b);
    }

    void skip_ws()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])) != 0) {
            ++pos_;
        }
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw StructuralError(fmt::format("s-expression parse error at offset {}: {}", pos_, what));
    }

    std::string_view s_;
    std::size_t pos_ { 0 };
};

} // namespace

FeatureTree parse_sexpr(std::string_view text)
{
    return FeatureTree(SexprParser(text).parse());
}

Eigen::ArrayXd evaluate_tree(const FeatureTree& t, const Eigen::MatrixXd& X)
{
    return evaluate_tree(t, X, NodeHook {});
}

Eigen::ArrayXd evaluate_tree(const FeatureTree& t, const Eigen::MatrixXd& X, const NodeHook& hook)
{
    const auto& nodes = t.nodes();
    std::vector<Eigen::ArrayXd> stack;
    stack.reserve(nodes.size());
    for (std::size_t k = nodes.size(); k-- > 0;) {
        const auto& n = nodes[k];
        Eigen::ArrayXd value;
        if (n.is_var) {
            if (static_cast<Eigen::Index>(n.var) >= X.cols()) {
                throw StructuralError(fmt::format("variable x{} out of range for {} input columns", n.var, X.cols()));
            }
            value = X.col(n.var).array();
        } else if (n.arity() == 2) {
            Eigen::ArrayXd a = std::move(stack.back());
            stack.pop_back();
            Eigen::ArrayXd b = std::move(stack.back());
            stack.pop_back();
            value = apply_vec(n.op, a, &b);
        } else {
            Eigen::ArrayXd a = std::move(stack.back());
            stack.pop_back();
            value = apply_vec(n.op, a, nullptr);
        }
        if (hook) {
            hook(k, value);
        }
        stack.push_back(std::move(value));
    }
    return std::move(stack.back());
}

Eigen::MatrixXd evaluate_trees(std::span<const FeatureTree> trees, const Eigen::MatrixXd& X)
{
    Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(trees.size()));
    for (std::size_t j = 0; j < trees.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j)) = evaluate_tree(trees[j], X).matrix();
    }
    return out;
}

} // namespace samgp
