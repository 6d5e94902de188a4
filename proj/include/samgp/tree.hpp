#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace samgp {

// Every primitive output is clamped to this magnitude so nested growth stays finite.
inline constexpr double kValueClamp = 1e12;
inline constexpr int kMaxTreeDepth = 10;
inline constexpr std::size_t kMaxTrees = 10;

enum class Op : std::uint8_t {
    Add,
    Sub,
    Mul,
    AQ,
    Square,
    Sqrt,
    Abs,
    Log,
    Max,
    Min,
    Sin,
    Cos,
    Neg,
    Sigmoid,
};

inline constexpr std::array kAllOps {
    Op::Add, Op::Sub, Op::Mul, Op::AQ, Op::Square, Op::Sqrt, Op::Abs,
    Op::Log, Op::Max, Op::Min, Op::Sin, Op::Cos, Op::Neg, Op::Sigmoid,
};

int arity(Op op) noexcept;
std::string_view op_name(Op op) noexcept;
std::optional<Op> op_from_name(std::string_view name) noexcept;

// Scalar primitive semantics; `b` is ignored for unary ops. Always finite for finite inputs.
double apply_op(Op op, double a, double b = 0.0) noexcept;

// Elementwise semantics over whole vectors, looked up by name. Throws StructuralError for
// an unknown name and ContractError for mismatched lengths or wrong argument count.
Eigen::ArrayXd primitive_semantics(std::string_view name, std::span<const Eigen::ArrayXd> inputs);

struct Node {
    bool is_var { false };
    Op op { Op::Add };
    std::uint32_t var { 0 };

    static Node variable(std::uint32_t index) noexcept { return { true, Op::Add, index }; }
    static Node function(Op o) noexcept { return { false, o, 0 }; }

    [[nodiscard]] int arity() const noexcept { return is_var ? 0 : samgp::arity(op); }

    friend bool operator==(const Node&, const Node&) = default;
};

// Exact structural key: a compact byte encoding of the prefix node sequence.
class TreeKey {
public:
    TreeKey() = default;
    explicit TreeKey(std::string bytes) : bytes_(std::move(bytes)), hash_(std::hash<std::string> {}(bytes_)) {}

    [[nodiscard]] std::size_t hash() const noexcept { return hash_; }
    [[nodiscard]] const std::string& bytes() const noexcept { return bytes_; }

    friend bool operator==(const TreeKey& a, const TreeKey& b) noexcept { return a.hash_ == b.hash_ && a.bytes_ == b.bytes_; }

private:
    std::string bytes_;
    std::size_t hash_ { 0 };
};

struct TreeKeyHash {
    std::size_t operator()(const TreeKey& k) const noexcept { return k.hash(); }
};

// A single constructed feature, stored as a prefix-ordered node sequence.
class FeatureTree {
public:
    FeatureTree() = default;
    // Throws StructuralError unless `nodes` is a complete prefix expression.
    explicit FeatureTree(std::vector<Node> nodes);

    static FeatureTree terminal(std::uint32_t var) { return FeatureTree({ Node::variable(var) }); }

    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] int depth() const noexcept { return depth_; }
    [[nodiscard]] std::uint32_t max_var() const noexcept;

    // One past the last node of the subtree rooted at `pos`.
    [[nodiscard]] std::size_t subtree_end(std::size_t pos) const;
    // Depth of every node measured from the root (root = 0).
    [[nodiscard]] std::vector<int> node_levels() const;

    [[nodiscard]] FeatureTree replace_subtree(std::size_t pos, std::span<const Node> replacement) const;
    [[nodiscard]] std::span<const Node> subtree(std::size_t pos) const;

    [[nodiscard]] const TreeKey& key() const noexcept { return key_; }

    friend bool operator==(const FeatureTree& a, const FeatureTree& b) noexcept { return a.nodes_ == b.nodes_; }

private:
    std::vector<Node> nodes_;
    int depth_ { 0 };
    TreeKey key_;
};

TreeKey canonical_key(const FeatureTree& t);

// Prefix s-expression, e.g. "(AQ (add x0 x1) x2)". A bare terminal prints as "x0".
std::string to_sexpr(const FeatureTree& t);
FeatureTree parse_sexpr(std::string_view text);

// Called once per node after its (clamped) output is computed; may modify the output.
using NodeHook = std::function<void(std::size_t position, Eigen::ArrayXd& value)>;

// Semantics of `t` on every row of `X`. Throws StructuralError for an out-of-range variable.
Eigen::ArrayXd evaluate_tree(const FeatureTree& t, const Eigen::MatrixXd& X);
Eigen::ArrayXd evaluate_tree(const FeatureTree& t, const Eigen::MatrixXd& X, const NodeHook& hook);

// Columns are the semantics of each tree.
Eigen::MatrixXd evaluate_trees(std::span<const FeatureTree> trees, const Eigen::MatrixXd& X);

} // namespace samgp
