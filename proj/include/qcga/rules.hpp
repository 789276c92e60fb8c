#pragma once

/// @file rules.hpp
/// @brief The four generic QC rules, Boolean procedures over them, and their evaluation
/// over a chronological stream of standardized control measurements.
///
/// Measurements are standardized per level (in-control mean 0, SD 1), so every decision
/// limit is expressed in SD units. A rule is true ("reject") when its statistic over the
/// last n measurements is strictly greater than its limit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qcga/errors.hpp"

namespace qcga {

enum class RuleKind : std::uint8_t { SingleValue = 0, Range = 1, Mean = 2, StdDev = 3 };

inline constexpr int kMaxWindow = 4;
inline constexpr double kMaxLimit = 6.3;

inline char rule_letter(RuleKind kind) {
    switch (kind) {
    case RuleKind::SingleValue: return 'S';
    case RuleKind::Range: return 'R';
    case RuleKind::Mean: return 'M';
    case RuleKind::StdDev: return 'D';
    }
    return '?';
}

inline int min_window(RuleKind kind) { return kind == RuleKind::SingleValue ? 1 : 2; }

struct Rule {
    RuleKind kind = RuleKind::SingleValue;
    int n = 1;
    double limit = 0.0;

    friend bool operator==(const Rule&, const Rule&) = default;
};

/// True when n and limit respect the generic-rule bounds of the rule's class.
inline bool within_bounds(const Rule& rule) {
    return rule.n >= min_window(rule.kind) && rule.n <= kMaxWindow && rule.limit >= 0.0 &&
           rule.limit <= kMaxLimit + 1e-9;
}

/// Limit formatted with one decimal when it lies on the 0.1 grid.
inline std::string format_limit(double limit) {
    char buf[32];
    const double tenths = limit * 10.0;
    if (std::fabs(tenths - std::round(tenths)) < 1e-9)
        std::snprintf(buf, sizeof buf, "%.1f", limit);
    else
        std::snprintf(buf, sizeof buf, "%.10g", limit);
    return buf;
}

inline std::string to_string(const Rule& rule) {
    return std::string(1, rule_letter(rule.kind)) + "(" + std::to_string(rule.n) + "," +
           format_limit(rule.limit) + ")";
}

/// Rule verdict over `window` (oldest first, newest last). Only the last n values are
/// inspected; a window shorter than n is insufficient history and yields false.
inline bool evaluate_rule(const Rule& rule, std::span<const double> window) {
    const auto n = static_cast<std::size_t>(rule.n);
    if (rule.n < 1 || window.size() < n) return false;
    const auto last = window.last(n);
    switch (rule.kind) {
    case RuleKind::SingleValue:
        return std::all_of(last.begin(), last.end(),
                           [&](double v) { return std::fabs(v) > rule.limit; });
    case RuleKind::Range: {
        const auto [lo, hi] = std::minmax_element(last.begin(), last.end());
        return (*hi - *lo) > rule.limit;
    }
    case RuleKind::Mean: {
        double sum = 0.0;
        for (double v : last) sum += v;
        return std::fabs(sum / static_cast<double>(n)) > rule.limit;
    }
    case RuleKind::StdDev: {
        if (n < 2) return false;
        double sum = 0.0;
        for (double v : last) sum += v;
        const double mean = sum / static_cast<double>(n);
        double ss = 0.0;
        for (double v : last) ss += (v - mean) * (v - mean);
        return std::sqrt(ss / static_cast<double>(n - 1)) > rule.limit;
    }
    }
    return false;
}

enum class OpKind : std::uint8_t { And = 0, Or = 1 };

inline const char* to_string(OpKind kind) { return kind == OpKind::And ? "AND" : "OR"; }

/// Binary connective. Higher priority binds tighter; equal priorities associate left.
struct Operator {
    OpKind kind = OpKind::Or;
    int priority = 0;  // two bits: [0, 3]

    friend bool operator==(const Operator&, const Operator&) = default;
};

inline constexpr int kMaxPriority = 3;
inline constexpr int kMaxLevels = 2;
inline constexpr int kMaxPerLevel = 4;

/// Rules interleaved with operators, plus the control configuration the procedure is
/// designed for. `levels` / `per_level` are unset for procedures parsed from text; the
/// simulation plan supplies them in that case.
struct Procedure {
    std::vector<Rule> rules;
    std::vector<Operator> operators;
    std::optional<int> levels;
    std::optional<int> per_level;

    [[nodiscard]] bool empty() const noexcept { return rules.empty(); }
    [[nodiscard]] int operator_count() const noexcept { return static_cast<int>(operators.size()); }

    void validate() const {
        if (!rules.empty() && operators.size() + 1 != rules.size())
            throw InvalidArgument("procedure needs exactly one operator between consecutive rules");
        if (rules.empty() && !operators.empty())
            throw InvalidArgument("empty procedure cannot carry operators");
        for (const auto& r : rules)
            if (!within_bounds(r)) throw InvalidArgument("rule " + to_string(r) + " out of bounds");
        for (const auto& op : operators)
            if (op.priority < 0 || op.priority > kMaxPriority)
                throw InvalidArgument("operator priority must lie in [0,3]");
        if (levels && (*levels < 1 || *levels > kMaxLevels))
            throw InvalidArgument("levels must be 1 or 2");
        if (per_level && (*per_level < 1 || *per_level > kMaxPerLevel))
            throw InvalidArgument("measurements per level must lie in [1,4]");
    }

    friend bool operator==(const Procedure&, const Procedure&) = default;
};

/// Binary expression tree over a procedure's rules. Leaves index into `rules()`.
class ExprTree {
public:
    enum class NodeKind : std::uint8_t { Leaf, And, Or };

    struct Node {
        NodeKind kind = NodeKind::Leaf;
        std::size_t rule = 0;  // leaves
        std::size_t lhs = 0;   // internal nodes
        std::size_t rhs = 0;
    };

    ExprTree() = default;
    ExprTree(std::vector<Rule> rules, std::vector<Node> nodes, std::size_t root)
        : rules_(std::move(rules)), nodes_(std::move(nodes)), root_(root) {}

    [[nodiscard]] bool empty() const noexcept { return nodes_.empty(); }
    [[nodiscard]] const std::vector<Rule>& rules() const noexcept { return rules_; }
    [[nodiscard]] const std::vector<Node>& nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::size_t root() const noexcept { return root_; }

    /// Evaluates with a caller-supplied leaf oracle `leaf(rule_index) -> bool`.
    /// Short-circuits; an empty tree is false.
    template <class LeafFn>
    bool evaluate_with(LeafFn&& leaf) const {
        if (nodes_.empty()) return false;
        return eval_node(root_, leaf);
    }

    bool evaluate(std::span<const double> history) const {
        return evaluate_with([&](std::size_t i) { return evaluate_rule(rules_[i], history); });
    }

    /// In-order leaf indices and connectives.
    [[nodiscard]] std::pair<std::vector<std::size_t>, std::vector<OpKind>> flatten() const {
        std::pair<std::vector<std::size_t>, std::vector<OpKind>> out;
        if (!nodes_.empty()) flatten_node(root_, out);
        return out;
    }

private:
    template <class LeafFn>
    bool eval_node(std::size_t index, LeafFn& leaf) const {
        const Node& node = nodes_[index];
        switch (node.kind) {
        case NodeKind::Leaf: return leaf(node.rule);
        case NodeKind::And: return eval_node(node.lhs, leaf) && eval_node(node.rhs, leaf);
        case NodeKind::Or: return eval_node(node.lhs, leaf) || eval_node(node.rhs, leaf);
        }
        return false;
    }

    void flatten_node(std::size_t index,
                      std::pair<std::vector<std::size_t>, std::vector<OpKind>>& out) const {
        const Node& node = nodes_[index];
        if (node.kind == NodeKind::Leaf) {
            out.first.push_back(node.rule);
            return;
        }
        flatten_node(node.lhs, out);
        out.second.push_back(node.kind == NodeKind::And ? OpKind::And : OpKind::Or);
        flatten_node(node.rhs, out);
    }

    std::vector<Rule> rules_;
    std::vector<Node> nodes_;
    std::size_t root_ = 0;
};

namespace detail {

struct ExprBuilder {
    const Procedure& proc;
    std::vector<ExprTree::Node> nodes;
    std::size_t next_op = 0;

    std::size_t leaf(std::size_t rule) {
        nodes.push_back({ExprTree::NodeKind::Leaf, rule, 0, 0});
        return nodes.size() - 1;
    }

    // Precedence climbing: the operand starting at rule `first` absorbs every following
    // operator whose priority is >= min_priority.
    std::size_t climb(std::size_t first, int min_priority) {
        std::size_t lhs = leaf(first);
        while (next_op < proc.operators.size() && proc.operators[next_op].priority >= min_priority) {
            const Operator op = proc.operators[next_op];
            ++next_op;
            const std::size_t rhs = climb(next_op, op.priority + 1);
            nodes.push_back({op.kind == OpKind::And ? ExprTree::NodeKind::And : ExprTree::NodeKind::Or,
                             0, lhs, rhs});
            lhs = nodes.size() - 1;
        }
        return lhs;
    }
};

} // namespace detail

/// Parses the rule/operator sequence into a tree. Higher priority binds tighter; ties
/// associate left to right.
inline ExprTree build_expr(const Procedure& procedure) {
    if (procedure.rules.empty()) return {};
    if (procedure.operators.size() + 1 != procedure.rules.size())
        throw InvalidArgument("procedure needs exactly one operator between consecutive rules");
    detail::ExprBuilder builder{procedure, {}, 0};
    const std::size_t root = builder.climb(0, 0);
    return {procedure.rules, std::move(builder.nodes), root};
}

inline bool evaluate_procedure(const ExprTree& expr, std::span<const double> history) {
    return expr.evaluate(history);
}

namespace detail {

inline std::string notation_node(const ExprTree& tree, std::size_t index) {
    const auto& node = tree.nodes()[index];
    if (node.kind == ExprTree::NodeKind::Leaf) return to_string(tree.rules()[node.rule]);
    const char* op = node.kind == ExprTree::NodeKind::And ? " AND " : " OR ";
    auto operand = [&](std::size_t child) {
        const auto& c = tree.nodes()[child];
        std::string text = notation_node(tree, child);
        if (c.kind != ExprTree::NodeKind::Leaf && c.kind != node.kind) return "(" + text + ")";
        return text;
    };
    return operand(node.lhs) + op + operand(node.rhs);
}

} // namespace detail

/// Text form such as "S(1,1.9) AND (R(4,4.2) OR M(2,1.9))". Chains of one connective are
/// written flat; a subexpression under a different connective is parenthesized. The empty
/// procedure is "NONE".
inline std::string canonical_notation(const ExprTree& tree) {
    if (tree.empty()) return "NONE";
    return detail::notation_node(tree, tree.root());
}

inline std::string canonical_notation(const Procedure& procedure) {
    return canonical_notation(build_expr(procedure));
}

/// Equivalence conventions for counting Boolean propositions over the four rule classes.
enum class PropositionConvention {
    /// Two propositions are the same iff they have the same truth table over the four
    /// class atoms.
    TruthTable,
    /// Two propositions are the same iff their expression trees match after ordering the
    /// operands of every connective. Repeated classes stay distinct leaves and grouping
    /// is significant.
    CommutativeTree,
};

namespace detail {

inline std::string commutative_key(const ExprTree& tree, std::size_t index) {
    const auto& node = tree.nodes()[index];
    if (node.kind == ExprTree::NodeKind::Leaf)
        return std::string(1, rule_letter(tree.rules()[node.rule].kind));
    std::string a = commutative_key(tree, node.lhs);
    std::string b = commutative_key(tree, node.rhs);
    if (b < a) std::swap(a, b);
    return std::string(node.kind == ExprTree::NodeKind::And ? "&" : "|") + "(" + a + "," + b + ")";
}

} // namespace detail

/// Number of distinct propositions built from 1..max_rules rules drawn from the four
/// classes (n and limit ignored) under every operator kind/priority assignment.
inline long count_distinct_propositions(int max_rules,
                                        PropositionConvention convention = PropositionConvention::TruthTable) {
    if (max_rules < 1) throw InvalidArgument("max_rules must be >= 1");
    if (max_rules > 4) throw InvalidArgument("count_distinct_propositions supports max_rules <= 4");

    std::set<std::uint16_t> tables;
    std::set<std::string> trees;
    for (int count = 1; count <= max_rules; ++count) {
        const long atom_combos = 1L << (2 * count);
        const long op_combos = 1L << (3 * (count - 1));
        for (long atoms = 0; atoms < atom_combos; ++atoms) {
            Procedure proc;
            for (int i = 0; i < count; ++i)
                proc.rules.push_back({static_cast<RuleKind>((atoms >> (2 * i)) & 3), 2, 0.0});
            for (long ops = 0; ops < op_combos; ++ops) {
                proc.operators.clear();
                for (int i = 0; i + 1 < count; ++i) {
                    const long code = (ops >> (3 * i)) & 7;
                    proc.operators.push_back({(code & 1) ? OpKind::Or : OpKind::And, static_cast<int>(code >> 1)});
                }
                const ExprTree tree = build_expr(proc);
                if (convention == PropositionConvention::CommutativeTree) {
                    trees.insert(detail::commutative_key(tree, tree.root()));
                    continue;
                }
                std::uint16_t table = 0;
                for (unsigned env = 0; env < 16; ++env) {
                    const bool v = tree.evaluate_with([&](std::size_t i) {
                        return ((env >> static_cast<unsigned>(tree.rules()[i].kind)) & 1U) != 0;
                    });
                    if (v) table = static_cast<std::uint16_t>(table | (1U << env));
                }
                tables.insert(table);
            }
        }
    }
    return convention == PropositionConvention::TruthTable ? static_cast<long>(tables.size())
                                                           : static_cast<long>(trees.size());
}

} // namespace qcga
