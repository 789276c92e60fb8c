#include <vector>

#include <gtest/gtest.h>

#include "qcga/errors.hpp"
#include "qcga/library.hpp"
#include "qcga/rules.hpp"
#include "support.hpp"

using namespace qcga;

namespace {

Rule S(int n, double k) { return {RuleKind::SingleValue, n, k}; }
Rule R(int n, double k) { return {RuleKind::Range, n, k}; }
Rule M(int n, double k) { return {RuleKind::Mean, n, k}; }
Rule D(int n, double k) { return {RuleKind::StdDev, n, k}; }
Operator And(int p) { return {OpKind::And, p}; }
Operator Or(int p) { return {OpKind::Or, p}; }

bool eval(const Rule& r, std::vector<double> h) { return evaluate_rule(r, h); }

} // namespace

TEST(EvaluateRule, SpecExamples) {
    EXPECT_TRUE(eval(S(1, 2.4), {0.3, 2.5}));
    EXPECT_TRUE(eval(R(2, 4.3), {0.0, -2.0, 2.5}));
    EXPECT_FALSE(eval(M(2, 1.9), {3.0, 1.0, 1.0}));
    EXPECT_TRUE(eval(D(2, 1.0), {0.0, 2.0}));  // sample SD sqrt(2)
}

TEST(EvaluateRule, StrictComparison) {
    EXPECT_FALSE(eval(S(1, 2.5), {2.5}));
    EXPECT_FALSE(eval(R(2, 4.0), {-2.0, 2.0}));
    EXPECT_FALSE(eval(M(2, 1.0), {1.0, 1.0}));
}

TEST(EvaluateRule, SingleValueNeedsAllOfWindow) {
    EXPECT_TRUE(eval(S(2, 2.0), {2.1, -2.2}));  // absolute values, either side
    EXPECT_FALSE(eval(S(2, 2.0), {2.1, 1.9}));
    EXPECT_TRUE(eval(S(4, 1.0), {1.1, -1.2, 1.3, 1.4}));
    EXPECT_FALSE(eval(S(4, 1.0), {1.1, -1.2, 0.3, 1.4}));
}

TEST(EvaluateRule, MeanUsesSignedMean) {
    EXPECT_FALSE(eval(M(2, 1.0), {3.0, -3.0}));
    EXPECT_TRUE(eval(M(2, 1.0), {-1.5, -1.5}));
}

TEST(EvaluateRule, StdDevUsesSampleDivisor) {
    // values 0, 0, 3: mean 1, ss 6, sample var 3, SD 1.732
    EXPECT_TRUE(eval(D(3, 1.73), {0.0, 0.0, 3.0}));
    EXPECT_FALSE(eval(D(3, 1.74), {0.0, 0.0, 3.0}));
}

TEST(EvaluateRule, InsufficientHistoryIsFalse) {
    EXPECT_FALSE(eval(S(1, 0.0), {}));
    EXPECT_FALSE(eval(R(4, 0.0), {5.0, -5.0, 5.0}));
    EXPECT_FALSE(eval(D(2, 0.0), {9.0}));
}

TEST(EvaluateRule, PrependingHistoryNeverMatters) {
    RandomStream rng(11, 0);
    for (int trial = 0; trial < 500; ++trial) {
        const Rule r = test_support::random_rule(rng);
        std::vector<double> tail(4);
        for (auto& v : tail) v = 2.0 * rng.next_normal();
        std::vector<double> longer{rng.next_normal(), rng.next_normal()};
        longer.insert(longer.end(), tail.begin(), tail.end());
        ASSERT_EQ(evaluate_rule(r, tail), evaluate_rule(r, longer));
    }
}

TEST(BuildExpr, HigherPriorityBindsTighter) {
    const Procedure p{{S(1, 1.0), R(2, 2.0), M(2, 3.0)}, {Or(0), And(3)}, {}, {}};
    EXPECT_EQ(canonical_notation(p), "S(1,1.0) OR (R(2,2.0) AND M(2,3.0))");
    const ExprTree t = build_expr(p);
    const auto& root = t.nodes()[t.root()];
    ASSERT_EQ(root.kind, ExprTree::NodeKind::Or);
    EXPECT_EQ(t.nodes()[root.lhs].kind, ExprTree::NodeKind::Leaf);
    EXPECT_EQ(t.nodes()[root.rhs].kind, ExprTree::NodeKind::And);
}

TEST(BuildExpr, EqualPrioritiesAssociateLeft) {
    const Procedure p{{S(1, 1.0), R(2, 2.0), M(2, 3.0)}, {Or(1), Or(1)}, {}, {}};
    const ExprTree t = build_expr(p);
    const auto& root = t.nodes()[t.root()];
    ASSERT_EQ(root.kind, ExprTree::NodeKind::Or);
    EXPECT_EQ(t.nodes()[root.lhs].kind, ExprTree::NodeKind::Or);
    EXPECT_EQ(t.nodes()[root.rhs].kind, ExprTree::NodeKind::Leaf);
}

TEST(BuildExpr, LowerPriorityOnTheLeftGroupsRight) {
    const Procedure p{{S(1, 1.9), R(4, 4.2), M(2, 1.9)}, {And(0), Or(1)}, {}, {}};
    EXPECT_EQ(canonical_notation(p), "S(1,1.9) AND (R(4,4.2) OR M(2,1.9))");
}

TEST(BuildExpr, SingleOperatorIsOneNode) {
    const Procedure p{{S(1, 2.7), M(2, 1.9)}, {Or(2)}, {}, {}};
    const ExprTree t = build_expr(p);
    EXPECT_EQ(t.nodes().size(), 3U);
    EXPECT_EQ(canonical_notation(p), "S(1,2.7) OR M(2,1.9)");
}

TEST(BuildExpr, FlattenReproducesSequence) {
    RandomStream rng(5, 0);
    const GenomeLayout layout{4, false, false, 2, 1};
    for (int trial = 0; trial < 1000; ++trial) {
        const Procedure p = test_support::random_procedure(rng, layout);
        const auto [leaves, ops] = build_expr(p).flatten();
        ASSERT_EQ(leaves.size(), p.rules.size());
        for (std::size_t i = 0; i < leaves.size(); ++i) ASSERT_EQ(leaves[i], i);
        ASSERT_EQ(ops.size(), p.operators.size());
        for (std::size_t i = 0; i < ops.size(); ++i) ASSERT_EQ(ops[i], p.operators[i].kind);
    }
}

TEST(EvaluateProcedure, SpecExamples) {
    EXPECT_FALSE(evaluate_procedure(build_expr(Procedure{}), std::vector<double>{9.0, 9.0}));
    const Procedure a{{S(1, 2.7), M(2, 1.9)}, {Or(0)}, {}, {}};
    EXPECT_TRUE(evaluate_procedure(build_expr(a), std::vector<double>{0.1, 2.8}));
    const Procedure b{{S(1, 2.2), M(2, 1.9), R(4, 4.3)}, {And(1), Or(0)}, {}, {}};
    EXPECT_EQ(canonical_notation(b), "(S(1,2.2) AND M(2,1.9)) OR R(4,4.3)");
    EXPECT_FALSE(evaluate_procedure(build_expr(b), std::vector<double>{0, 0, 0, 2.3}));
}

TEST(EvaluateProcedure, OrDominatesAnd) {
    RandomStream rng(21, 0);
    const GenomeLayout layout{4, false, false, 2, 1};
    for (int trial = 0; trial < 2000; ++trial) {
        Procedure p = test_support::random_procedure(rng, layout);
        Procedure q = p;
        for (auto& op : q.operators) op.kind = OpKind::Or;
        std::vector<double> h(4);
        for (auto& v : h) v = 2.0 * rng.next_normal();
        if (evaluate_procedure(build_expr(p), h)) {
            ASSERT_TRUE(evaluate_procedure(build_expr(q), h));
        }
    }
}

TEST(CanonicalNotation, ReferenceForms) {
    EXPECT_EQ(canonical_notation(Procedure{{S(1, 2.7)}, {}, {}, {}}), "S(1,2.7)");
    EXPECT_EQ(canonical_notation(Procedure{{S(1, 3.2), R(4, 4.6), M(2, 1.9)}, {Or(2), Or(2)}, {}, {}}),
              "S(1,3.2) OR R(4,4.6) OR M(2,1.9)");
    EXPECT_EQ(canonical_notation(Procedure{}), "NONE");
}

TEST(CanonicalNotation, RoundTripsThroughParserToSameTruthTable) {
    RandomStream rng(8, 0);
    const GenomeLayout layout{4, false, false, 2, 1};
    for (int trial = 0; trial < 1000; ++trial) {
        const Procedure p = test_support::random_procedure(rng, layout);
        const Procedure back = parse_procedure(canonical_notation(p));
        ASSERT_EQ(back.rules, p.rules);
        const ExprTree a = build_expr(p);
        const ExprTree b = build_expr(back);
        for (unsigned env = 0; env < (1U << p.rules.size()); ++env) {
            auto leaf = [&](std::size_t i) { return ((env >> i) & 1U) != 0; };
            ASSERT_EQ(a.evaluate_with(leaf), b.evaluate_with(leaf)) << canonical_notation(p);
        }
    }
}

TEST(CountPropositions, TruthTableConvention) {
    EXPECT_EQ(count_distinct_propositions(1), 4);
    EXPECT_EQ(count_distinct_propositions(2), 16);
    EXPECT_EQ(count_distinct_propositions(3), 48);
}

TEST(CountPropositions, CommutativeTreeConventionGivesReferenceCount) {
    EXPECT_EQ(count_distinct_propositions(1, PropositionConvention::CommutativeTree), 4);
    EXPECT_EQ(count_distinct_propositions(3, PropositionConvention::CommutativeTree), 184);
}

TEST(CountPropositions, Guards) {
    EXPECT_THROW(count_distinct_propositions(0), InvalidArgument);
    EXPECT_THROW(count_distinct_propositions(5), InvalidArgument);
}

TEST(Procedure, ValidateRejectsMalformed) {
    EXPECT_THROW((Procedure{{S(1, 1.0), S(1, 2.0)}, {}, {}, {}}.validate()), InvalidArgument);
    EXPECT_THROW((Procedure{{R(1, 1.0)}, {}, {}, {}}.validate()), InvalidArgument);
    EXPECT_THROW((Procedure{{S(1, 6.4)}, {}, {}, {}}.validate()), InvalidArgument);
    EXPECT_THROW((Procedure{{S(1, 1.0), S(1, 2.0)}, {Or(4)}, {}, {}}.validate()), InvalidArgument);
    EXPECT_THROW((Procedure{{S(1, 1.0)}, {}, 3, {}}.validate()), InvalidArgument);
}
