#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "qcga/errors.hpp"
#include "qcga/library.hpp"
#include "qcga/stats.hpp"

using namespace qcga;

namespace {

// Brute-force oracle: enumerate all 2^n sign patterns.
double enumerated_sign_p(std::size_t n, std::size_t s) {
    if (n == 0) return 1.0;
    double le = 0.0;
    double ge = 0.0;
    const double w = std::ldexp(1.0, -static_cast<int>(n));
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        const auto k = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (k <= s) le += w;
        if (k >= s) ge += w;
    }
    return std::min(1.0, 2.0 * std::min(le, ge));
}

} // namespace

TEST(Summarize, Examples) {
    const std::vector<double> ones{1, 1, 1};
    EXPECT_EQ(summarize(ones).mean, 1.0);
    EXPECT_EQ(summarize(ones).sd, 0.0);
    const std::vector<double> two{0, 2};
    EXPECT_DOUBLE_EQ(summarize(two).mean, 1.0);
    EXPECT_NEAR(summarize(two).sd, 1.41421, 1e-5);
    const std::vector<double> probs{0.489, 0.495, 0.504};
    EXPECT_NEAR(summarize(probs).mean, 0.49600, 1e-5);
    EXPECT_NEAR(summarize(probs).sd, 0.00755, 1e-5);
    const std::vector<double> one{1.0};
    EXPECT_THROW(summarize(one), InvalidArgument);
}

TEST(SignTest, Examples) {
    std::vector<double> a(21, 0.0);
    std::vector<double> b(21, 1.0);
    EXPECT_NEAR(sign_test(a, b).p_value, 9.5367431640625e-07, 1e-15);

    std::vector<double> c(20, 0.0);
    std::vector<double> d(20, 0.0);
    for (int i = 0; i < 10; ++i) d[static_cast<std::size_t>(i)] = 1.0;
    for (int i = 10; i < 20; ++i) d[static_cast<std::size_t>(i)] = -1.0;
    EXPECT_EQ(sign_test(c, d).p_value, 1.0);

    std::vector<double> e(21, 0.0);
    std::vector<double> f(21, 1.0);
    for (int i = 0; i < 6; ++i) f[static_cast<std::size_t>(i)] = -1.0;
    EXPECT_NEAR(sign_test(e, f).p_value, 0.0784, 1e-4);
}

TEST(SignTest, TiesOnly) {
    const std::vector<double> a{0.1, 0.2};
    const auto r = sign_test(a, a);
    EXPECT_TRUE(r.ties_only);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_EQ(r.ties, 2U);
}

TEST(SignTest, MatchesEnumerationUpToTwentyFive) {
    for (std::size_t n = 1; n <= 25; ++n) {
        for (std::size_t s = 0; s <= n; ++s) {
            std::vector<double> a(n + 2, 0.0);
            std::vector<double> b(n + 2, 0.0);  // two ties are dropped
            for (std::size_t i = 0; i < n; ++i) b[i] = i < s ? 1.0 : -1.0;
            const auto r = sign_test(a, b);
            ASSERT_EQ(r.below, s);
            ASSERT_NEAR(r.p_value, enumerated_sign_p(n, s), 1e-12) << n << " " << s;
            ASSERT_EQ(sign_test(b, a).p_value, r.p_value);  // symmetry
            ASSERT_GT(r.p_value, 0.0);
            ASSERT_LE(r.p_value, 1.0);
        }
    }
}

TEST(SignTest, LargeSampleCdfBranch) {
    EXPECT_NEAR(binomial_half_cdf(100, 50), 0.5397946186935894, 1e-12);
    EXPECT_NEAR(binomial_half_cdf(63, 31), 0.5, 1e-12);
}

TEST(SignTest, LengthMismatch) {
    const std::vector<double> a{1, 2};
    const std::vector<double> b{1};
    EXPECT_THROW(sign_test(a, b), InvalidArgument);
}

TEST(CompareProcedures, IdenticalProceduresTie) {
    SimulationPlan plan;
    plan.measurements_per_level = 200;
    const std::vector<NamedProcedure> procs{{"a", parse_procedure("1_2.5s")}, {"b", parse_procedure("S(1,2.5)")}};
    const auto r = compare_procedures(procs, plan, CriticalErrors{2.313, 3.495}, 5, 3);
    ASSERT_EQ(r.rows.size(), 2U);
    EXPECT_EQ(r.rows[0].f1_summary.mean, r.rows[1].f1_summary.mean);
    EXPECT_EQ(r.rows[0].name, "a");  // stable under ties
    EXPECT_TRUE(r.rows[1].versus_reference.ties_only);
}

TEST(CompareProcedures, PairedStreamsAndThreadIndependence) {
    SimulationPlan plan;
    plan.measurements_per_level = 300;
    const std::vector<NamedProcedure> procs{{"wide", parse_procedure("S(1,3.0)")},
                                            {"narrow", parse_procedure("S(1,2.0)")},
                                            {"multi", parse_procedure("1_2.5s/2_2.0s")}};
    const auto a = compare_procedures(procs, plan, CriticalErrors{2.313, 3.495}, 6, 11, 1);
    const auto b = compare_procedures(procs, plan, CriticalErrors{2.313, 3.495}, 6, 11, 3);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].name, b.rows[i].name);
        EXPECT_EQ(a.rows[i].f1, b.rows[i].f1);
    }
    // Paired design: on every replicate the nested rule rejects at least as often.
    const auto find = [&](const char* n) {
        for (const auto& row : a.rows)
            if (row.name == n) return row;
        return a.rows[0];
    };
    const auto wide = find("wide");
    const auto narrow = find("narrow");
    for (std::size_t r = 0; r < 6; ++r) EXPECT_GE(narrow.replicates[r].p_fr, wide.replicates[r].p_fr);
    for (std::size_t i = 1; i < a.rows.size(); ++i)
        EXPECT_LE(a.rows[i - 1].f1_summary.mean, a.rows[i].f1_summary.mean);
    EXPECT_THROW(compare_procedures(procs, plan, CriticalErrors{2.313, 3.495}, 1), InvalidArgument);
}
