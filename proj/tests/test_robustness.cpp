#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace grnsynth;

namespace {

Rational q(long a, long b = 1) { return make_rational(a, b); }

// w > 1/2 on the single edge, threshold 1/2.
struct OneEdge {
    GrnSpace space = fixture::one_edge(q(1, 2), q(1), 2);
    GrnPopulation pop{space, MutationDistribution::uniform(space, q(1, 2))};
    LtlFormula phi = parse_ltl("X G A");
    ConstraintSet constraints = gencons(space, phi).constraints;
};

} // namespace

TEST(Exact, OneEdgeQuarter)
{
    OneEdge m;
    ConstraintSet c;
    c.add_clause({LinearAtom{{{0, q(1)}}, q(-1, 2), true}});
    auto est = robustness_exact(m.pop, SatisfactionCheck::from_constraints(c));
    ASSERT_TRUE(est.exact);
    EXPECT_EQ(*est.exact, q(1, 4));
    EXPECT_EQ(est.variance, 0);
    EXPECT_EQ(est.ci_lo, est.mean);
    EXPECT_EQ(est.ci_hi, est.mean);
    // synthesized and executed checks agree with the hand-written atom
    EXPECT_EQ(*robustness_exact(m.pop, SatisfactionCheck::from_constraints(m.constraints)).exact, q(1, 4));
    EXPECT_EQ(*robustness_exact(m.pop, SatisfactionCheck::by_execution(m.space, m.phi)).exact, q(1, 4));
}

TEST(Exact, TrivialChecks)
{
    auto s = bistable_space(3);
    GrnPopulation pop{s, MutationDistribution::uniform(s, q(3, 4))};
    EXPECT_EQ(*robustness_exact(pop, SatisfactionCheck::from_constraints(ConstraintSet{})).exact, 1);
    ConstraintSet falsum;
    falsum.add_clause({});
    EXPECT_EQ(*robustness_exact(pop, SatisfactionCheck::from_constraints(falsum)).exact, 0);
}

TEST(Exact, MatchesDirectSum)
{
    auto s = bistable_space(3);
    auto phi = parse_ltl(bistable_property);
    auto dist = MutationDistribution::uniform(s, q(1, 3));
    GrnPopulation pop{s, dist};
    auto c = gencons(s, phi).constraints;

    Rational direct = 0;
    const std::size_t n = s.edge_count();
    std::vector<int> k(n, 0);
    for (;;) {
        auto wf = weights_from_counts(s, k);
        if (oracle::switch_holds(s, std::vector<Rational>(wf.values().begin(), wf.values().end()))) direct += genome_pmf(dist, k);
        std::size_t e = 0;
        while (e < n && k[e] == 3) k[e++] = 0;
        if (e == n) break;
        ++k[e];
    }
    EXPECT_EQ(*robustness_exact(pop, SatisfactionCheck::from_constraints(c)).exact, direct);
    EXPECT_EQ(*robustness_exact(pop, SatisfactionCheck::from_constraints(c), {.workers = 3}).exact, direct);
}

TEST(Exact, EdgeOrderInvariant)
{
    auto s = bistable_space(3);
    auto specs = s.edge_specs();
    std::reverse(specs.begin(), specs.end());
    GrnSpace r{{"IN", q(-1)}, {{"A", q(3, 5)}, {"B", q(3, 5)}}, specs};
    auto phi = parse_ltl(bistable_property);
    GrnPopulation a{s, MutationDistribution::uniform(s, q(1, 4))};
    GrnPopulation b{r, MutationDistribution::uniform(r, q(1, 4))};
    EXPECT_EQ(*robustness_exact(a, SatisfactionCheck::from_constraints(gencons(s, phi).constraints)).exact,
              *robustness_exact(b, SatisfactionCheck::from_constraints(gencons(r, phi).constraints)).exact);
}

TEST(Exact, BudgetEnforced)
{
    auto s = bistable_space();
    GrnPopulation pop{s, MutationDistribution::uniform(s, q(1, 4))};
    EXPECT_THROW((void)robustness_exact(pop, SatisfactionCheck::from_constraints(ConstraintSet{}), {.budget = 1000}),
                 BudgetError);
}

TEST(Sampled, TrueCheck)
{
    OneEdge m;
    auto est = robustness_sampled(m.pop, SatisfactionCheck::from_constraints(ConstraintSet{}),
                                  {.samples = 100, .repeats = 10, .seed = 1});
    EXPECT_EQ(est.mean, 1.0);
    EXPECT_EQ(est.variance, 0.0);
}

TEST(Sampled, BothMethodsNearExact)
{
    OneEdge m;
    const SamplingOptions opts{.samples = 10'000, .repeats = 100, .seed = 7};
    for (auto check : {SatisfactionCheck::from_constraints(m.constraints), SatisfactionCheck::by_execution(m.space, m.phi)}) {
        auto est = robustness_sampled(m.pop, check, opts);
        // binomial variance of a 1/4 fraction over 10^4 draws
        const double sigma = std::sqrt(0.25 * 0.75 / 10'000 / 100);
        EXPECT_LE(std::abs(est.mean - 0.25), 3 * sigma) << to_string(est.method);
        EXPECT_LE(std::abs(est.mean - 0.25), 4 * std::sqrt(est.variance / 100));
        EXPECT_LE(est.ci_lo, est.mean);
        EXPECT_GE(est.ci_hi, est.mean);
        EXPECT_NEAR(est.variance, 0.25 * 0.75 / 10'000, 0.25 * 0.75 / 10'000 * 0.5);
    }
}

TEST(Sampled, ReproducibleAcrossWorkers)
{
    auto s = bistable_space();
    auto phi = parse_ltl(bistable_property);
    GrnPopulation pop{s, MutationDistribution::uniform(s, q(1, 4))};
    auto check = SatisfactionCheck::from_constraints(gencons(s, phi).constraints);
    SamplingOptions opts{.samples = 500, .repeats = 12, .seed = 3, .workers = 1};
    auto a = robustness_sampled(pop, check, opts);
    opts.workers = 4;
    auto b = robustness_sampled(pop, check, opts);
    EXPECT_EQ(a.mean, b.mean);
    EXPECT_EQ(a.variance, b.variance);
    opts.seed = 4;
    EXPECT_NE(robustness_sampled(pop, check, opts).mean, a.mean);
}

TEST(Sampled, ExecAndEvalSeeTheSameNetworks)
{
    auto b = *find_benchmark("ffl-coherent");
    auto phi = parse_ltl(b.property);
    GrnPopulation pop{b.space, MutationDistribution::uniform(b.space, q(1, 2))};
    const SamplingOptions opts{.samples = 300, .repeats = 5, .seed = 11};
    auto ev = robustness_sampled(pop, SatisfactionCheck::from_constraints(gencons(b.space, phi).constraints), opts);
    auto ex = robustness_sampled(pop, SatisfactionCheck::by_execution(pop.space, phi), opts);
    EXPECT_EQ(ev.mean, ex.mean);
    EXPECT_EQ(ev.method, RobustnessMethod::sample_eval);
    EXPECT_EQ(ex.method, RobustnessMethod::sample_exec);
}

TEST(Bench, FitRecoversSyntheticLines)
{
    std::vector<BenchRow> rows;
    for (std::uint64_t n : {1000, 2000, 4000, 8000}) {
        rows.push_back({RobustnessMethod::sample_exec, n, 3e-6 * static_cast<double>(n)});
        rows.push_back({RobustnessMethod::sample_eval, n, 1e-6 * static_cast<double>(n) + 0.05});
    }
    auto fit = fit_bench(rows);
    EXPECT_NEAR(fit.k_ex, 3e-6, 1e-15);
    EXPECT_NEAR(fit.k_ev, 1e-6, 1e-15);
    EXPECT_NEAR(fit.t_c, 0.05, 1e-12);
    EXPECT_NEAR(fit.ratio(), 3.0, 1e-9);
}

TEST(Bench, RowsAndPositiveSlopes)
{
    auto b = *find_benchmark("osc3");
    GrnPopulation pop{b.space, MutationDistribution::uniform(b.space, q(1, 2))};
    std::vector<std::uint64_t> grid{2000, 4000, 8000};
    auto report = bench_methods(pop, parse_ltl(b.property), grid, 1);
    EXPECT_EQ(report.rows.size(), 6U);
    EXPECT_GT(report.fit.k_ex, 0);
    EXPECT_GT(report.fit.k_ev, 0);
    EXPECT_GT(report.fit.t_c_measured, 0);
}
