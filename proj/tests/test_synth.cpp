#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace grnsynth;

namespace {

GrnState st(const GrnSpace& s, std::initializer_list<bool> b) { return GrnState{s, b}; }

// Small random space: genes A, B (and C when three), random signs and
// thresholds, every edge present with probability 1/2.
GrnSpace random_space(std::mt19937_64& rng, std::size_t genes)
{
    static const char* names[] = {"A", "B", "C"};
    std::vector<GeneSpec> gs;
    std::vector<EdgeSpec> es;
    for (std::size_t g = 0; g < genes; ++g) {
        gs.push_back({names[g], make_rational(static_cast<long>(rng() % 5), 4)});
        es.push_back({"IN", names[g], EdgeSign::activate, make_rational(static_cast<long>(1 + rng() % 4), 4), 3});
    }
    for (std::size_t a = 0; a < genes; ++a)
        for (std::size_t b = 0; b < genes; ++b)
            if (rng() % 2 == 0)
                es.push_back({names[a], names[b], rng() % 2 ? EdgeSign::activate : EdgeSign::repress,
                              make_rational(static_cast<long>(1 + rng() % 4), 4), 3});
    return GrnSpace{{"IN", Rational{-1}}, gs, es};
}

} // namespace

TEST(EdgeConstraint, BistableSelfLoop)
{
    auto s = bistable_space();
    ParametrizedTs ts{s};
    auto rc = edge_constraint(ts, st(s, {1, 0}), st(s, {1, 0}));
    // i_A + w_AA > 3/5 and i_B - w_AB <= 3/5
    const Rational t{3, 5};
    RunConstraint expect{{LinearAtom{{{0, Rational{1}}, {2, Rational{1}}}, -t, true},
                          LinearAtom{{{1, Rational{-1}}, {4, Rational{1}}}, t, false}}};
    EXPECT_EQ(std::vector<LinearAtom>(rc.atoms().begin(), rc.atoms().end()),
              std::vector<LinearAtom>(expect.atoms().begin(), expect.atoms().end()));
}

TEST(EdgeConstraint, FlippingTargetFlipsOneAtom)
{
    auto s = osc3_space();
    ParametrizedTs ts{s};
    for (const auto& from : ts.states())
        for (const auto& to : ts.states())
            for (std::size_t g = 1; g < s.gene_count(); ++g) {
                auto flipped = GrnState::from_bits(s.gene_count(), to.bits() ^ (std::uint64_t{1} << g));
                auto a = ts.transition_atoms(from, to);
                auto b = ts.transition_atoms(from, flipped);
                for (std::size_t i = 0; i < a.size(); ++i) {
                    if (i + 1 == g) {
                        EXPECT_EQ(b[i], a[i].negated());
                        EXPECT_NE(a[i].strict(), b[i].strict());
                    } else {
                        EXPECT_EQ(a[i], b[i]);
                    }
                }
                // atoms mention only edges into their gene
                for (std::size_t i = 0; i < a.size(); ++i)
                    for (const auto& [v, k] : a[i].terms()) EXPECT_EQ(s.edge(v).to, i + 1);
            }
}

TEST(EdgeConstraint, HoldsExactlyOnRealTransitions)
{
    std::mt19937_64 rng{41};
    for (int round = 0; round < 20; ++round) {
        auto s = random_space(rng, 2);
        ParametrizedTs ts{s};
        auto dist = MutationDistribution::uniform(s, make_rational(1, 2));
        for (int p = 0; p < 50; ++p) {
            auto w = sample_weights(dist, s, rng());
            for (const auto& from : ts.states())
                for (const auto& to : ts.states())
                    ASSERT_EQ(edge_constraint(ts, from, to).eval(w.values()), step(s, w, from) == to);
        }
    }
}

TEST(Gencons, BistableMatchesPrintedConstraints)
{
    auto s = bistable_space(3);
    auto r = gencons(s, parse_ltl(bistable_property));
    std::uint64_t points = 0;
    oracle::for_each_grid_point(s, [&](const std::vector<Rational>& w) {
        const bool got = eval_set(r.constraints, w);
        ASSERT_EQ(got, oracle::switch_holds(s, w));
        ASSERT_EQ(got, ExecutionChecker(s, parse_ltl(bistable_property))(w));
        ++points;
    });
    EXPECT_EQ(points, 4096U);
}

TEST(Gencons, RepressilatorMatchesPrintedConstraints)
{
    auto s = osc3_space(2);
    auto phi = parse_ltl(osc3_property);
    auto r = gencons(s, phi);
    ExecutionChecker exec{s, phi};
    oracle::for_each_grid_point(s, [&](const std::vector<Rational>& w) {
        ASSERT_EQ(eval_set(r.constraints, w), oracle::osc3_holds(s, w, make_rational(1, 2)));
        ASSERT_EQ(eval_set(r.constraints, w), exec(w));
    });
}

TEST(Gencons, TrueAndFalseProperties)
{
    auto s = bistable_space();
    EXPECT_TRUE(gencons(s, LtlFormula::truth()).constraints.empty());
    auto f = gencons(s, LtlFormula::falsity());
    EXPECT_FALSE(eval_set(f.constraints, WeightFunction::maximal(s).values()));
}

TEST(Gencons, ExactOnCatalog)
{
    for (const auto& b : benchmark_catalog()) {
        auto phi = parse_ltl(b.property);
        auto r = gencons(b.space, phi);
        ExecutionChecker exec{b.space, phi};
        auto dist = MutationDistribution::uniform(b.space, make_rational(1, 2));
        WeightSampler sampler{b.space, dist};
        std::mt19937_64 rng{43};
        int sat = 0;
        for (int i = 0; i < 1000; ++i) {
            auto w = sampler(rng);
            const bool e = exec(w);
            ASSERT_EQ(eval_set(r.constraints, w), e) << b.name;
            sat += e;
        }
        // the property is neither always nor never met on these points
        EXPECT_GT(sat, 0) << b.name;
        EXPECT_LT(sat, 1000) << b.name;
    }
}

TEST(Gencons, ExactOnRandomSpacesAndFormulas)
{
    std::mt19937_64 rng{47};
    const char* props[] = {"G A", "F B", "G F A", "F G !B", "A U B", "G (A -> X B)", "!A -> F (A & B)",
                           "G (A | B) | F (A & !B)", "X X A", "(A -> F !A) & (B -> G B)"};
    for (int round = 0; round < 30; ++round) {
        auto s = random_space(rng, 2 + rng() % 2);
        auto phi = parse_ltl(props[rng() % std::size(props)]);
        auto r = gencons(s, phi);
        ExecutionChecker exec{s, phi};
        if (s.edge_count() <= 7) {
            oracle::for_each_grid_point(s, [&](const std::vector<Rational>& w) {
                ASSERT_EQ(eval_set(r.constraints, w), exec(w)) << phi.to_string();
            });
            continue;
        }
        WeightSampler sampler{s, MutationDistribution::uniform(s, make_rational(1, 2))};
        for (int i = 0; i < 3000; ++i) {
            auto w = sampler(rng);
            ASSERT_EQ(eval_set(r.constraints, w), exec(w)) << phi.to_string();
        }
    }
}

TEST(Gencons, CounterexamplesAreRealRuns)
{
    auto b = *find_benchmark("ffl-incoherent");
    auto phi = parse_ltl(b.property);
    ParametrizedTs ts{b.space};
    auto r = gencons(ts, phi, {.simplify = false, .record_counterexamples = true});
    ASSERT_FALSE(r.counterexamples.empty());
    EXPECT_EQ(r.counterexamples.size(), r.constraints.size());
    for (const auto& cx : r.counterexamples) {
        auto w = find_witness(cx.constraint.atoms(), ts.box());
        ASSERT_TRUE(w);
        for (std::size_t i = 0; i + 1 < cx.states.size(); ++i) EXPECT_EQ(step(b.space, *w, cx.states[i]), cx.states[i + 1]);
        if (cx.loop_start) EXPECT_EQ(step(b.space, *w, cx.states.back()), cx.states[*cx.loop_start]);
        // the witness network violates the property
        EXPECT_FALSE(ExecutionChecker(b.space, phi)(*w));
    }
}

TEST(Gencons, DeterministicAcrossRunsAndWorkers)
{
    auto b = *find_benchmark("osc3");
    auto phi = parse_ltl(b.property);
    auto one = constraints_to_json(gencons(b.space, phi).constraints, b.space).dump();
    EXPECT_EQ(constraints_to_json(gencons(b.space, phi).constraints, b.space).dump(), one);
    EXPECT_EQ(constraints_to_json(gencons(b.space, phi, {.workers = 4}).constraints, b.space).dump(), one);
}

TEST(Gencons, DroppingClausesOnlyGrows)
{
    auto s = bistable_space(2);
    auto r = gencons(s, parse_ltl(bistable_property), {.simplify = false});
    auto clauses = r.constraints.clauses();
    ConstraintSet fewer{std::vector<Clause>(clauses.begin() + 1, clauses.end())};
    oracle::for_each_grid_point(s, [&](const std::vector<Rational>& w) {
        if (eval_set(r.constraints, w)) EXPECT_TRUE(eval_set(fewer, w));
    });
}

TEST(Verify, ExamplePoints)
{
    auto s = bistable_space();
    auto phi = parse_ltl(bistable_property);
    EXPECT_TRUE(verify_by_execution(s, fixture::bistable_point(s), phi));
    EXPECT_TRUE(verify_by_execution(s, fixture::bistable_point(s, "1/3"), phi));
    EXPECT_FALSE(verify_by_execution(s, fixture::bistable_point(s, "5/18"), phi));
    EXPECT_TRUE(verify_by_execution(s, fixture::bistable_point(s, "5/18"), LtlFormula::truth()));
}
