#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace grnsynth;

namespace {

using T = LinearAtom::Term;
const Rational t35{3, 5};

// Toggle-switch constraints over the bistable variable order
// IN->A 0, IN->B 1, A->A 2, B->B 3, A-|B 4, B-|A 5.
std::vector<LinearAtom> switch_atoms()
{
    return {
        LinearAtom{{{0, Rational{-1}}, {5, Rational{1}}}, t35, false}, // i_A - w_BA <= t_A
        LinearAtom{{{0, Rational{1}}, {2, Rational{1}}}, -t35, true},  // i_A + w_AA > t_A
        LinearAtom{{{1, Rational{-1}}, {4, Rational{1}}}, t35, false}, // i_B - w_AB <= t_B
        LinearAtom{{{1, Rational{1}}, {3, Rational{1}}}, -t35, true},  // i_B + w_BB > t_B
    };
}

ConstraintSet as_cnf(const std::vector<LinearAtom>& atoms)
{
    ConstraintSet c;
    for (const auto& a : atoms) c.add_clause({a});
    return c;
}

Box unit_box(std::size_t n) { return Box{std::vector<Rational>(n, Rational{0}), std::vector<Rational>(n, Rational{1})}; }

Rational small_rational(std::mt19937_64& rng, int max_den, int span)
{
    const int den = 1 + static_cast<int>(rng() % static_cast<unsigned>(max_den));
    const int num = static_cast<int>(rng() % static_cast<unsigned>(2 * span * den + 1)) - span * den;
    Rational q{num, den};
    q.canonicalize();
    return q;
}

LinearAtom random_atom(std::mt19937_64& rng, std::size_t nvars, int max_den)
{
    std::vector<T> terms;
    for (std::size_t v = 0; v < nvars; ++v)
        if (rng() % 4 != 0) terms.emplace_back(v, Rational{static_cast<int>(rng() % 5) - 2});
    return LinearAtom{std::move(terms), small_rational(rng, max_den, 2), rng() % 2 == 0};
}

std::vector<oracle::Ineq> dense(std::span<const LinearAtom> atoms, std::size_t n)
{
    std::vector<oracle::Ineq> out;
    for (const auto& a : atoms) {
        oracle::Ineq q{std::vector<Rational>(n, Rational{0}), a.constant(), a.strict()};
        for (const auto& [v, k] : a.terms()) q.a[v] = k;
        out.push_back(std::move(q));
    }
    return out;
}

} // namespace

TEST(Atom, Evaluation)
{
    auto s = bistable_space();
    auto w = fixture::bistable_point(s);
    LinearAtom a{{{0, Rational{1}}, {2, Rational{1}}}, -t35, true};
    EXPECT_TRUE(eval_atom(a, w.values()));

    std::vector<Rational> zero{Rational{0}};
    EXPECT_TRUE(eval_atom(LinearAtom{{{0, Rational{1}}}, Rational{0}, false}, zero));
    EXPECT_FALSE(eval_atom(LinearAtom{{{0, Rational{1}}}, Rational{0}, true}, zero));

    // i_B + w_BB - 3/5 > 0 at i_B = 1/4: 11/20 <= 12/20
    LinearAtom b{{{1, Rational{1}}, {3, Rational{1}}}, -t35, true};
    EXPECT_FALSE(eval_atom(b, fixture::bistable_point(s, "1/4").values()));
    EXPECT_TRUE(eval_atom(b, fixture::bistable_point(s, "1/3").values()));
}

TEST(Atom, NormalizationAndNegation)
{
    LinearAtom a{{{1, make_rational(2, 3)}, {0, make_rational(4, 3)}, {1, Rational{0}}}, Rational{-2}, true};
    LinearAtom b{{{0, Rational{2}}, {1, Rational{1}}}, Rational{-3}, true};
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.coefficient(0), 2);
    EXPECT_EQ(a.coefficient(1), 1);
    auto n = a.negated();
    EXPECT_FALSE(n.strict());
    EXPECT_EQ(n.negated(), a);
    std::mt19937_64 rng{3};
    for (int i = 0; i < 2000; ++i) {
        auto atom = random_atom(rng, 3, 6);
        std::vector<Rational> p{small_rational(rng, 6, 2), small_rational(rng, 6, 2), small_rational(rng, 6, 2)};
        EXPECT_NE(atom.eval(p), atom.negated().eval(p));
        // scaling by a positive factor keeps the atom and its meaning
        std::vector<T> scaled;
        for (const auto& [v, k] : atom.terms()) scaled.emplace_back(v, k * 7 / 3);
        EXPECT_EQ((LinearAtom{scaled, atom.constant() * 7 / 3, atom.strict()}), atom);
    }
}

TEST(Set, SwitchConstraintsAtExamplePoints)
{
    auto s = bistable_space();
    auto c = as_cnf(switch_atoms());
    EXPECT_TRUE(eval_set(c, fixture::bistable_point(s).values()));
    EXPECT_FALSE(eval_set(c, fixture::bistable_point(s, "5/18").values()));
    EXPECT_TRUE(eval_set(c, fixture::bistable_point(s, "1/3").values()));
    EXPECT_TRUE(eval_set(ConstraintSet{}, fixture::bistable_point(s).values()));
    ConstraintSet falsum;
    falsum.add_clause({});
    EXPECT_FALSE(eval_set(falsum, fixture::bistable_point(s).values()));
}

TEST(Feasible, Examples)
{
    LinearAtom pos{{{0, Rational{1}}}, Rational{0}, true};    // x > 0
    LinearAtom nonpos{{{0, Rational{-1}}}, Rational{0}, false}; // x <= 0
    std::vector<LinearAtom> sys{pos, nonpos};
    EXPECT_FALSE(feasible(sys, unit_box(1)));

    std::vector<LinearAtom> interval{LinearAtom{{{0, Rational{1}}}, make_rational(-1, 2), true},
                                     LinearAtom{{{0, Rational{-1}}}, make_rational(3, 4), false}};
    auto w = find_witness(interval, unit_box(1));
    ASSERT_TRUE(w);
    for (const auto& a : interval) EXPECT_TRUE(a.eval(*w));

    auto s = bistable_space();
    auto sw = switch_atoms();
    auto ts = ParametrizedTs{s};
    auto ws = find_witness(sw, ts.box());
    ASSERT_TRUE(ws);
    for (const auto& a : sw) EXPECT_TRUE(a.eval(*ws));
}

TEST(Feasible, StrictnessAtEveryConstant)
{
    std::mt19937_64 rng{17};
    for (int i = 0; i < 300; ++i) {
        Rational c = small_rational(rng, 9, 1);
        if (c < 0) c = -c;
        Box box{{Rational{0}}, {Rational{1}}};
        std::vector<LinearAtom> open{LinearAtom{{{0, Rational{1}}}, -c, true},
                                     LinearAtom{{{0, Rational{-1}}}, c, false}};
        EXPECT_FALSE(feasible(open, box)) << c;
        std::vector<LinearAtom> closed{LinearAtom{{{0, Rational{1}}}, -c, false},
                                       LinearAtom{{{0, Rational{-1}}}, c, false}};
        auto w = find_witness(closed, box);
        if (c <= 1) {
            ASSERT_TRUE(w) << c;
            EXPECT_EQ((*w)[0], c);
        } else {
            EXPECT_FALSE(w);
        }
    }
}

TEST(Feasible, AgreesWithVertexOracle)
{
    std::mt19937_64 rng{23};
    int feasible_count = 0;
    for (int i = 0; i < 1500; ++i) {
        const std::size_t n = 2 + rng() % 2;
        std::vector<LinearAtom> sys;
        const std::size_t m = 1 + rng() % 5;
        for (std::size_t j = 0; j < m; ++j) sys.push_back(random_atom(rng, n, 8));
        Box box = unit_box(n);
        auto w = find_witness(sys, box);
        const bool expect = oracle::feasible_by_vertices(dense(sys, n), box.lo, box.hi);
        ASSERT_EQ(w.has_value(), expect) << "system " << i;
        if (w) {
            ++feasible_count;
            for (const auto& a : sys) EXPECT_TRUE(a.eval(*w));
            for (std::size_t v = 0; v < n; ++v) EXPECT_TRUE(box.lo[v] <= (*w)[v] && (*w)[v] <= box.hi[v]);
        }
    }
    EXPECT_GT(feasible_count, 200);
}

TEST(Context, PushPopSequence)
{
    FeasibilityContext ctx{unit_box(1)};
    ctx.push(LinearAtom{{{0, Rational{1}}}, Rational{0}, true});
    EXPECT_TRUE(ctx.feasible());
    ctx.push(LinearAtom{{{0, Rational{-1}}}, Rational{0}, false});
    EXPECT_FALSE(ctx.feasible());
    ctx.pop();
    EXPECT_TRUE(ctx.feasible());
    ctx.pop();
    EXPECT_THROW(ctx.pop(), Error);
}

TEST(Context, NestedLifo)
{
    FeasibilityContext ctx{unit_box(1)};
    ctx.push(LinearAtom{{{0, Rational{1}}}, make_rational(-1, 4), false}); // x >= 1/4
    ctx.push(LinearAtom{{{0, Rational{-1}}}, make_rational(1, 2), true});  // x < 1/2
    ctx.push(LinearAtom{{{0, Rational{1}}}, make_rational(-1, 2), false}); // x >= 1/2
    EXPECT_FALSE(ctx.feasible());
    EXPECT_EQ(ctx.depth(), 3U);
    ctx.pop();
    EXPECT_TRUE(ctx.feasible());
    auto w = ctx.witness();
    ASSERT_TRUE(w);
    EXPECT_TRUE((*w)[0] >= make_rational(1, 4) && (*w)[0] < make_rational(1, 2));
    ctx.pop();
    EXPECT_TRUE(ctx.feasible());
    ctx.pop();
    EXPECT_TRUE(ctx.feasible());
    EXPECT_EQ(ctx.depth(), 0U);
}

TEST(Context, RandomSequencesMatchFromScratch)
{
    std::mt19937_64 rng{29};
    const std::size_t n = 4;
    Box box = unit_box(n);
    int checks = 0;
    for (int seq = 0; seq < 200; ++seq) {
        FeasibilityContext ctx{box};
        std::vector<std::vector<LinearAtom>> frames;
        for (int op = 0; op < 50; ++op) {
            if (!frames.empty() && rng() % 3 == 0) {
                ctx.pop();
                frames.pop_back();
            } else {
                std::vector<LinearAtom> frame;
                const std::size_t k = rng() % 3;
                for (std::size_t j = 0; j < k; ++j) frame.push_back(random_atom(rng, n, 4));
                ctx.push(frame);
                frames.push_back(frame);
            }
            std::vector<LinearAtom> all;
            for (const auto& f : frames) all.insert(all.end(), f.begin(), f.end());
            ASSERT_EQ(ctx.feasible(), feasible(all, box));
            ++checks;
        }
    }
    EXPECT_EQ(checks, 10000);
}

TEST(Context, RepeatedAtomsLeaveWithTheirFrame)
{
    // Atoms drawn from a small pool so frames share atoms.
    std::mt19937_64 rng{31};
    const std::size_t n = 3;
    Box box = unit_box(n);
    std::vector<LinearAtom> pool;
    for (int i = 0; i < 6; ++i) pool.push_back(random_atom(rng, n, 3));
    for (int seq = 0; seq < 100; ++seq) {
        FeasibilityContext ctx{box};
        std::vector<std::vector<LinearAtom>> frames;
        for (int op = 0; op < 40; ++op) {
            if (!frames.empty() && rng() % 2 == 0) {
                ctx.pop();
                frames.pop_back();
            } else {
                std::vector<LinearAtom> frame;
                for (std::size_t j = 0, k = 1 + rng() % 3; j < k; ++j) frame.push_back(pool[rng() % pool.size()]);
                ctx.push(frame);
                frames.push_back(frame);
            }
            std::set<LinearAtom> expect;
            for (const auto& f : frames) expect.insert(f.begin(), f.end());
            auto got = ctx.current_atoms();
            ASSERT_EQ(std::set<LinearAtom>(got.begin(), got.end()), expect);
            std::vector<LinearAtom> all(expect.begin(), expect.end());
            ASSERT_EQ(ctx.feasible(), feasible(all, box));
        }
    }
}

TEST(Simplify, DuplicatesAndSubsumption)
{
    auto sw = switch_atoms();
    ConstraintSet c;
    c.add_clause({sw[0], sw[1]});
    c.add_clause({sw[1], sw[0]});
    c.add_clause({sw[2]});
    c.add_clause({sw[2], sw[3]});
    c.add_clause({sw[3], sw[3].negated()});
    auto s = simplify(c);
    ASSERT_EQ(s.size(), 2U);
    EXPECT_EQ(s.atom_count(), 3U);
}

TEST(Simplify, PreservesVerdicts)
{
    std::mt19937_64 rng{31};
    const std::size_t n = 3;
    for (int round = 0; round < 10; ++round) {
        ConstraintSet c;
        std::vector<LinearAtom> pool;
        for (int j = 0; j < 6; ++j) pool.push_back(random_atom(rng, n, 4));
        for (int j = 0; j < 12; ++j) {
            Clause cl;
            const std::size_t k = 1 + rng() % 3;
            for (std::size_t a = 0; a < k; ++a) {
                const auto& atom = pool[rng() % pool.size()];
                cl.push_back(rng() % 4 == 0 ? atom.negated() : atom);
            }
            c.add_clause(cl);
        }
        auto s = simplify(c);
        EXPECT_LE(s.size(), c.size());
        for (int p = 0; p < 1000; ++p) {
            std::vector<Rational> x;
            for (std::size_t v = 0; v < n; ++v) x.push_back(small_rational(rng, 4, 2));
            ASSERT_EQ(eval_set(s, x), eval_set(c, x));
        }
    }
}

TEST(Evaluator, MatchesEvalSet)
{
    std::mt19937_64 rng{37};
    ConstraintSet c;
    for (int j = 0; j < 8; ++j) {
        Clause cl;
        for (int a = 0; a < 3; ++a) cl.push_back(random_atom(rng, 3, 4));
        c.add_clause(cl);
    }
    ConstraintEvaluator ev{c};
    for (int p = 0; p < 5000; ++p) {
        std::vector<Rational> x;
        for (int v = 0; v < 3; ++v) x.push_back(small_rational(rng, 4, 2));
        ASSERT_EQ(ev(x), eval_set(c, x));
    }
}
