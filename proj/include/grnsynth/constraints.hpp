// SPDX-License-Identifier: Apache-2.0
#pragma once

// Exact linear constraints over edge-weight variables.
//
// A LinearAtom reads  sum_i k_i * v_i + c  > 0  (strict) or  >= 0.
// Variables are edge indices of a GrnSpace. Atoms are kept normalized:
// coefficients sorted by variable, zeros dropped, and the whole row scaled by
// a positive factor to coprime integers. Two atoms denote the same half-space
// iff they compare equal.
//
// Feasibility is decided by Fourier-Motzkin elimination with strictness
// tracking over each connected component of the variable-sharing graph, with
// a witness recovered by back substitution.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "grnsynth/error.hpp"
#include "grnsynth/rational.hpp"

namespace grnsynth {

using VarId = std::size_t;

class LinearAtom {
public:
    using Term = std::pair<VarId, Rational>;

    LinearAtom() = default;

    LinearAtom(std::vector<Term> terms, Rational constant, bool strict)
        : terms_(std::move(terms)), constant_(std::move(constant)), strict_(strict)
    {
        normalize();
    }

    [[nodiscard]] std::span<const Term> terms() const noexcept { return terms_; }
    [[nodiscard]] const Rational& constant() const noexcept { return constant_; }
    [[nodiscard]] bool strict() const noexcept { return strict_; }

    [[nodiscard]] Rational coefficient(VarId v) const
    {
        auto it = std::lower_bound(terms_.begin(), terms_.end(), v,
                                   [](const Term& t, VarId x) { return t.first < x; });
        return it != terms_.end() && it->first == v ? it->second : Rational{0};
    }

    /// not(e > 0) is (-e >= 0); not(e >= 0) is (-e > 0).
    [[nodiscard]] LinearAtom negated() const
    {
        LinearAtom out;
        out.terms_ = terms_;
        for (auto& t : out.terms_) t.second = -t.second;
        out.constant_ = -constant_;
        out.strict_ = !strict_;
        return out;
    }

    [[nodiscard]] Rational lhs(std::span<const Rational> point) const
    {
        Rational sum = constant_;
        for (const auto& [v, k] : terms_) {
            if (v >= point.size()) throw BindingError("unbound variable " + std::to_string(v));
            sum += k * point[v];
        }
        return sum;
    }

    [[nodiscard]] bool eval(std::span<const Rational> point) const
    {
        const int s = sgn(lhs(point));
        return strict_ ? s > 0 : s >= 0;
    }

    /// Atom without variables: its truth value is fixed.
    [[nodiscard]] bool is_constant() const noexcept { return terms_.empty(); }

    friend bool operator==(const LinearAtom& a, const LinearAtom& b)
    {
        return a.strict_ == b.strict_ && a.constant_ == b.constant_ && a.terms_ == b.terms_;
    }

    friend std::strong_ordering operator<=>(const LinearAtom& a, const LinearAtom& b)
    {
        const std::size_t n = std::min(a.terms_.size(), b.terms_.size());
        for (std::size_t i = 0; i < n; ++i) {
            if (a.terms_[i].first != b.terms_[i].first) return a.terms_[i].first <=> b.terms_[i].first;
            if (int c = cmp(a.terms_[i].second, b.terms_[i].second); c != 0) return c <=> 0;
        }
        if (a.terms_.size() != b.terms_.size()) return a.terms_.size() <=> b.terms_.size();
        if (int c = cmp(a.constant_, b.constant_); c != 0) return c <=> 0;
        return a.strict_ <=> b.strict_;
    }

private:
    void normalize()
    {
        std::sort(terms_.begin(), terms_.end(), [](const Term& x, const Term& y) { return x.first < y.first; });
        std::vector<Term> merged;
        for (auto& t : terms_) {
            if (!merged.empty() && merged.back().first == t.first)
                merged.back().second += t.second;
            else
                merged.push_back(std::move(t));
        }
        std::erase_if(merged, [](const Term& t) { return t.second == 0; });
        terms_ = std::move(merged);

        if (terms_.empty()) {
            constant_ = sgn(constant_);
            return;
        }
        Integer lcm_den = constant_.get_den();
        for (const auto& t : terms_) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), t.second.get_den_mpz_t());
        Integer g = 0;
        for (auto& t : terms_) {
            t.second *= lcm_den;
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), t.second.get_num_mpz_t());
        }
        constant_ *= lcm_den;
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), constant_.get_num_mpz_t());
        if (g != 1) {
            Rational inv{Integer{1}, g};
            for (auto& t : terms_) t.second *= inv;
            constant_ *= inv;
        }
    }

    std::vector<Term> terms_;
    Rational constant_;
    bool strict_ = false;
};

namespace detail {

inline void sort_unique(std::vector<LinearAtom>& atoms)
{
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
}

} // namespace detail

/// Conjunction of atoms, sorted and duplicate-free.
class RunConstraint {
public:
    RunConstraint() = default;
    explicit RunConstraint(std::vector<LinearAtom> atoms) : atoms_(std::move(atoms)) { detail::sort_unique(atoms_); }

    void add(const LinearAtom& a)
    {
        auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
        if (it == atoms_.end() || *it != a) atoms_.insert(it, a);
    }

    void add(const RunConstraint& other)
    {
        for (const auto& a : other.atoms_) add(a);
    }

    [[nodiscard]] std::span<const LinearAtom> atoms() const noexcept { return atoms_; }
    [[nodiscard]] std::size_t size() const noexcept { return atoms_.size(); }

    [[nodiscard]] bool eval(std::span<const Rational> point) const
    {
        return std::all_of(atoms_.begin(), atoms_.end(), [&](const LinearAtom& a) { return a.eval(point); });
    }

    friend bool operator==(const RunConstraint&, const RunConstraint&) = default;

private:
    std::vector<LinearAtom> atoms_;
};

/// Disjunction of atoms. Empty means false.
using Clause = std::vector<LinearAtom>;

/// Conjunction of clauses. No clauses means true.
class ConstraintSet {
public:
    ConstraintSet() = default;
    explicit ConstraintSet(std::vector<Clause> clauses) : clauses_(std::move(clauses)) {}

    void add_clause(Clause c) { clauses_.push_back(std::move(c)); }

    /// The clause ruling out a run: the atom-wise negation of its constraint.
    void block(const RunConstraint& rc)
    {
        Clause c;
        c.reserve(rc.size());
        for (const auto& a : rc.atoms()) c.push_back(a.negated());
        detail::sort_unique(c);
        clauses_.push_back(std::move(c));
    }

    [[nodiscard]] std::span<const Clause> clauses() const noexcept { return clauses_; }
    [[nodiscard]] std::size_t size() const noexcept { return clauses_.size(); }
    [[nodiscard]] bool empty() const noexcept { return clauses_.empty(); }

    [[nodiscard]] std::size_t atom_count() const noexcept
    {
        std::size_t n = 0;
        for (const auto& c : clauses_) n += c.size();
        return n;
    }

    friend bool operator==(const ConstraintSet&, const ConstraintSet&) = default;

private:
    std::vector<Clause> clauses_;
};

inline bool eval_atom(const LinearAtom& a, std::span<const Rational> point) { return a.eval(point); }

inline bool eval_set(const ConstraintSet& c, std::span<const Rational> point)
{
    for (const auto& clause : c.clauses()) {
        bool sat = false;
        for (const auto& a : clause)
            if (a.eval(point)) {
                sat = true;
                break;
            }
        if (!sat) return false;
    }
    return true;
}

/// Equivalent set with duplicate atoms and clauses removed, constant atoms
/// folded, tautological clauses (an atom with its negation, or a true
/// constant) dropped, and clauses subsumed by a sub-clause dropped.
inline ConstraintSet simplify(const ConstraintSet& c)
{
    std::vector<Clause> work;
    work.reserve(c.size());
    for (const auto& clause : c.clauses()) {
        Clause out;
        bool tautology = false;
        for (const auto& a : clause) {
            if (a.is_constant()) {
                if (a.eval({})) tautology = true;
                continue;
            }
            out.push_back(a);
        }
        if (tautology) continue;
        detail::sort_unique(out);
        for (const auto& a : out)
            if (std::binary_search(out.begin(), out.end(), a.negated())) {
                tautology = true;
                break;
            }
        if (!tautology) work.push_back(std::move(out));
    }

    std::sort(work.begin(), work.end(), [](const Clause& x, const Clause& y) {
        if (x.size() != y.size()) return x.size() < y.size();
        return x < y;
    });
    work.erase(std::unique(work.begin(), work.end()), work.end());

    std::vector<Clause> kept;
    for (auto& clause : work) {
        bool subsumed = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
            return std::includes(clause.begin(), clause.end(), k.begin(), k.end());
        });
        if (!subsumed) kept.push_back(std::move(clause));
    }
    return ConstraintSet{std::move(kept)};
}

/// Closed bounds lo <= v <= hi per variable.
struct Box {
    std::vector<Rational> lo;
    std::vector<Rational> hi;

    [[nodiscard]] std::size_t size() const noexcept { return lo.size(); }
};

namespace detail {

/// Dense row  coef . x + c  (> or >=) 0  over a component's local variables.
struct FmRow {
    std::vector<Rational> coef;
    Rational c;
    bool strict = false;
};

inline void normalize_row(FmRow& r)
{
    Integer g = 0;
    bool any = false;
    for (const auto& k : r.coef)
        if (k != 0) {
            any = true;
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), k.get_num_mpz_t());
        }
    if (!any) {
        r.c = sgn(r.c);
        return;
    }
    Integer l = r.c.get_den();
    for (const auto& k : r.coef) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), k.get_den_mpz_t());
    for (auto& k : r.coef) k *= l;
    r.c *= l;
    g = 0;
    for (const auto& k : r.coef) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), k.get_num_mpz_t());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), r.c.get_num_mpz_t());
    if (g != 1) {
        Rational inv{Integer{1}, g};
        for (auto& k : r.coef) k *= inv;
        r.c *= inv;
    }
}

/// Keeps, for every coefficient vector, only the tightest row. Returns false
/// if a variable-free row is violated.
inline bool prune_rows(std::vector<FmRow>& rows)
{
    for (auto& r : rows) normalize_row(r);
    std::vector<FmRow> out;
    std::map<std::vector<Rational>, std::size_t> index;
    for (auto& r : rows) {
        bool constant = std::all_of(r.coef.begin(), r.coef.end(), [](const Rational& k) { return k == 0; });
        if (constant) {
            const int s = sgn(r.c);
            if (r.strict ? s <= 0 : s < 0) return false;
            continue;
        }
        auto [it, inserted] = index.emplace(r.coef, out.size());
        if (inserted) {
            out.push_back(std::move(r));
            continue;
        }
        FmRow& kept = out[it->second];
        // Same left side: smaller constant is tighter; on ties strict wins.
        if (r.c < kept.c || (r.c == kept.c && r.strict && !kept.strict)) kept = std::move(r);
    }
    rows = std::move(out);
    return true;
}

/// Fourier-Motzkin over `nvars` local variables; on success fills `point`.
inline bool fm_solve(std::vector<FmRow> rows, std::size_t nvars, std::vector<Rational>& point)
{
    std::vector<std::vector<FmRow>> levels;
    levels.reserve(nvars);
    for (std::size_t k = 0; k < nvars; ++k) {
        if (!prune_rows(rows)) return false;
        std::vector<FmRow> next, pos, neg;
        for (auto& r : rows) {
            const int s = sgn(r.coef[k]);
            if (s > 0)
                pos.push_back(r);
            else if (s < 0)
                neg.push_back(r);
            else
                next.push_back(r);
        }
        for (const auto& p : pos)
            for (const auto& n : neg) {
                // a*x + rp (>) 0 with a > 0, -b*x + rn (>) 0 with b > 0.
                const Rational a = p.coef[k];
                const Rational b = -n.coef[k];
                FmRow comb;
                comb.coef.resize(nvars);
                for (std::size_t j = 0; j < nvars; ++j) comb.coef[j] = b * p.coef[j] + a * n.coef[j];
                comb.coef[k] = 0;
                comb.c = b * p.c + a * n.c;
                comb.strict = p.strict || n.strict;
                next.push_back(std::move(comb));
            }
        levels.push_back(std::move(rows));
        rows = std::move(next);
    }
    if (!prune_rows(rows)) return false;

    point.assign(nvars, Rational{0});
    for (std::size_t k = nvars; k-- > 0;) {
        std::optional<Rational> lo, hi;
        bool lo_strict = false, hi_strict = false;
        for (const auto& r : levels[k]) {
            const int s = sgn(r.coef[k]);
            if (s == 0) continue;
            Rational rest = r.c;
            for (std::size_t j = k + 1; j < nvars; ++j) rest += r.coef[j] * point[j];
            Rational bound = -rest / r.coef[k];
            if (s > 0) {
                if (!lo || bound > *lo || (bound == *lo && r.strict)) {
                    lo_strict = (lo && bound == *lo) ? (lo_strict || r.strict) : r.strict;
                    lo = bound;
                }
            } else {
                if (!hi || bound < *hi || (bound == *hi && r.strict)) {
                    hi_strict = (hi && bound == *hi) ? (hi_strict || r.strict) : r.strict;
                    hi = bound;
                }
            }
        }
        Rational x;
        if (lo && hi) {
            if (*lo > *hi || (*lo == *hi && (lo_strict || hi_strict))) return false;
            x = *lo == *hi ? *lo : Rational{(*lo + *hi) / 2};
        } else if (lo) {
            x = lo_strict ? Rational{*lo + 1} : *lo;
        } else if (hi) {
            x = hi_strict ? Rational{*hi - 1} : *hi;
        } else {
            x = 0;
        }
        point[k] = x;
    }
    return true;
}

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

private:
    std::vector<std::size_t> parent_;
};

/// Solves the atoms restricted to the components that contain any variable
/// flagged in `only` (all components if `only` is empty). Writes component
/// values into `point` (sized box.size()).
inline bool solve_components(std::span<const LinearAtom> atoms, const Box& box, std::span<const char> only,
                             std::vector<Rational>& point)
{
    const std::size_t n = box.size();
    for (const auto& a : atoms) {
        if (a.is_constant()) {
            if (!a.eval({})) return false;
            continue;
        }
        for (const auto& [v, k] : a.terms())
            if (v >= n) throw BindingError("variable " + std::to_string(v) + " outside the box");
    }

    UnionFind uf(n);
    for (const auto& a : atoms) {
        auto t = a.terms();
        for (std::size_t i = 1; i < t.size(); ++i) uf.unite(t[0].first, t[i].first);
    }

    std::vector<char> wanted(n, 0), used(n, 0);
    for (const auto& a : atoms)
        for (const auto& [v, k] : a.terms()) used[v] = 1;
    for (std::size_t v = 0; v < n; ++v)
        if (used[v] && (only.empty() || only[v])) wanted[uf.find(v)] = 1;

    std::map<std::size_t, std::vector<std::size_t>> members;
    for (std::size_t v = 0; v < n; ++v)
        if (used[v] && wanted[uf.find(v)]) members[uf.find(v)].push_back(v);

    for (const auto& [root, vars] : members) {
        std::vector<std::size_t> local(n, SIZE_MAX);
        for (std::size_t i = 0; i < vars.size(); ++i) local[vars[i]] = i;
        std::vector<FmRow> rows;
        for (const auto& a : atoms) {
            if (a.is_constant() || uf.find(a.terms().front().first) != root) continue;
            FmRow r;
            r.coef.assign(vars.size(), Rational{0});
            for (const auto& [v, k] : a.terms()) r.coef[local[v]] = k;
            r.c = a.constant();
            r.strict = a.strict();
            rows.push_back(std::move(r));
        }
        for (std::size_t i = 0; i < vars.size(); ++i) {
            FmRow lo, hi;
            lo.coef.assign(vars.size(), Rational{0});
            hi.coef.assign(vars.size(), Rational{0});
            lo.coef[i] = 1;
            lo.c = -box.lo[vars[i]];
            hi.coef[i] = -1;
            hi.c = box.hi[vars[i]];
            rows.push_back(std::move(lo));
            rows.push_back(std::move(hi));
        }
        std::vector<Rational> local_point;
        if (!fm_solve(std::move(rows), vars.size(), local_point)) return false;
        for (std::size_t i = 0; i < vars.size(); ++i) point[vars[i]] = local_point[i];
    }
    return true;
}

} // namespace detail

/// A rational point of the box satisfying every atom, or nullopt.
inline std::optional<std::vector<Rational>> find_witness(std::span<const LinearAtom> atoms, const Box& box)
{
    for (std::size_t v = 0; v < box.size(); ++v)
        if (box.lo[v] > box.hi[v]) return std::nullopt;
    std::vector<Rational> point(box.lo.begin(), box.lo.end());
    if (!detail::solve_components(atoms, box, {}, point)) return std::nullopt;
    return point;
}

inline bool feasible(std::span<const LinearAtom> atoms, const Box& box) { return find_witness(atoms, box).has_value(); }

inline bool feasible(const RunConstraint& rc, const Box& box) { return feasible(rc.atoms(), box); }

/// A stack of atom frames with cached feasibility verdicts. A new frame only
/// re-solves the variable components its atoms touch.
class FeasibilityContext {
public:
    explicit FeasibilityContext(Box box) : box_(std::move(box)) { frames_.push_back(Frame{{}, {}, true, true}); }

    void push(std::span<const LinearAtom> atoms)
    {
        Frame f;
        f.pushed.assign(atoms.begin(), atoms.end());
        for (const auto& a : atoms)
            if (++counts_[a] == 1) f.added.push_back(a);
        frames_.push_back(std::move(f));
    }

    void push(const LinearAtom& a) { push(std::span<const LinearAtom>{&a, 1}); }
    void push(const RunConstraint& rc) { push(rc.atoms()); }

    void pop()
    {
        if (frames_.size() <= 1) throw Error("pop on empty feasibility context");
        for (const auto& a : frames_.back().pushed) {
            auto it = counts_.find(a);
            if (--it->second == 0) counts_.erase(it);
        }
        frames_.pop_back();
    }

    [[nodiscard]] std::size_t depth() const noexcept { return frames_.size() - 1; }

    [[nodiscard]] bool feasible()
    {
        Frame& top = frames_.back();
        if (top.known) return top.verdict;
        const Frame& parent = frames_[frames_.size() - 2];
        bool verdict;
        if (!parent.known) {
            verdict = solve(nullptr);
        } else if (!parent.verdict) {
            verdict = false;
        } else if (top.added.empty()) {
            verdict = true;
        } else {
            verdict = solve(&top.added);
        }
        top.known = true;
        top.verdict = verdict;
        return verdict;
    }

    /// Witness for the whole stack, or nullopt when infeasible.
    [[nodiscard]] std::optional<std::vector<Rational>> witness() const { return find_witness(current_atoms(), box_); }

    [[nodiscard]] std::vector<LinearAtom> current_atoms() const
    {
        std::vector<LinearAtom> out;
        out.reserve(counts_.size());
        for (const auto& [a, n] : counts_) out.push_back(a);
        return out;
    }

    [[nodiscard]] const Box& box() const noexcept { return box_; }

private:
    struct Frame {
        std::vector<LinearAtom> pushed;
        std::vector<LinearAtom> added; // not already on the stack
        bool known = false;
        bool verdict = false;
    };

    bool solve(const std::vector<LinearAtom>* touched) const
    {
        auto atoms = current_atoms();
        std::vector<Rational> point(box_.lo.begin(), box_.lo.end());
        if (!touched) return detail::solve_components(atoms, box_, {}, point);
        std::vector<char> only(box_.size(), 0);
        bool any = false;
        for (const auto& a : *touched) {
            if (a.is_constant() && !a.eval({})) return false;
            for (const auto& [v, k] : a.terms()) {
                if (v >= only.size()) throw BindingError("variable " + std::to_string(v) + " outside the box");
                only[v] = 1;
                any = true;
            }
        }
        if (!any) return true;
        return detail::solve_components(atoms, box_, only, point);
    }

    Box box_;
    std::vector<Frame> frames_;
    std::map<LinearAtom, int> counts_;
};

/// Constraint set compiled for repeated point evaluation: distinct atoms are
/// evaluated at most once per point, on demand. Not thread-safe; copy per
/// worker.
class ConstraintEvaluator {
public:
    explicit ConstraintEvaluator(const ConstraintSet& set)
    {
        std::map<LinearAtom, std::uint32_t> ids;
        for (const auto& clause : set.clauses()) {
            std::vector<std::uint32_t> c;
            for (const auto& a : clause) {
                auto [it, inserted] = ids.emplace(a, static_cast<std::uint32_t>(atoms_.size()));
                if (inserted) atoms_.push_back(a);
                c.push_back(it->second);
            }
            clauses_.push_back(std::move(c));
        }
        cache_.assign(atoms_.size(), -1);
    }

    [[nodiscard]] bool operator()(std::span<const Rational> point)
    {
        std::fill(cache_.begin(), cache_.end(), std::int8_t{-1});
        for (const auto& clause : clauses_) {
            bool sat = false;
            for (std::uint32_t id : clause) {
                if (cache_[id] < 0) cache_[id] = atoms_[id].eval(point) ? 1 : 0;
                if (cache_[id]) {
                    sat = true;
                    break;
                }
            }
            if (!sat) return false;
        }
        return true;
    }

    [[nodiscard]] std::size_t distinct_atoms() const noexcept { return atoms_.size(); }

private:
    std::vector<LinearAtom> atoms_;
    std::vector<std::vector<std::uint32_t>> clauses_;
    std::vector<std::int8_t> cache_;
};

} // namespace grnsynth
