// SPDX-License-Identifier: Apache-2.0
#pragma once

// Constraint synthesis over the parametrized transition system of a GRN
// space. Every pair of states is connected by a transition labelled with the
// linear constraint under which a concrete network takes it. A depth-first
// unfolding collects every feasible run that violates the property, and the
// result is the conjunction of the negated run constraints.

#include <atomic>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "grnsynth/constraints.hpp"
#include "grnsynth/logic.hpp"
#include "grnsynth/model.hpp"

namespace grnsynth {

class ParametrizedTs {
public:
    explicit ParametrizedTs(GrnSpace space) : space_(std::move(space)), states_(enumerate_states(space_))
    {
        const std::size_t genes = space_.gene_count();
        atoms_.resize(states_.size() * genes * 2);
        for (std::size_t i = 0; i < states_.size(); ++i)
            for (std::size_t g = 1; g < genes; ++g)
                for (int on = 0; on < 2; ++on) atoms_[(i * genes + g) * 2 + on] = make_atom(states_[i], g, on != 0);
    }

    [[nodiscard]] const GrnSpace& space() const noexcept { return space_; }
    [[nodiscard]] std::span<const GrnState> states() const noexcept { return states_; }

    /// Weight bounds 0 <= v_e <= w_max(e).
    [[nodiscard]] Box box() const
    {
        Box b;
        for (const auto& e : space_.edges()) {
            b.lo.emplace_back(0);
            b.hi.push_back(e.w_max);
        }
        return b;
    }

    /// The atom saying gene `g` is (in)active after state `s`.
    [[nodiscard]] const LinearAtom& gene_atom(const GrnState& s, std::size_t g, bool active_next) const
    {
        return atoms_[(s.index() * space_.gene_count() + g) * 2 + (active_next ? 1 : 0)];
    }

    /// Label of the transition s -> s2: one atom per non-input gene.
    [[nodiscard]] std::vector<LinearAtom> transition_atoms(const GrnState& s, const GrnState& s2) const
    {
        detail::check_state(space_, s);
        detail::check_state(space_, s2);
        std::vector<LinearAtom> out;
        out.reserve(space_.gene_count() - 1);
        for (std::size_t g = 1; g < space_.gene_count(); ++g) out.push_back(gene_atom(s, g, s2.active(g)));
        return out;
    }

private:
    LinearAtom make_atom(const GrnState& s, std::size_t g, bool active_next) const
    {
        // sum_active (+-v_e) - t(g) > 0  when g turns on,
        // t(g) - sum_active (+-v_e) >= 0 when it stays off.
        std::vector<LinearAtom::Term> terms;
        for (std::size_t e : space_.in_edges(g)) {
            const Edge& ed = space_.edge(e);
            if (!s.active(ed.from)) continue;
            Rational k = ed.sign == EdgeSign::activate ? 1 : -1;
            if (!active_next) k = -k;
            terms.emplace_back(e, std::move(k));
        }
        Rational c = active_next ? Rational{-space_.threshold(g)} : space_.threshold(g);
        return LinearAtom{std::move(terms), std::move(c), active_next};
    }

    GrnSpace space_;
    std::vector<GrnState> states_;
    std::vector<LinearAtom> atoms_;
};

inline RunConstraint edge_constraint(const ParametrizedTs& ts, const GrnState& s, const GrnState& s2)
{
    return RunConstraint{ts.transition_atoms(s, s2)};
}

/// A feasible run of the parametrized system on which the negated property
/// holds. Lassos carry loop_start; prefixes decided early do not.
struct Counterexample {
    std::vector<GrnState> states;
    std::optional<std::size_t> loop_start;
    RunConstraint constraint;
};

struct SynthesisOptions {
    bool simplify = true;
    bool record_counterexamples = false;
    unsigned workers = 1;
};

struct SynthesisStats {
    std::uint64_t nodes = 0;
    std::uint64_t infeasible = 0;
    std::uint64_t counterexamples = 0;
    std::uint64_t lassos = 0;
    std::uint64_t definite_prefixes = 0;
    double seconds = 0;
};

struct SynthesisResult {
    ConstraintSet constraints;
    std::vector<Counterexample> counterexamples;
    SynthesisStats stats;
};

namespace detail {

class GenConsSearch {
public:
    GenConsSearch(const ParametrizedTs& ts, const BoundFormula& negated, bool record)
        : ts_(ts), negated_(negated), record_(record), ctx_(ts.box()), position_(ts.states().size(), SIZE_MAX)
    {
    }

    void run_from(const GrnState& s0)
    {
        branch_.push_back(s0);
        position_[s0.index()] = 0;
        ++stats_.nodes;
        Verdict v = eval_prefix(negated_, branch_);
        if (v == Verdict::True) {
            ++stats_.definite_prefixes;
            emit(std::nullopt);
        } else if (v == Verdict::Undefined) {
            extend();
        }
        position_[s0.index()] = SIZE_MAX;
        branch_.pop_back();
    }

    ConstraintSet clauses;
    std::vector<Counterexample> found;
    SynthesisStats stats_;

private:
    void extend()
    {
        const GrnState last = branch_.back();
        for (const GrnState& next : ts_.states()) {
            ctx_.push(ts_.transition_atoms(last, next));
            ++stats_.nodes;
            if (!ctx_.feasible()) {
                ++stats_.infeasible;
                ctx_.pop();
                continue;
            }
            const std::size_t seen = position_[next.index()];
            if (seen != SIZE_MAX) {
                LassoRun lasso{branch_, seen};
                if (eval_lasso(negated_, lasso)) {
                    ++stats_.lassos;
                    emit(seen);
                }
            } else {
                branch_.push_back(next);
                position_[next.index()] = branch_.size() - 1;
                Verdict v = eval_prefix(negated_, branch_);
                if (v == Verdict::True) {
                    ++stats_.definite_prefixes;
                    emit(std::nullopt);
                } else if (v == Verdict::Undefined) {
                    extend();
                }
                position_[next.index()] = SIZE_MAX;
                branch_.pop_back();
            }
            ctx_.pop();
        }
    }

    void emit(std::optional<std::size_t> loop_start)
    {
        ++stats_.counterexamples;
        RunConstraint rc{ctx_.current_atoms()};
        clauses.block(rc);
        if (record_) found.push_back(Counterexample{branch_, loop_start, std::move(rc)});
    }

    const ParametrizedTs& ts_;
    const BoundFormula& negated_;
    bool record_;
    FeasibilityContext ctx_;
    std::vector<GrnState> branch_;
    std::vector<std::size_t> position_;
};

} // namespace detail

/// Constraints over edge weights that hold exactly for the weight functions
/// whose network satisfies `phi` from every initial state.
inline SynthesisResult gencons(const ParametrizedTs& ts, const LtlFormula& phi, const SynthesisOptions& options = {})
{
    const auto start = std::chrono::steady_clock::now();
    const BoundFormula negated = BoundFormula{phi, ts.space()}.negated();
    const auto states = ts.states();

    // One search per initial state; results are merged in state order so the
    // output does not depend on the worker count.
    std::vector<detail::GenConsSearch> searches;
    searches.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) searches.emplace_back(ts, negated, options.record_counterexamples);

    const unsigned workers = std::max(1U, std::min<unsigned>(options.workers, static_cast<unsigned>(states.size())));
    if (workers == 1) {
        for (std::size_t i = 0; i < states.size(); ++i) searches[i].run_from(states[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < states.size(); i = next++) searches[i].run_from(states[i]);
            });
    }

    SynthesisResult result;
    ConstraintSet raw;
    for (auto& s : searches) {
        for (const auto& c : s.clauses.clauses()) raw.add_clause(c);
        for (auto& cx : s.found) result.counterexamples.push_back(std::move(cx));
        result.stats.nodes += s.stats_.nodes;
        result.stats.infeasible += s.stats_.infeasible;
        result.stats.counterexamples += s.stats_.counterexamples;
        result.stats.lassos += s.stats_.lassos;
        result.stats.definite_prefixes += s.stats_.definite_prefixes;
    }
    result.constraints = options.simplify ? simplify(raw) : std::move(raw);
    result.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

inline SynthesisResult gencons(const GrnSpace& space, const LtlFormula& phi, const SynthesisOptions& options = {})
{
    return gencons(ParametrizedTs{space}, phi, options);
}

/// Checks a concrete network by running it from every initial state.
/// Holds scratch state; copy per worker.
class ExecutionChecker {
public:
    ExecutionChecker(const GrnSpace& space, const LtlFormula& phi)
        : space_(&space), phi_(phi, space), states_(enumerate_states(space))
    {
    }

    [[nodiscard]] bool operator()(std::span<const Rational> w) const
    {
        for (const auto& s0 : states_)
            if (!eval_lasso(phi_, run_to_lasso(*space_, w, s0))) return false;
        return true;
    }

private:
    const GrnSpace* space_;
    BoundFormula phi_;
    std::vector<GrnState> states_;
};

inline bool verify_by_execution(const GrnSpace& space, const WeightFunction& w, const LtlFormula& phi)
{
    return ExecutionChecker{space, phi}(w.values());
}

} // namespace grnsynth
