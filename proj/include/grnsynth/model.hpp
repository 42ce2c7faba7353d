// SPDX-License-Identifier: Apache-2.0
#pragma once

// Weighted Boolean gene-regulatory networks: the parameter space (topology,
// thresholds, per-edge weight ranges), concrete weight functions, states, and
// the synchronous deterministic update rule.
//
// Gene 0 is always the constant-input gene. It is active in every state and
// activates every other gene; its outgoing edge weights model the constant
// inputs of the other genes.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "grnsynth/error.hpp"
#include "grnsynth/rational.hpp"

namespace grnsynth {

enum class EdgeSign { activate, repress };

inline const char* to_string(EdgeSign sign)
{
    return sign == EdgeSign::activate ? "activate" : "repress";
}

struct GeneSpec {
    std::string name;
    Rational threshold;
};

/// Edge declared by gene names; resolved to indices by GrnSpace.
struct EdgeSpec {
    std::string from;
    std::string to;
    EdgeSign sign = EdgeSign::activate;
    Rational w_max;
    int length = 1;
};

struct Edge {
    std::size_t from = 0;
    std::size_t to = 0;
    EdgeSign sign = EdgeSign::activate;
    Rational w_max;
    int length = 1;
};

/// Upper bound on non-input genes; states are stored as 64-bit masks.
inline constexpr std::size_t max_genes = 62;

class GrnSpace {
public:
    static constexpr std::size_t input = 0;

    GrnSpace(GeneSpec input_gene, std::vector<GeneSpec> genes, std::vector<EdgeSpec> edges)
    {
        genes_.reserve(genes.size() + 1);
        genes_.push_back(std::move(input_gene));
        for (auto& g : genes) genes_.push_back(std::move(g));
        if (genes_.size() - 1 > max_genes)
            throw StructuralError("too many genes: " + std::to_string(genes_.size() - 1));

        for (std::size_t i = 0; i < genes_.size(); ++i) {
            const auto& name = genes_[i].name;
            if (name.empty()) throw StructuralError("gene with empty name");
            if (!by_name_.emplace(name, i).second) throw StructuralError("duplicate gene name '" + name + "'");
        }

        if (genes_[input].threshold >= 0)
            throw StructuralError("input gene threshold must be negative");
        for (std::size_t i = 1; i < genes_.size(); ++i)
            if (genes_[i].threshold < 0)
                throw StructuralError("threshold of gene '" + genes_[i].name + "' must be non-negative");

        in_edges_.assign(genes_.size(), {});
        edges_.reserve(edges.size());
        for (auto& spec : edges) {
            Edge e;
            e.from = gene_index(spec.from);
            e.to = gene_index(spec.to);
            e.sign = spec.sign;
            e.w_max = std::move(spec.w_max);
            e.length = spec.length;
            if (e.to == input)
                throw StructuralError("edge into the input gene from '" + spec.from + "'");
            if (e.from == input && e.sign != EdgeSign::activate)
                throw StructuralError("input gene may only activate ('" + spec.to + "')");
            if (e.w_max < 0) throw StructuralError("negative w_max on edge " + spec.from + "->" + spec.to);
            if (e.length < 1) throw StructuralError("binding-site length must be >= 1 on edge " + spec.from + "->" + spec.to);
            for (std::size_t other : in_edges_[e.to])
                if (edges_[other].from == e.from)
                    throw StructuralError("duplicate edge " + spec.from + "->" + spec.to);
            in_edges_[e.to].push_back(edges_.size());
            edges_.push_back(std::move(e));
        }

        for (std::size_t g = 1; g < genes_.size(); ++g) {
            bool has_input = std::any_of(in_edges_[g].begin(), in_edges_[g].end(),
                                         [&](std::size_t e) { return edges_[e].from == input; });
            if (!has_input)
                throw StructuralError("input gene must activate gene '" + genes_[g].name + "'");
        }
    }

    [[nodiscard]] std::size_t gene_count() const noexcept { return genes_.size(); }
    [[nodiscard]] const GeneSpec& gene(std::size_t g) const { return genes_.at(g); }
    [[nodiscard]] const std::string& gene_name(std::size_t g) const { return genes_.at(g).name; }
    [[nodiscard]] const Rational& threshold(std::size_t g) const { return genes_.at(g).threshold; }

    [[nodiscard]] std::optional<std::size_t> find_gene(std::string_view name) const
    {
        auto it = by_name_.find(std::string{name});
        if (it == by_name_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] std::size_t gene_index(std::string_view name) const
    {
        auto g = find_gene(name);
        if (!g) throw BindingError("unknown gene '" + std::string{name} + "'");
        return *g;
    }

    [[nodiscard]] std::size_t edge_count() const noexcept { return edges_.size(); }
    [[nodiscard]] const Edge& edge(std::size_t e) const { return edges_.at(e); }
    [[nodiscard]] std::span<const Edge> edges() const noexcept { return edges_; }
    [[nodiscard]] std::span<const std::size_t> in_edges(std::size_t g) const { return in_edges_.at(g); }

    [[nodiscard]] std::optional<std::size_t> find_edge(std::size_t from, std::size_t to) const
    {
        for (std::size_t e : in_edges_.at(to))
            if (edges_[e].from == from) return e;
        return std::nullopt;
    }

    /// Variable name of an edge weight, "w_<from>_<to>".
    [[nodiscard]] std::string variable_name(std::size_t e) const
    {
        const Edge& ed = edges_.at(e);
        return "w_" + genes_[ed.from].name + "_" + genes_[ed.to].name;
    }

    [[nodiscard]] std::optional<std::size_t> find_variable(std::string_view name) const
    {
        for (std::size_t e = 0; e < edges_.size(); ++e)
            if (variable_name(e) == name) return e;
        return std::nullopt;
    }

    /// Number of states with the input gene active: 2^(d-1).
    [[nodiscard]] std::uint64_t state_count() const noexcept { return std::uint64_t{1} << (genes_.size() - 1); }

    /// Number of points of the quantized weight grid, or nullopt on overflow.
    [[nodiscard]] std::optional<std::uint64_t> grid_size() const noexcept
    {
        std::uint64_t n = 1;
        for (const auto& e : edges_) {
            auto f = static_cast<std::uint64_t>(e.length) + 1;
            if (n > UINT64_MAX / f) return std::nullopt;
            n *= f;
        }
        return n;
    }

    [[nodiscard]] std::vector<EdgeSpec> edge_specs() const
    {
        std::vector<EdgeSpec> out;
        out.reserve(edges_.size());
        for (const auto& e : edges_)
            out.push_back({genes_[e.from].name, genes_[e.to].name, e.sign, e.w_max, e.length});
        return out;
    }

private:
    std::vector<GeneSpec> genes_;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> in_edges_;
    std::unordered_map<std::string, std::size_t> by_name_;
};

/// One concrete weight per edge of a space.
class WeightFunction {
public:
    WeightFunction() = default;

    WeightFunction(const GrnSpace& space, std::vector<Rational> weights) : weights_(std::move(weights))
    {
        if (weights_.size() != space.edge_count())
            throw StructuralError("weight function has " + std::to_string(weights_.size()) + " entries, space has "
                                  + std::to_string(space.edge_count()) + " edges");
        for (std::size_t e = 0; e < weights_.size(); ++e)
            if (weights_[e] < 0 || weights_[e] > space.edge(e).w_max)
                throw StructuralError("weight " + to_string(weights_[e]) + " of " + space.variable_name(e)
                                      + " outside [0, w_max]");
    }

    /// Every edge at its maximum weight.
    static WeightFunction maximal(const GrnSpace& space)
    {
        std::vector<Rational> w;
        w.reserve(space.edge_count());
        for (const auto& e : space.edges()) w.push_back(e.w_max);
        return WeightFunction{space, std::move(w)};
    }

    [[nodiscard]] std::size_t size() const noexcept { return weights_.size(); }
    [[nodiscard]] const Rational& operator[](std::size_t e) const { return weights_[e]; }
    [[nodiscard]] std::span<const Rational> values() const noexcept { return weights_; }

    friend bool operator==(const WeightFunction&, const WeightFunction&) = default;

private:
    std::vector<Rational> weights_;
};

/// Activation of every gene, stored as a bitmask (bit g = gene g).
class GrnState {
public:
    GrnState() = default;

    /// Non-input genes in declaration order.
    GrnState(const GrnSpace& space, std::initializer_list<bool> active)
        : GrnState(space, std::vector<bool>(active))
    {
    }

    GrnState(const GrnSpace& space, const std::vector<bool>& active) : gene_count_(space.gene_count())
    {
        if (active.size() + 1 != gene_count_)
            throw StructuralError("state has " + std::to_string(active.size()) + " genes, space has "
                                  + std::to_string(gene_count_ - 1));
        bits_ = 1;
        for (std::size_t i = 0; i < active.size(); ++i)
            if (active[i]) bits_ |= std::uint64_t{1} << (i + 1);
    }

    static GrnState from_bits(std::size_t gene_count, std::uint64_t bits)
    {
        GrnState s;
        s.gene_count_ = gene_count;
        s.bits_ = bits | 1U;
        return s;
    }

    /// Canonical index: lexicographic over the declared gene order, the first
    /// non-input gene being the most significant position.
    static GrnState from_index(const GrnSpace& space, std::uint64_t index)
    {
        const std::size_t n = space.gene_count() - 1;
        if (index >= space.state_count()) throw RangeError("state index out of range");
        std::uint64_t bits = 1;
        for (std::size_t i = 0; i < n; ++i)
            if ((index >> (n - 1 - i)) & 1U) bits |= std::uint64_t{1} << (i + 1);
        return from_bits(space.gene_count(), bits);
    }

    [[nodiscard]] std::uint64_t index() const noexcept
    {
        const std::size_t n = gene_count_ - 1;
        std::uint64_t idx = 0;
        for (std::size_t i = 0; i < n; ++i)
            if ((bits_ >> (i + 1)) & 1U) idx |= std::uint64_t{1} << (n - 1 - i);
        return idx;
    }

    [[nodiscard]] bool active(std::size_t g) const noexcept { return (bits_ >> g) & 1U; }
    [[nodiscard]] std::size_t gene_count() const noexcept { return gene_count_; }
    [[nodiscard]] std::uint64_t bits() const noexcept { return bits_; }

    friend bool operator==(const GrnState&, const GrnState&) = default;

private:
    std::size_t gene_count_ = 1;
    std::uint64_t bits_ = 1;
};

/// A run that repeats states[loop_start..] forever.
struct LassoRun {
    std::vector<GrnState> states;
    std::size_t loop_start = 0;

    [[nodiscard]] std::size_t size() const noexcept { return states.size(); }
    /// Index of the position following i in the infinite unrolling.
    [[nodiscard]] std::size_t successor(std::size_t i) const noexcept
    {
        return i + 1 < states.size() ? i + 1 : loop_start;
    }
};

namespace detail {

inline void check_state(const GrnSpace& space, const GrnState& s)
{
    if (s.gene_count() != space.gene_count())
        throw StructuralError("state over " + std::to_string(s.gene_count()) + " genes used with a space of "
                              + std::to_string(space.gene_count()));
    if (!s.active(GrnSpace::input)) throw StructuralError("input gene inactive in state");
}

} // namespace detail

/// Synchronous update: a gene is active next iff the weights of its active
/// activators minus those of its active repressors exceed its threshold.
/// `w` holds one weight per edge of `space`.
inline GrnState step(const GrnSpace& space, std::span<const Rational> w, const GrnState& s)
{
    detail::check_state(space, s);
    if (w.size() != space.edge_count()) throw StructuralError("weight function does not match space");
    std::uint64_t next = 0;
    Rational sum;
    for (std::size_t g = 0; g < space.gene_count(); ++g) {
        sum = 0;
        for (std::size_t e : space.in_edges(g)) {
            const Edge& ed = space.edge(e);
            if (!s.active(ed.from)) continue;
            if (ed.sign == EdgeSign::activate)
                sum += w[e];
            else
                sum -= w[e];
        }
        if (sum > space.threshold(g)) next |= std::uint64_t{1} << g;
    }
    return GrnState::from_bits(space.gene_count(), next);
}

inline GrnState step(const GrnSpace& space, const WeightFunction& w, const GrnState& s)
{
    return step(space, w.values(), s);
}

inline LassoRun run_to_lasso(const GrnSpace& space, std::span<const Rational> w, const GrnState& s0)
{
    detail::check_state(space, s0);
    LassoRun run;
    std::unordered_map<std::uint64_t, std::size_t> seen;
    GrnState s = s0;
    for (;;) {
        auto [it, inserted] = seen.emplace(s.bits(), run.states.size());
        if (!inserted) {
            run.loop_start = it->second;
            return run;
        }
        run.states.push_back(s);
        s = step(space, w, s);
    }
}

inline LassoRun run_to_lasso(const GrnSpace& space, const WeightFunction& w, const GrnState& s0)
{
    return run_to_lasso(space, w.values(), s0);
}

/// All 2^(d-1) states in canonical index order.
inline std::vector<GrnState> enumerate_states(const GrnSpace& space)
{
    if (space.gene_count() - 1 > 24) throw RangeError("state space too large to enumerate");
    std::vector<GrnState> out;
    out.reserve(space.state_count());
    for (std::uint64_t i = 0; i < space.state_count(); ++i) out.push_back(GrnState::from_index(space, i));
    return out;
}

} // namespace grnsynth
