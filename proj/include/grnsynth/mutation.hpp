// SPDX-License-Identifier: Apache-2.0
#pragma once

// Mutation model for binding-site weights.
//
// Each nucleotide of an edge's binding site follows a two-state chain
// (0 = matches the optimal sequence, 1 = mutated). The number of mutated
// nucleotides among l is itself a Markov chain whose stationary law is
// Binomial(l, beta), beta being the stationary mutated probability of one
// nucleotide. An edge with k mutated nucleotides has weight w_max * (1 - k/l).
// Edges mutate independently, so the genome-level law is a product.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

#include "grnsynth/error.hpp"
#include "grnsynth/model.hpp"
#include "grnsynth/rational.hpp"

namespace grnsynth {

/// Row-stochastic 2x2 matrix [[p00, p01], [p10, p11]].
struct LumpedNucleotideChain {
    Rational p00, p01, p10, p11;

    LumpedNucleotideChain() : p00(1), p01(0), p10(0), p11(1) {}

    LumpedNucleotideChain(Rational a00, Rational a01, Rational a10, Rational a11)
        : p00(std::move(a00)), p01(std::move(a01)), p10(std::move(a10)), p11(std::move(a11))
    {
        for (const Rational* p : {&p00, &p01, &p10, &p11})
            if (*p < 0 || *p > 1) throw RangeError("transition probability outside [0, 1]");
        if (p00 + p01 != 1 || p10 + p11 != 1) throw RangeError("rows of the nucleotide chain must sum to 1");
    }

    friend bool operator==(const LumpedNucleotideChain&, const LumpedNucleotideChain&) = default;
};

/// A correct nucleotide mutates with probability p (to one of three others,
/// each p/3); a mutated one returns to the correct base with probability p/3.
inline LumpedNucleotideChain lumped_from_p(const Rational& p)
{
    if (p < 0 || p > 1) throw RangeError("mutation probability outside [0, 1]: " + to_string(p));
    const Rational back = p / 3;
    return LumpedNucleotideChain{1 - p, p, back, 1 - back};
}

/// Stationary probability of the mutated state, p01 / (p01 + p10).
inline Rational stationary_beta(const LumpedNucleotideChain& c)
{
    const Rational flow = c.p01 + c.p10;
    if (flow == 0) throw RangeError("degenerate nucleotide chain: no transitions, stationary law not unique");
    if (c.p01 == 1 && c.p10 == 1) throw RangeError("degenerate nucleotide chain: periodic, no limit");
    return c.p01 / flow;
}

class MutationCountChain {
public:
    MutationCountChain(int length, LumpedNucleotideChain base) : length_(length), base_(std::move(base))
    {
        if (length < 1) throw RangeError("binding-site length must be >= 1");
    }

    [[nodiscard]] int length() const noexcept { return length_; }
    [[nodiscard]] const LumpedNucleotideChain& base() const noexcept { return base_; }

    /// P(M_{n+1} = j | M_n = i): u of the i mutated sites stay mutated and
    /// j - u of the l - i correct sites become mutated.
    [[nodiscard]] Rational transition(int i, int j) const
    {
        const int l = length_;
        if (i < 0 || i > l || j < 0 || j > l) throw RangeError("mutation count outside 0..l");
        Rational sum = 0;
        for (int u = 0; u <= std::min(i, j); ++u) {
            const int fresh = j - u;
            if (fresh > l - i) continue;
            Rational term{binomial(static_cast<unsigned long>(i), static_cast<unsigned long>(u))
                          * binomial(static_cast<unsigned long>(l - i), static_cast<unsigned long>(fresh))};
            term *= pow(base_.p11, static_cast<unsigned long>(u));
            term *= pow(base_.p10, static_cast<unsigned long>(i - u));
            term *= pow(base_.p01, static_cast<unsigned long>(fresh));
            term *= pow(base_.p00, static_cast<unsigned long>(l - i - fresh));
            sum += term;
        }
        return sum;
    }

    [[nodiscard]] std::vector<std::vector<Rational>> matrix() const
    {
        std::vector<std::vector<Rational>> m(static_cast<std::size_t>(length_) + 1);
        for (int i = 0; i <= length_; ++i) {
            m[static_cast<std::size_t>(i)].reserve(static_cast<std::size_t>(length_) + 1);
            for (int j = 0; j <= length_; ++j) m[static_cast<std::size_t>(i)].push_back(transition(i, j));
        }
        return m;
    }

private:
    int length_;
    LumpedNucleotideChain base_;
};

inline Rational count_transition(const MutationCountChain& c, int i, int j) { return c.transition(i, j); }

/// Binomial(l, beta) pmf over 0..l.
inline std::vector<Rational> binomial_pmf(int l, const Rational& beta)
{
    if (l < 0) throw RangeError("negative binomial size");
    if (beta < 0 || beta > 1) throw RangeError("beta outside [0, 1]");
    std::vector<Rational> pmf;
    pmf.reserve(static_cast<std::size_t>(l) + 1);
    const Rational miss = 1 - beta;
    for (int k = 0; k <= l; ++k) {
        Rational p{binomial(static_cast<unsigned long>(l), static_cast<unsigned long>(k))};
        p *= pow(beta, static_cast<unsigned long>(k));
        p *= pow(miss, static_cast<unsigned long>(l - k));
        pmf.push_back(std::move(p));
    }
    return pmf;
}

inline std::vector<Rational> stationary_counts(const MutationCountChain& c)
{
    return binomial_pmf(c.length(), stationary_beta(c.base()));
}

/// Weight of an edge with k of l binding-site nucleotides mutated.
inline Rational weight_from_count(const Rational& w_max, int k, int l)
{
    if (l < 1 || k < 0 || k > l) throw RangeError("mutation count " + std::to_string(k) + " outside 0.." + std::to_string(l));
    return w_max * (1 - make_rational(k, l));
}

/// Weight function of a genome with counts[e] mutated sites on edge e.
inline WeightFunction weights_from_counts(const GrnSpace& space, std::span<const int> counts)
{
    if (counts.size() != space.edge_count()) throw StructuralError("count vector does not match space");
    std::vector<Rational> w;
    w.reserve(counts.size());
    for (std::size_t e = 0; e < counts.size(); ++e)
        w.push_back(weight_from_count(space.edge(e).w_max, counts[e], space.edge(e).length));
    return WeightFunction{space, std::move(w)};
}

/// Either a per-nucleotide mutation probability (beta derived from the lumped
/// chain) or beta given directly.
struct MutationConfig {
    struct Probability {
        Rational p;
    };
    struct Beta {
        Rational beta;
    };
    std::variant<Probability, Beta> source = Beta{Rational{3, 4}};

    [[nodiscard]] Rational beta() const
    {
        if (const auto* pr = std::get_if<Probability>(&source)) return stationary_beta(lumped_from_p(pr->p));
        const Rational& b = std::get<Beta>(source).beta;
        if (b < 0 || b > 1) throw RangeError("beta outside [0, 1]");
        return b;
    }
};

/// Independent Binomial(l_e, beta_e) mutation counts per edge.
class MutationDistribution {
public:
    struct EdgeLaw {
        int length = 1;
        Rational beta;
    };

    MutationDistribution() = default;
    explicit MutationDistribution(std::vector<EdgeLaw> edges) : edges_(std::move(edges))
    {
        for (const auto& e : edges_) {
            if (e.length < 1) throw RangeError("binding-site length must be >= 1");
            if (e.beta < 0 || e.beta > 1) throw RangeError("beta outside [0, 1]");
        }
    }

    /// Same beta on every edge, lengths from the space.
    static MutationDistribution uniform(const GrnSpace& space, const Rational& beta)
    {
        std::vector<EdgeLaw> edges;
        for (const auto& e : space.edges()) edges.push_back({e.length, beta});
        return MutationDistribution{std::move(edges)};
    }

    static MutationDistribution from_config(const GrnSpace& space, const MutationConfig& config)
    {
        return uniform(space, config.beta());
    }

    [[nodiscard]] std::size_t size() const noexcept { return edges_.size(); }
    [[nodiscard]] const EdgeLaw& edge(std::size_t e) const { return edges_.at(e); }
    [[nodiscard]] std::span<const EdgeLaw> edges() const noexcept { return edges_; }

    [[nodiscard]] bool matches(const GrnSpace& space) const
    {
        if (edges_.size() != space.edge_count()) return false;
        for (std::size_t e = 0; e < edges_.size(); ++e)
            if (edges_[e].length != space.edge(e).length) return false;
        return true;
    }

private:
    std::vector<EdgeLaw> edges_;
};

/// Probability of the count vector k: prod_e C(l_e, k_e) beta_e^k_e (1 - beta_e)^(l_e - k_e).
inline Rational genome_pmf(const MutationDistribution& dist, std::span<const int> counts)
{
    if (counts.size() != dist.size()) throw StructuralError("count vector does not match distribution");
    Rational p = 1;
    for (std::size_t e = 0; e < counts.size(); ++e) {
        const auto& law = dist.edge(e);
        const int k = counts[e];
        if (k < 0 || k > law.length) throw RangeError("mutation count outside 0..l");
        p *= binomial(static_cast<unsigned long>(law.length), static_cast<unsigned long>(k));
        p *= pow(law.beta, static_cast<unsigned long>(k));
        p *= pow(Rational{1 - law.beta}, static_cast<unsigned long>(law.length - k));
    }
    return p;
}

/// Samples mutation counts per edge and maps them to weights. Weight values
/// for every count are precomputed; copy per worker.
class WeightSampler {
public:
    WeightSampler(const GrnSpace& space, const MutationDistribution& dist)
    {
        if (!dist.matches(space)) throw StructuralError("mutation distribution does not match space edges");
        for (std::size_t e = 0; e < space.edge_count(); ++e) {
            const auto& law = dist.edge(e);
            std::vector<Rational> values;
            for (int k = 0; k <= law.length; ++k) values.push_back(weight_from_count(space.edge(e).w_max, k, law.length));
            table_.push_back(std::move(values));
            laws_.emplace_back(law.length, to_double(law.beta));
        }
        current_.resize(space.edge_count());
        counts_.resize(space.edge_count());
    }

    template <class Rng>
    std::span<const Rational> operator()(Rng& rng)
    {
        for (std::size_t e = 0; e < laws_.size(); ++e) {
            const int k = laws_[e](rng);
            counts_[e] = k;
            current_[e] = table_[e][static_cast<std::size_t>(k)];
        }
        return current_;
    }

    [[nodiscard]] std::span<const int> counts() const noexcept { return counts_; }

private:
    std::vector<std::vector<Rational>> table_;
    std::vector<std::binomial_distribution<int>> laws_;
    std::vector<Rational> current_;
    std::vector<int> counts_;
};

/// One weight function drawn from `dist`; deterministic in `seed`.
inline WeightFunction sample_weights(const MutationDistribution& dist, const GrnSpace& space, std::uint64_t seed)
{
    std::mt19937_64 rng{seed};
    WeightSampler sampler{space, dist};
    auto w = sampler(rng);
    return WeightFunction{space, std::vector<Rational>(w.begin(), w.end())};
}

} // namespace grnsynth
