// SPDX-License-Identifier: Apache-2.0
#pragma once

// Built-in benchmark networks with their properties.
//
//   bistable        two mutually repressing, self-activating genes; every
//                   parameter has 13 grid values (l = 12)
//   ffl-coherent    coherent type-I feed-forward loop, sign-sensitive delay
//   ffl-incoherent  incoherent type-I feed-forward loop, pulse generator
//   osc3            three-gene repressilator, oscillation of every gene
//
// The bistable parameters are the published ones. Feed-forward loop and
// repressilator parameters are illustrative: at maximal weights they satisfy
// the property, and mutations can break it.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "grnsynth/logic.hpp"
#include "grnsynth/model.hpp"

namespace grnsynth {

struct Benchmark {
    std::string name;
    std::string description;
    GrnSpace space;
    std::string property;
};

namespace detail {

inline Rational q(long num, long den = 1) { return make_rational(num, den); }

inline EdgeSpec act(std::string from, std::string to, Rational w_max, int length)
{
    return {std::move(from), std::move(to), EdgeSign::activate, std::move(w_max), length};
}

inline EdgeSpec rep(std::string from, std::string to, Rational w_max, int length)
{
    return {std::move(from), std::move(to), EdgeSign::repress, std::move(w_max), length};
}

} // namespace detail

inline GrnSpace bistable_space(int length = 12)
{
    using detail::act, detail::rep, detail::q;
    return GrnSpace{{"IN", q(-1)},
                    {{"A", q(3, 5)}, {"B", q(3, 5)}},
                    {act("IN", "A", q(2, 3), length), act("IN", "B", q(2, 3), length), act("A", "A", q(3, 10), length),
                     act("B", "B", q(3, 10), length), rep("A", "B", q(3, 10), length), rep("B", "A", q(3, 10), length)}};
}

inline constexpr std::string_view bistable_property = "(A & !B -> G (A & !B)) & (!A & B -> G (!A & B))";

inline GrnSpace osc3_space(int length = 4)
{
    using detail::act, detail::rep, detail::q;
    return GrnSpace{{"IN", q(-1)},
                    {{"A", q(1, 2)}, {"B", q(1, 2)}, {"C", q(1, 2)}},
                    {act("IN", "A", q(1), length), act("IN", "B", q(1), length), act("IN", "C", q(1), length),
                     rep("A", "B", q(1), length), rep("B", "C", q(1), length), rep("C", "A", q(1), length)}};
}

inline constexpr std::string_view osc3_property =
    "(A -> F !A) & (!A -> F A) & (B -> F !B) & (!B -> F B) & (C -> F !C) & (!C -> F C)";

inline GrnSpace ffl_coherent_space(int length = 4)
{
    using detail::act, detail::q;
    return GrnSpace{{"IN", q(-1)},
                    {{"A", q(1, 2)}, {"B", q(1, 2)}, {"C", q(1, 2)}},
                    {act("IN", "A", q(1), length), act("IN", "B", q(1, 4), length), act("IN", "C", q(1, 4), length),
                     act("A", "B", q(1), length), act("A", "C", q(1, 2), length), act("B", "C", q(1, 4), length)}};
}

inline constexpr std::string_view ffl_coherent_property = "(A & !C -> F C) & (!A & C -> X !C)";

inline GrnSpace ffl_incoherent_space(int length = 4)
{
    using detail::act, detail::rep, detail::q;
    return GrnSpace{{"IN", q(-1)},
                    {{"A", q(1, 2)}, {"B", q(1, 2)}, {"C", q(1, 2)}},
                    {act("IN", "A", q(1), length), act("IN", "B", q(1, 4), length), act("IN", "C", q(1, 4), length),
                     act("A", "B", q(1), length), act("A", "C", q(1, 2), length), rep("B", "C", q(1), length)}};
}

inline constexpr std::string_view ffl_incoherent_property = "!B -> ((A & !C -> X C) & (A & C -> F !C))";

inline std::vector<Benchmark> benchmark_catalog()
{
    std::vector<Benchmark> out;
    out.push_back({"bistable", "mutual repression with self-activation; bistability", bistable_space(),
                   std::string{bistable_property}});
    out.push_back({"ffl-coherent", "coherent type-I feed-forward loop; sign-sensitive delay", ffl_coherent_space(),
                   std::string{ffl_coherent_property}});
    out.push_back({"ffl-incoherent", "incoherent type-I feed-forward loop; pulse generator", ffl_incoherent_space(),
                   std::string{ffl_incoherent_property}});
    out.push_back({"osc3", "three-gene repressilator; every gene oscillates", osc3_space(), std::string{osc3_property}});
    return out;
}

inline std::optional<Benchmark> find_benchmark(std::string_view name)
{
    for (auto& b : benchmark_catalog())
        if (b.name == name) return b;
    return std::nullopt;
}

} // namespace grnsynth
