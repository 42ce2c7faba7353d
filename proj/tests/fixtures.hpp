#pragma once

#include <map>
#include <string>
#include <vector>

#include "grnsynth/grnsynth.hpp"

namespace fixture {

using namespace grnsynth;

// Weight function from "w_<from>_<to>" = "p/q" pairs; unlisted edges get w_max.
inline WeightFunction weights(const GrnSpace& space, const std::map<std::string, std::string>& values)
{
    std::vector<Rational> w;
    for (std::size_t e = 0; e < space.edge_count(); ++e) {
        auto it = values.find(space.variable_name(e));
        w.push_back(it == values.end() ? space.edge(e).w_max : parse_rational(it->second));
    }
    return WeightFunction{space, std::move(w)};
}

// The two-gene switch at its bistable point.
inline WeightFunction bistable_point(const GrnSpace& s, const std::string& i_b = "2/3")
{
    return weights(s, {{"w_IN_A", "2/3"}, {"w_IN_B", i_b}, {"w_A_A", "3/10"}, {"w_B_B", "3/10"},
                       {"w_A_B", "3/10"}, {"w_B_A", "3/10"}});
}

// One gene with a single input edge IN -> A.
inline GrnSpace one_edge(const Rational& threshold, const Rational& w_max, int length)
{
    return GrnSpace{{"IN", Rational{-1}}, {{"A", threshold}}, {{"IN", "A", EdgeSign::activate, w_max, length}}};
}

} // namespace fixture
