// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON encodings of spaces, weight functions, constraint sets, mutation
// configurations and robustness reports. Rationals are written as "p/q" or
// integer strings; plain JSON numbers are accepted on input.

#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "grnsynth/constraints.hpp"
#include "grnsynth/model.hpp"
#include "grnsynth/mutation.hpp"
#include "grnsynth/rational.hpp"
#include "grnsynth/robustness.hpp"

namespace grnsynth {

using json = nlohmann::json;

namespace detail {

inline Rational rational_field(const json& j, const char* what)
{
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational{j.get<long>()};
    if (j.is_number_float()) {
        // Decimal text of the number, so 0.3 reads as 3/10.
        return parse_rational(j.dump());
    }
    throw StructuralError(std::string{"expected a rational for '"} + what + "'");
}

inline const json& required(const json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key)) throw StructuralError(std::string{"missing field '"} + key + "'");
    return j.at(key);
}

} // namespace detail

inline GrnSpace space_from_json(const json& j)
{
    const json& in = detail::required(j, "input_gene");
    GeneSpec input{detail::required(in, "name").get<std::string>(), detail::rational_field(detail::required(in, "threshold"), "threshold")};

    std::vector<GeneSpec> genes;
    for (const auto& g : detail::required(j, "genes"))
        genes.push_back({detail::required(g, "name").get<std::string>(),
                         detail::rational_field(detail::required(g, "threshold"), "threshold")});

    std::vector<EdgeSpec> edges;
    for (const auto& e : detail::required(j, "edges")) {
        EdgeSpec s;
        s.from = detail::required(e, "from").get<std::string>();
        s.to = detail::required(e, "to").get<std::string>();
        const auto sign = detail::required(e, "sign").get<std::string>();
        if (sign == "activate")
            s.sign = EdgeSign::activate;
        else if (sign == "repress")
            s.sign = EdgeSign::repress;
        else
            throw StructuralError("edge sign must be 'activate' or 'repress', got '" + sign + "'");
        s.w_max = detail::rational_field(detail::required(e, "w_max"), "w_max");
        s.length = detail::required(e, "length").get<int>();
        edges.push_back(std::move(s));
    }
    return GrnSpace{std::move(input), std::move(genes), std::move(edges)};
}

inline json space_to_json(const GrnSpace& space)
{
    json j;
    j["input_gene"] = {{"name", space.gene_name(GrnSpace::input)}, {"threshold", to_string(space.threshold(GrnSpace::input))}};
    j["genes"] = json::array();
    for (std::size_t g = 1; g < space.gene_count(); ++g)
        j["genes"].push_back({{"name", space.gene_name(g)}, {"threshold", to_string(space.threshold(g))}});
    j["edges"] = json::array();
    for (const auto& e : space.edges())
        j["edges"].push_back({{"from", space.gene_name(e.from)},
                              {"to", space.gene_name(e.to)},
                              {"sign", to_string(e.sign)},
                              {"w_max", to_string(e.w_max)},
                              {"length", e.length}});
    return j;
}

/// Flat object {"w_<from>_<to>": "p/q", ...}; every edge must be present.
inline WeightFunction weights_from_json(const json& j, const GrnSpace& space)
{
    if (!j.is_object()) throw StructuralError("weights must be a JSON object");
    std::vector<Rational> w(space.edge_count());
    std::vector<char> seen(space.edge_count(), 0);
    for (const auto& [key, value] : j.items()) {
        auto e = space.find_variable(key);
        if (!e) throw BindingError("unknown weight variable '" + key + "'");
        w[*e] = detail::rational_field(value, key.c_str());
        seen[*e] = 1;
    }
    for (std::size_t e = 0; e < seen.size(); ++e)
        if (!seen[e]) throw StructuralError("missing weight for '" + space.variable_name(e) + "'");
    return WeightFunction{space, std::move(w)};
}

inline json weights_to_json(const WeightFunction& w, const GrnSpace& space)
{
    json j = json::object();
    for (std::size_t e = 0; e < w.size(); ++e) j[space.variable_name(e)] = to_string(w[e]);
    return j;
}

/// Whether every weight lies on its edge's quantized grid w_max * (1 - k/l).
inline bool on_quantized_grid(const WeightFunction& w, const GrnSpace& space)
{
    for (std::size_t e = 0; e < w.size(); ++e) {
        const Edge& ed = space.edge(e);
        bool hit = false;
        for (int k = 0; k <= ed.length && !hit; ++k) hit = weight_from_count(ed.w_max, k, ed.length) == w[e];
        if (!hit) return false;
    }
    return true;
}

inline json atom_to_json(const LinearAtom& a, const GrnSpace& space)
{
    json coeffs = json::object();
    for (const auto& [v, k] : a.terms()) coeffs[space.variable_name(v)] = to_string(k);
    return {{"coeffs", coeffs}, {"const", to_string(a.constant())}, {"strict", a.strict()}};
}

inline LinearAtom atom_from_json(const json& j, const GrnSpace& space)
{
    std::vector<LinearAtom::Term> terms;
    for (const auto& [name, k] : detail::required(j, "coeffs").items()) {
        auto e = space.find_variable(name);
        if (!e) throw BindingError("unknown constraint variable '" + name + "'");
        terms.emplace_back(*e, detail::rational_field(k, name.c_str()));
    }
    return LinearAtom{std::move(terms), detail::rational_field(detail::required(j, "const"), "const"),
                      detail::required(j, "strict").get<bool>()};
}

inline json constraints_to_json(const ConstraintSet& set, const GrnSpace& space)
{
    json clauses = json::array();
    for (const auto& clause : set.clauses()) {
        json c = json::array();
        for (const auto& a : clause) c.push_back(atom_to_json(a, space));
        clauses.push_back(std::move(c));
    }
    return {{"clauses", clauses}};
}

inline ConstraintSet constraints_from_json(const json& j, const GrnSpace& space)
{
    ConstraintSet set;
    for (const auto& c : detail::required(j, "clauses")) {
        Clause clause;
        for (const auto& a : c) clause.push_back(atom_from_json(a, space));
        set.add_clause(std::move(clause));
    }
    return set;
}

/// {"p": "1/100"} or {"beta": "3/4"}.
inline MutationConfig mutation_config_from_json(const json& j)
{
    const bool has_p = j.is_object() && j.contains("p");
    const bool has_beta = j.is_object() && j.contains("beta");
    if (has_p == has_beta) throw StructuralError("mutation config needs exactly one of 'p' or 'beta'");
    MutationConfig cfg;
    if (has_p)
        cfg.source = MutationConfig::Probability{detail::rational_field(j.at("p"), "p")};
    else
        cfg.source = MutationConfig::Beta{detail::rational_field(j.at("beta"), "beta")};
    (void)cfg.beta();
    return cfg;
}

inline json report_to_json(const RobustnessEstimate& est)
{
    json j;
    j["method"] = to_string(est.method);
    j["mean"] = est.mean;
    j["variance"] = est.variance;
    j["ci95"] = {est.ci_lo, est.ci_hi};
    j["samples"] = est.samples;
    j["repeats"] = est.repeats;
    if (est.exact) j["exact"] = to_string(*est.exact);
    if (est.method == RobustnessMethod::sample_exec)
        j["k_ex_sec"] = est.per_check_seconds;
    else if (est.method == RobustnessMethod::sample_eval)
        j["k_ev_sec"] = est.per_check_seconds;
    j["t_c_sec"] = est.synthesis_seconds;
    j["total_sec"] = est.total_seconds;
    return j;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in{path};
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what(), e.byte);
    }
}

} // namespace grnsynth
