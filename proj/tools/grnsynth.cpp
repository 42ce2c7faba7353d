// grnsynth: constraint synthesis and mutational robustness for Boolean GRNs.
//
//   grnsynth synth      MODEL --ltl F [--out FILE]
//   grnsynth verify     MODEL --ltl F --weights FILE [--constraints FILE]
//   grnsynth robustness MODEL (--ltl F | --constraints FILE) [--beta B | --p P | --mutation FILE] ...
//   grnsynth bench      MODEL --ltl F --samples-grid N,N,... [--seed S]
//   grnsynth catalog    [NAME]
//
// MODEL is a GRN-space JSON file or @name for a built-in benchmark. A
// "property" field in the model (built-ins have one) is used when --ltl is
// omitted.
//
// Exit status: 0 success (or property true), 1 property false, 2 usage or
// input error, 3 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include "CLI11.hpp"

#include "grnsynth/grnsynth.hpp"

using namespace grnsynth;

namespace {

struct UsageError : Error {
    using Error::Error;
};

struct Model {
    GrnSpace space;
    std::optional<std::string> property;
};

Model load_model(const std::string& arg)
{
    if (!arg.empty() && arg[0] == '@') {
        auto b = find_benchmark(arg.substr(1));
        if (!b) throw UsageError("unknown benchmark '" + arg.substr(1) + "' (see `grnsynth catalog`)");
        return {b->space, b->property};
    }
    json j = read_json_file(arg);
    std::optional<std::string> property;
    if (j.contains("property")) property = j.at("property").get<std::string>();
    return {space_from_json(j), property};
}

std::string read_text(const std::string& path)
{
    std::ifstream in{path};
    if (!in) throw UsageError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

LtlFormula load_property(const Model& m, const std::string& text, const std::string& file)
{
    std::string src = !text.empty() ? text : !file.empty() ? read_text(file) : m.property.value_or("");
    if (src.empty()) throw UsageError("no property: pass --ltl or --ltl-file");
    auto phi = parse_ltl(src);
    if (phi.uses_next()) std::cerr << "warning: property uses the next operator X, an extension of the core logic\n";
    (void)BoundFormula(phi, m.space);
    return phi;
}

std::string decimal(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string both(const Rational& q) { return to_string(q) + " (" + decimal(to_double(q)) + ")"; }

void write_json(const json& j, const std::string& out)
{
    if (out.empty() || out == "-") {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream f{out};
    if (!f) throw UsageError("cannot write '" + out + "'");
    f << j.dump(2) << '\n';
}

MutationConfig mutation_config(const std::string& beta, const std::string& p, const std::string& file)
{
    const int given = !beta.empty() + !p.empty() + !file.empty();
    if (given > 1) throw UsageError("use only one of --beta, --p, --mutation");
    MutationConfig cfg;
    if (!beta.empty()) cfg.source = MutationConfig::Beta{parse_rational(beta)};
    if (!p.empty()) cfg.source = MutationConfig::Probability{parse_rational(p)};
    if (!file.empty()) cfg = mutation_config_from_json(read_json_file(file));
    (void)cfg.beta();
    return cfg;
}

unsigned resolve_workers(unsigned w) { return w == 0 ? std::max(1U, std::thread::hardware_concurrency()) : w; }

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Synthesize weight constraints for Boolean gene-regulatory networks and compute mutational robustness"};
    app.require_subcommand(1);

    std::string model_arg, ltl, ltl_file, out, weights_file, constraints_file;
    std::string beta, p, mutation_file, method = "sample-eval";
    std::uint64_t samples = 10'000, repeats = 100, seed = 1;
    unsigned workers = 1;
    bool no_simplify = false;
    std::vector<std::uint64_t> samples_grid{1000, 2000, 5000, 10000};
    std::string catalog_name;

    auto add_model = [&](CLI::App* c) {
        c->add_option("model", model_arg, "GRN-space JSON file or @benchmark")->required();
    };
    auto add_ltl = [&](CLI::App* c) {
        c->add_option("--ltl", ltl, "LTL property");
        c->add_option("--ltl-file", ltl_file, "file containing the LTL property");
    };

    auto* synth = app.add_subcommand("synth", "synthesize constraints under which the property holds");
    add_model(synth);
    add_ltl(synth);
    synth->add_option("--out", out, "constraint JSON output (default stdout)");
    synth->add_flag("--no-simplify", no_simplify, "keep duplicate and subsumed clauses");
    synth->add_option("--workers", workers, "parallel searches (0 = all cores)");

    auto* verify = app.add_subcommand("verify", "check one network, by execution or against constraints");
    add_model(verify);
    add_ltl(verify);
    verify->add_option("--weights", weights_file, "weights JSON {\"w_<from>_<to>\": \"p/q\"}")->required();
    verify->add_option("--constraints", constraints_file, "evaluate these constraints instead of executing");

    auto* rob = app.add_subcommand("robustness", "probability that a mutated network keeps the property");
    add_model(rob);
    add_ltl(rob);
    rob->add_option("--constraints", constraints_file, "use these constraints instead of synthesizing");
    rob->add_option("--beta", beta, "stationary mutated fraction per nucleotide (default 3/4)");
    rob->add_option("--p", p, "per-nucleotide mutation probability; beta is derived");
    rob->add_option("--mutation", mutation_file, "mutation config JSON {\"p\": ...} or {\"beta\": ...}");
    rob->add_option("--method", method, "exact | sample-exec | sample-eval")
        ->check(CLI::IsMember({"exact", "sample-exec", "sample-eval"}));
    rob->add_option("--samples", samples, "samples per experiment");
    rob->add_option("--repeats", repeats, "number of experiments");
    rob->add_option("--seed", seed, "random seed");
    rob->add_option("--workers", workers, "worker threads (0 = all cores)");
    rob->add_option("--out", out, "report JSON output (default stdout)");

    auto* bench = app.add_subcommand("bench", "time execution against evaluation over a grid of sample counts");
    add_model(bench);
    add_ltl(bench);
    bench->add_option("--samples-grid", samples_grid, "sample counts")->delimiter(',');
    bench->add_option("--beta", beta, "stationary mutated fraction per nucleotide (default 3/4)");
    bench->add_option("--p", p, "per-nucleotide mutation probability");
    bench->add_option("--mutation", mutation_file, "mutation config JSON");
    bench->add_option("--seed", seed, "random seed");

    auto* catalog = app.add_subcommand("catalog", "list built-in benchmarks, or print one as JSON");
    catalog->add_option("name", catalog_name, "benchmark name");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*catalog) {
            if (catalog_name.empty()) {
                for (const auto& b : benchmark_catalog())
                    std::cout << b.name << "\t" << b.space.gene_count() - 1 << " genes, " << b.space.edge_count()
                              << " edges\t" << b.description << "\n\t" << b.property << "\n";
                return 0;
            }
            auto b = find_benchmark(catalog_name);
            if (!b) throw UsageError("unknown benchmark '" + catalog_name + "'");
            json j = space_to_json(b->space);
            j["property"] = b->property;
            std::cout << j.dump(2) << '\n';
            return 0;
        }

        Model model = load_model(model_arg);
        const GrnSpace& space = model.space;

        if (*synth) {
            auto phi = load_property(model, ltl, ltl_file);
            auto r = gencons(space, phi, {.simplify = !no_simplify, .workers = resolve_workers(workers)});
            write_json(constraints_to_json(r.constraints, space), out);
            std::cerr << r.constraints.size() << " clauses, " << r.constraints.atom_count() << " atoms, "
                      << r.stats.counterexamples << " counterexamples, " << r.stats.nodes << " nodes, "
                      << decimal(r.stats.seconds) << " s\n";
            return 0;
        }

        if (*verify) {
            auto w = weights_from_json(read_json_file(weights_file), space);
            if (!on_quantized_grid(w, space))
                std::cerr << "warning: weights are not on the quantized mutation grid\n";
            bool holds;
            if (!constraints_file.empty()) {
                holds = eval_set(constraints_from_json(read_json_file(constraints_file), space), w.values());
            } else {
                holds = verify_by_execution(space, w, load_property(model, ltl, ltl_file));
            }
            std::cout << (holds ? "true" : "false") << '\n';
            return holds ? 0 : 1;
        }

        if (*rob) {
            auto cfg = mutation_config(beta, p, mutation_file);
            GrnPopulation pop{space, MutationDistribution::from_config(space, cfg)};
            std::optional<LtlFormula> phi;
            ConstraintSet constraints;
            double synth_seconds = 0;
            const bool need_constraints = method != "sample-exec";
            if (!constraints_file.empty()) {
                constraints = constraints_from_json(read_json_file(constraints_file), space);
                if (!need_constraints) throw UsageError("sample-exec executes the property; pass --ltl, not --constraints");
            } else {
                phi = load_property(model, ltl, ltl_file);
                if (need_constraints) {
                    auto r = gencons(space, *phi);
                    constraints = std::move(r.constraints);
                    synth_seconds = r.stats.seconds;
                }
            }
            auto check = need_constraints ? SatisfactionCheck::from_constraints(constraints)
                                          : SatisfactionCheck::by_execution(pop.space, *phi);
            RobustnessEstimate est;
            if (method == "exact") {
                est = robustness_exact(pop, check, {.budget = default_exact_budget(), .workers = resolve_workers(workers)});
            } else {
                est = robustness_sampled(pop, check,
                                         {.samples = samples, .repeats = repeats, .seed = seed, .workers = resolve_workers(workers)});
            }
            est.synthesis_seconds = synth_seconds;
            json j = report_to_json(est);
            j["beta"] = to_string(cfg.beta());
            write_json(j, out);
            std::cerr << "beta " << both(cfg.beta()) << ", robustness ";
            if (est.exact)
                std::cerr << both(*est.exact) << '\n';
            else
                std::cerr << decimal(est.mean) << ", 95% CI [" << decimal(est.ci_lo) << ", " << decimal(est.ci_hi) << "]\n";
            return 0;
        }

        if (*bench) {
            auto phi = load_property(model, ltl, ltl_file);
            auto cfg = mutation_config(beta, p, mutation_file);
            GrnPopulation pop{space, MutationDistribution::from_config(space, cfg)};
            auto rep = bench_methods(pop, phi, samples_grid, seed);
            std::cout << "method,samples,seconds\n";
            for (const auto& r : rep.rows) std::cout << to_string(r.method) << ',' << r.samples << ',' << decimal(r.seconds) << '\n';
            const auto& f = rep.fit;
            std::cerr << "k_ex " << decimal(f.k_ex) << " s, k_ev " << decimal(f.k_ev) << " s, t_c " << decimal(f.t_c)
                      << " s (measured " << decimal(f.t_c_measured) << " s), k_ex/k_ev " << decimal(f.ratio()) << '\n';
            return 0;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const BindingError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const StructuralError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const RangeError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
