// SPDX-License-Identifier: Apache-2.0
#pragma once

// Robustness of a GRN population: the probability, under the mutation
// distribution, that a drawn network satisfies the property. Computed exactly
// by enumerating the quantized weight grid, or estimated by repeated sampling
// with either constraint evaluation or direct execution as the per-network
// check.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "grnsynth/constraints.hpp"
#include "grnsynth/logic.hpp"
#include "grnsynth/model.hpp"
#include "grnsynth/mutation.hpp"
#include "grnsynth/synth.hpp"

namespace grnsynth {

struct GrnPopulation {
    GrnSpace space;
    MutationDistribution dist;

    GrnPopulation(GrnSpace s, MutationDistribution d) : space(std::move(s)), dist(std::move(d))
    {
        if (!dist.matches(space)) throw StructuralError("mutation distribution does not cover the space's edges");
    }
};

/// Per-network satisfaction check: synthesized constraints or execution.
/// Copyable; each copy owns its scratch space.
class SatisfactionCheck {
public:
    static SatisfactionCheck from_constraints(const ConstraintSet& set)
    {
        return SatisfactionCheck{ConstraintEvaluator{set}};
    }

    static SatisfactionCheck by_execution(const GrnSpace& space, const LtlFormula& phi)
    {
        return SatisfactionCheck{ExecutionChecker{space, phi}};
    }

    [[nodiscard]] bool operator()(std::span<const Rational> w)
    {
        return std::visit([&](auto& impl) { return impl(w); }, impl_);
    }

    [[nodiscard]] bool is_execution() const noexcept { return std::holds_alternative<ExecutionChecker>(impl_); }

private:
    template <class Impl>
    explicit SatisfactionCheck(Impl impl) : impl_(std::move(impl))
    {
    }

    std::variant<ConstraintEvaluator, ExecutionChecker> impl_;
};

enum class RobustnessMethod { exact, sample_exec, sample_eval };

inline const char* to_string(RobustnessMethod m)
{
    switch (m) {
    case RobustnessMethod::exact: return "exact";
    case RobustnessMethod::sample_exec: return "sample-exec";
    case RobustnessMethod::sample_eval: return "sample-eval";
    }
    return "?";
}

struct RobustnessEstimate {
    RobustnessMethod method = RobustnessMethod::exact;
    double mean = 0;
    double variance = 0;
    double ci_lo = 0;
    double ci_hi = 0;
    std::uint64_t samples = 0;
    std::uint64_t repeats = 0;
    /// Exact value, set by the exact method only.
    std::optional<Rational> exact;
    double per_check_seconds = 0;
    double synthesis_seconds = 0;
    double total_seconds = 0;
};

/// Grid budget for exact enumeration; GRN_SYNTH_BUDGET overrides.
inline std::uint64_t default_exact_budget()
{
    if (const char* env = std::getenv("GRN_SYNTH_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return v;
    }
    return 10'000'000;
}

struct ExactOptions {
    std::uint64_t budget = default_exact_budget();
    unsigned workers = 1;
};

namespace detail {

/// Per-edge pmf as integer numerators over one common denominator.
struct ScaledPmf {
    std::vector<Integer> numerators;
    Integer denominator;
};

inline ScaledPmf scaled_pmf(int length, const Rational& beta)
{
    auto pmf = binomial_pmf(length, beta);
    ScaledPmf out;
    out.denominator = 1;
    for (const auto& p : pmf) mpz_lcm(out.denominator.get_mpz_t(), out.denominator.get_mpz_t(), p.get_den_mpz_t());
    for (const auto& p : pmf) out.numerators.push_back(Integer{p.get_num() * (out.denominator / p.get_den())});
    return out;
}

} // namespace detail

/// Sum of the genome pmf over every grid point the check accepts.
inline RobustnessEstimate robustness_exact(const GrnPopulation& pop, const SatisfactionCheck& check,
                                           const ExactOptions& options = {})
{
    const auto start = std::chrono::steady_clock::now();
    const auto grid = pop.space.grid_size();
    if (!grid || *grid > options.budget)
        throw BudgetError("quantized grid has " + (grid ? std::to_string(*grid) : std::string{"> 2^64"})
                          + " points, above the exact-enumeration budget of " + std::to_string(options.budget)
                          + "; use a sampling method");

    const std::size_t n = pop.space.edge_count();
    std::vector<detail::ScaledPmf> pmf;
    std::vector<std::vector<Rational>> values(n);
    Integer denominator = 1;
    for (std::size_t e = 0; e < n; ++e) {
        const auto& law = pop.dist.edge(e);
        pmf.push_back(detail::scaled_pmf(law.length, law.beta));
        denominator *= pmf.back().denominator;
        for (int k = 0; k <= law.length; ++k) values[e].push_back(weight_from_count(pop.space.edge(e).w_max, k, law.length));
    }

    // Enumerate count vectors as an odometer with the last edge fastest;
    // the first edge's digit is split across workers.
    auto sweep = [&](int first_digit, SatisfactionCheck local) -> Integer {
        Integer total = 0;
        if (n == 0) {
            if (local({})) total = 1;
            return total;
        }
        std::vector<int> k(n, 0);
        k[0] = first_digit;
        std::vector<Rational> w(n);
        for (std::size_t e = 0; e < n; ++e) w[e] = values[e][static_cast<std::size_t>(k[e])];
        std::vector<Integer> prefix(n);
        auto refresh = [&](std::size_t from) {
            for (std::size_t e = from; e < n; ++e) {
                const Integer& num = pmf[e].numerators[static_cast<std::size_t>(k[e])];
                prefix[e] = e == 0 ? num : Integer{prefix[e - 1] * num};
            }
        };
        refresh(0);
        for (;;) {
            if (local(w)) total += prefix[n - 1];
            std::size_t e = n;
            while (e-- > 1) {
                if (k[e] < pop.dist.edge(e).length) {
                    ++k[e];
                    w[e] = values[e][static_cast<std::size_t>(k[e])];
                    break;
                }
                k[e] = 0;
                w[e] = values[e][0];
            }
            if (e == 0) return total;
            refresh(e);
        }
    };

    Integer numerator = 0;
    const int first_len = n == 0 ? 0 : pop.dist.edge(0).length;
    const unsigned workers = std::max(1U, std::min<unsigned>(options.workers, static_cast<unsigned>(first_len + 1)));
    if (workers == 1) {
        for (int d = 0; d <= first_len; ++d) numerator += sweep(d, check);
    } else {
        std::vector<Integer> partial(static_cast<std::size_t>(first_len) + 1);
        std::atomic<int> next{0};
        {
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < workers; ++t)
                pool.emplace_back([&] {
                    for (int d = next++; d <= first_len; d = next++) partial[static_cast<std::size_t>(d)] = sweep(d, check);
                });
        }
        for (const auto& p : partial) numerator += p;
    }

    Rational value{numerator, denominator};
    value.canonicalize();

    RobustnessEstimate est;
    est.method = RobustnessMethod::exact;
    est.exact = value;
    est.mean = to_double(value);
    est.ci_lo = est.ci_hi = est.mean;
    est.samples = *grid;
    est.repeats = 1;
    est.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    est.per_check_seconds = *grid > 0 ? est.total_seconds / static_cast<double>(*grid) : 0;
    return est;
}

struct SamplingOptions {
    std::uint64_t samples = 10'000;
    std::uint64_t repeats = 100;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

/// The generator for repeat `r`; independent of how repeats are spread over
/// workers.
inline std::mt19937_64 repeat_stream(std::uint64_t seed, std::uint64_t repeat)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(repeat), static_cast<std::uint32_t>(repeat >> 32)};
    return std::mt19937_64{seq};
}

/// Mean and variance over `repeats` experiments of `samples` draws each; the
/// 95% interval is the normal approximation for the mean of the repeats.
inline RobustnessEstimate robustness_sampled(const GrnPopulation& pop, const SatisfactionCheck& check,
                                             const SamplingOptions& options)
{
    if (options.samples < 1 || options.repeats < 1) throw RangeError("samples and repeats must be >= 1");
    const auto start = std::chrono::steady_clock::now();

    std::vector<std::uint64_t> hits(options.repeats, 0);
    auto run_repeat = [&](std::uint64_t r, SatisfactionCheck& local, WeightSampler& sampler) {
        auto rng = repeat_stream(options.seed, r);
        std::uint64_t h = 0;
        for (std::uint64_t i = 0; i < options.samples; ++i)
            if (local(sampler(rng))) ++h;
        hits[r] = h;
    };

    const unsigned workers =
        static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(options.workers, options.repeats)));
    if (workers == 1) {
        SatisfactionCheck local = check;
        WeightSampler sampler{pop.space, pop.dist};
        for (std::uint64_t r = 0; r < options.repeats; ++r) run_repeat(r, local, sampler);
    } else {
        std::atomic<std::uint64_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < workers; ++t)
            pool.emplace_back([&] {
                SatisfactionCheck local = check;
                WeightSampler sampler{pop.space, pop.dist};
                for (std::uint64_t r = next++; r < options.repeats; r = next++) run_repeat(r, local, sampler);
            });
    }

    RobustnessEstimate est;
    est.method = check.is_execution() ? RobustnessMethod::sample_exec : RobustnessMethod::sample_eval;
    est.samples = options.samples;
    est.repeats = options.repeats;
    const double n = static_cast<double>(options.samples);
    const double reps = static_cast<double>(options.repeats);
    double sum = 0;
    for (auto h : hits) sum += static_cast<double>(h) / n;
    est.mean = sum / reps;
    double ss = 0;
    for (auto h : hits) {
        const double d = static_cast<double>(h) / n - est.mean;
        ss += d * d;
    }
    est.variance = options.repeats > 1 ? ss / (reps - 1) : 0.0;
    const double half = 1.96 * std::sqrt(est.variance / reps);
    est.ci_lo = std::max(0.0, est.mean - half);
    est.ci_hi = std::min(1.0, est.mean + half);
    est.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    est.per_check_seconds = est.total_seconds / (n * reps);
    return est;
}

struct BenchRow {
    RobustnessMethod method;
    std::uint64_t samples;
    double seconds;
};

struct BenchFit {
    double k_ex = 0;
    double k_ev = 0;
    double t_c = 0;
    /// Mean of the directly measured synthesis times.
    double t_c_measured = 0;
    [[nodiscard]] double ratio() const { return k_ev > 0 ? k_ex / k_ev : 0; }
};

/// Least squares: execution time through the origin (t = k_ex * p),
/// evaluation time with intercept (t = k_ev * p + t_c).
inline BenchFit fit_bench(std::span<const BenchRow> rows)
{
    BenchFit fit;
    double pp = 0, pt = 0;
    double n = 0, sp = 0, st = 0, spp = 0, spt = 0;
    for (const auto& r : rows) {
        const double p = static_cast<double>(r.samples);
        if (r.method == RobustnessMethod::sample_exec) {
            pp += p * p;
            pt += p * r.seconds;
        } else if (r.method == RobustnessMethod::sample_eval) {
            n += 1;
            sp += p;
            st += r.seconds;
            spp += p * p;
            spt += p * r.seconds;
        }
    }
    if (pp > 0) fit.k_ex = pt / pp;
    const double den = n * spp - sp * sp;
    if (n >= 2 && den != 0) {
        fit.k_ev = (n * spt - sp * st) / den;
        fit.t_c = (st - fit.k_ev * sp) / n;
    }
    return fit;
}

struct BenchReport {
    std::vector<BenchRow> rows;
    BenchFit fit;
};

/// Times both methods for every sample count. Evaluation rows include a
/// fresh constraint synthesis each time.
inline BenchReport bench_methods(const GrnPopulation& pop, const LtlFormula& phi, std::span<const std::uint64_t> grid,
                                 std::uint64_t seed)
{
    BenchReport report;
    const ParametrizedTs ts{pop.space};
    double synth_total = 0;
    for (std::uint64_t n : grid) {
        SamplingOptions opts;
        opts.samples = n;
        opts.repeats = 1;
        opts.seed = seed;

        auto t0 = std::chrono::steady_clock::now();
        (void)robustness_sampled(pop, SatisfactionCheck::by_execution(pop.space, phi), opts);
        auto t1 = std::chrono::steady_clock::now();
        report.rows.push_back({RobustnessMethod::sample_exec, n, std::chrono::duration<double>(t1 - t0).count()});

        t0 = std::chrono::steady_clock::now();
        auto synth = gencons(ts, phi);
        auto ts_done = std::chrono::steady_clock::now();
        (void)robustness_sampled(pop, SatisfactionCheck::from_constraints(synth.constraints), opts);
        t1 = std::chrono::steady_clock::now();
        synth_total += std::chrono::duration<double>(ts_done - t0).count();
        report.rows.push_back({RobustnessMethod::sample_eval, n, std::chrono::duration<double>(t1 - t0).count()});
    }
    report.fit = fit_bench(report.rows);
    if (!grid.empty()) report.fit.t_c_measured = synth_total / static_cast<double>(grid.size());
    return report;
}

} // namespace grnsynth
