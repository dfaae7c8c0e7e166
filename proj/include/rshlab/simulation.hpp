#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "rshlab/errors.hpp"
#include "rshlab/heuristics.hpp"
#include "rshlab/random.hpp"

namespace rshlab {

/// Initial state of every run: a fixed state, or uniform over the whole domain.
struct InitSpec {
    std::optional<std::size_t> state;

    static InitSpec uniform() { return {}; }
    static InitSpec at(std::size_t s) { return {s}; }
    bool is_uniform() const { return !state.has_value(); }
};

struct SimConfig {
    std::uint64_t runs = 100'000;
    std::uint64_t max_iterations = 1'000'000;
    std::uint64_t seed = 0;
    InitSpec init = InitSpec::at(20);
    std::uint64_t record_stride = 1;

    void validate() const {
        if (runs < 1)
            throw InputError("runs must be at least 1");
        if (max_iterations < 1)
            throw InputError("max_iterations must be at least 1");
        if (record_stride < 1)
            throw InputError("record_stride must be at least 1");
    }
};

/// Which heuristic to run and on what.
struct WalkSpec {
    Algorithm algorithm = Algorithm::rsh1;
    ProblemSpec problem;
    WalkParams params;
};

struct RunStats {
    std::uint64_t runs = 0;
    std::uint64_t max_iterations = 0;
    std::uint64_t record_stride = 1;
    /// First hitting iteration per run; nullopt when censored at max_iterations.
    std::vector<std::optional<std::uint64_t>> hitting_times;
    /// Recorded iterations 0, stride, 2 stride, ... <= max_iterations.
    std::vector<std::uint64_t> recorded_t;
    std::vector<std::uint64_t> opt_counts;
    std::vector<std::uint64_t> nonopt_counts;
    std::uint64_t censored_count = 0;
};

namespace detail {

struct Walker {
    const std::vector<double> &fitness;
    const std::vector<bool> &optimal;
    double step_prob;
    double accept_worse;

    /// One trajectory of the walk with (elitist or non-elitist) selection. Iterations
    /// without a proposal are skipped in one geometric draw: each iteration proposes
    /// x-1 with probability p and x+1 with probability p, a proposal off the domain
    /// leaves the walker in place.
    std::optional<std::uint64_t> run(SplitMix64 &rng, std::size_t start, std::uint64_t max_iter) const {
        std::size_t x = start;
        if (optimal[x])
            return 0;
        const std::size_t n = fitness.size();
        const double proposal_prob = std::min(1.0, 2.0 * step_prob);
        std::uint64_t t = 0;
        for (;;) {
            const std::uint64_t wait = geometric_trials(rng, proposal_prob);
            if (wait > max_iter - t)
                return std::nullopt;
            t += wait;
            const bool left = (rng() >> 63) != 0;
            if (left ? x == 0 : x + 1 >= n)
                continue;
            const std::size_t y = left ? x - 1 : x + 1;
            bool accept = fitness[y] > fitness[x];
            if (!accept && accept_worse > 0.0)
                accept = uniform01(rng) < accept_worse;
            if (!accept)
                continue;
            x = y;
            if (optimal[x])
                return t;
        }
    }
};

} // namespace detail

/// Resolves a worker count: 0 means hardware concurrency.
inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0)
        return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Builds per-t tallies from per-run hitting times.
inline void tally(RunStats &stats) {
    const std::uint64_t stride = stats.record_stride;
    const std::uint64_t slots = stats.max_iterations / stride + 1;
    // survive[k]: number of runs still non-optimal at recorded index k
    std::vector<std::uint64_t> leave_at(slots + 1, 0);
    stats.censored_count = 0;
    for (const auto &tau : stats.hitting_times) {
        std::uint64_t first_absorbed_slot;
        if (!tau) {
            ++stats.censored_count;
            first_absorbed_slot = slots;
        } else {
            first_absorbed_slot = std::min<std::uint64_t>((*tau + stride - 1) / stride, slots);
        }
        ++leave_at[first_absorbed_slot];
    }
    stats.recorded_t.resize(slots);
    stats.nonopt_counts.resize(slots);
    stats.opt_counts.resize(slots);
    std::uint64_t absorbed = 0;
    for (std::uint64_t k = 0; k < slots; ++k) {
        absorbed += leave_at[k];
        stats.recorded_t[k] = k * stride;
        stats.opt_counts[k] = absorbed;
        stats.nonopt_counts[k] = stats.runs - absorbed;
    }
}

/// k independent trajectories. Run i draws from SplitMix64::stream(seed, i), so the result
/// does not depend on the number of worker threads.
inline RunStats simulate(const WalkSpec &spec, const SimConfig &config, unsigned threads = 0) {
    config.validate();
    spec.params.validate();
    const StateSpace space = spec.problem.state_space();
    const std::size_t n = space.size();
    if (config.init.state && *config.init.state >= n)
        throw InputError("initial state " + std::to_string(*config.init.state) +
                         " outside domain of size " + std::to_string(n));

    const double worse = spec.algorithm == Algorithm::rsh1 ? 0.0 : spec.params.accept_worse_prob;
    const detail::Walker walker{space.fitness(), space.optimal_mask(), spec.params.step_prob, worse};

    RunStats stats;
    stats.runs = config.runs;
    stats.max_iterations = config.max_iterations;
    stats.record_stride = config.record_stride;
    stats.hitting_times.resize(config.runs);

    auto work = [&](std::uint64_t begin, std::uint64_t end) {
        for (std::uint64_t i = begin; i < end; ++i) {
            SplitMix64 rng = SplitMix64::stream(config.seed, i);
            const std::size_t start = config.init.state ? *config.init.state
                                                        : static_cast<std::size_t>(uniform_below(rng, n));
            stats.hitting_times[i] = walker.run(rng, start, config.max_iterations);
        }
    };

    const std::uint64_t workers = std::min<std::uint64_t>(resolve_threads(threads), config.runs);
    if (workers <= 1) {
        work(0, config.runs);
    } else {
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (config.runs + workers - 1) / workers;
        for (std::uint64_t w = 0; w < workers; ++w) {
            const std::uint64_t b = w * chunk, e = std::min(config.runs, b + chunk);
            if (b < e)
                pool.emplace_back(work, b, e);
        }
        for (auto &th : pool)
            th.join();
    }
    tally(stats);
    return stats;
}

/// n(Phi_t in S_opt) / k per recorded t.
inline std::vector<std::pair<std::uint64_t, double>> empirical_convergence_curve(const RunStats &stats) {
    std::vector<std::pair<std::uint64_t, double>> out;
    out.reserve(stats.recorded_t.size());
    for (std::size_t k = 0; k < stats.recorded_t.size(); ++k)
        out.emplace_back(stats.recorded_t[k],
                         static_cast<double>(stats.opt_counts[k]) / static_cast<double>(stats.runs));
    return out;
}

/// Surviving relative frequency at or below which the empirical rate is not reported.
inline constexpr double kRateCutoff = 1e-5;

/// -(1/t) ln(n_t / n_0) per recorded t >= 1, where n_t counts non-optimal runs. With every
/// run starting non-optimal this is the usual -(1/t) ln(n_t / k). Absent when n_t / k <= 1e-5.
inline std::vector<std::pair<std::uint64_t, std::optional<double>>> empirical_average_rate(const RunStats &stats) {
    std::vector<std::pair<std::uint64_t, std::optional<double>>> out;
    if (stats.recorded_t.empty())
        return out;
    const double k = static_cast<double>(stats.runs);
    const double n0 = static_cast<double>(stats.nonopt_counts.front());
    for (std::size_t i = 0; i < stats.recorded_t.size(); ++i) {
        const auto t = stats.recorded_t[i];
        if (t == 0)
            continue;
        const double nt = static_cast<double>(stats.nonopt_counts[i]);
        if (n0 == 0.0 || nt / k <= kRateCutoff)
            out.emplace_back(t, std::nullopt);
        else
            out.emplace_back(t, -std::log(nt / n0) / static_cast<double>(t));
    }
    return out;
}

struct HittingEstimate {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t censored = 0;
    std::uint64_t uncensored = 0;
    /// Every run was censored; mean and stderr are undefined.
    bool all_censored = false;
    /// Some runs were censored, so the mean underestimates the hitting time.
    bool lower_bound_only = false;
};

/// Mean and standard error of the uncensored first hitting times.
inline HittingEstimate empirical_hitting_time(const RunStats &stats) {
    HittingEstimate e;
    double sum = 0.0;
    for (const auto &tau : stats.hitting_times) {
        if (!tau) {
            ++e.censored;
            continue;
        }
        ++e.uncensored;
        sum += static_cast<double>(*tau);
    }
    if (e.uncensored == 0) {
        e.all_censored = true;
        return e;
    }
    e.mean = sum / static_cast<double>(e.uncensored);
    double ss = 0.0;
    for (const auto &tau : stats.hitting_times)
        if (tau) {
            const double dlt = static_cast<double>(*tau) - e.mean;
            ss += dlt * dlt;
        }
    e.std_error = e.uncensored > 1
                   ? std::sqrt(ss / static_cast<double>(e.uncensored - 1) / static_cast<double>(e.uncensored))
                   : 0.0;
    e.lower_bound_only = e.censored > 0;
    return e;
}

} // namespace rshlab
