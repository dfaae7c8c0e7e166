#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rshlab/cancel.hpp"
#include "rshlab/chain.hpp"
#include "rshlab/convergence.hpp"
#include "rshlab/hitting.hpp"
#include "rshlab/rate.hpp"

namespace rshlab {

/// Everything the exact machinery says about one (algorithm, problem) pair.
struct AnalysisReport {
    double rho = 0.0;
    double spectral_gap = 0.0;
    bool convergent = false;
    bool reachability_convergent = false;
    std::optional<std::size_t> witness_k;
    std::vector<std::size_t> stuck_states;
    std::vector<std::size_t> non_index;
    /// Indexed like non_index; empty when not requested or the chain is not convergent.
    std::vector<double> hitting_times;
    std::vector<double> staying_times;
    /// q0 . h for the requested initial distribution.
    std::optional<double> mean_hitting_time;
    std::string init = "20";
    std::vector<RateBounds> rate_series;

    const RateBounds *rate_bounds() const { return rate_series.empty() ? nullptr : &rate_series.back(); }
};

struct AnalysisOptions {
    bool hitting = false;
    std::size_t rate_horizon = 1000;
    SpectralOptions spectral;
};

/// Horizons 1, 2, 5, 10, 20, 50, ... below `horizon`, plus `horizon` itself.
inline std::vector<std::size_t> rate_grid(std::size_t horizon) {
    std::vector<std::size_t> grid;
    for (std::size_t decade = 1; decade <= horizon; decade *= 10) {
        for (std::size_t m : {1, 2, 5}) {
            const std::size_t t = decade * m;
            if (t < horizon)
                grid.push_back(t);
        }
        if (decade > horizon / 10)
            break;
    }
    grid.push_back(horizon);
    return grid;
}

inline AnalysisReport analyze(const TransitionKernel &kernel, const StateSpace &space, const Distribution &q0,
                              const AnalysisOptions &opt) {
    const AbsorbingChain chain = build_chain(kernel, space);
    AnalysisReport rep;
    const auto spectral = check_convergence_spectral(chain, opt.spectral);
    const auto reach = check_convergence_reachability(kernel, space);
    rep.rho = spectral.spectral_radius.value_or(0.0);
    rep.spectral_gap = spectral.spectral_gap.value_or(0.0);
    rep.convergent = spectral.convergent;
    rep.reachability_convergent = reach.convergent;
    rep.witness_k = reach.witness_k;
    rep.stuck_states = reach.stuck_states;
    rep.non_index = chain.non_index();
    if (opt.hitting && rep.convergent) {
        const auto times = hitting_times(chain);
        rep.hitting_times.assign(times.h.data(), times.h.data() + times.h.size());
        rep.staying_times.assign(times.staying.data(), times.staying.data() + times.staying.size());
        rep.mean_hitting_time = expected_hitting_time(times, q0);
    }
    if (opt.rate_horizon > 0 && nonopt_probability(q0) > 0.0)
        rep.rate_series = rate_bounds_series(chain, q0, rate_grid(opt.rate_horizon), opt.spectral.cancel);
    return rep;
}

} // namespace rshlab
