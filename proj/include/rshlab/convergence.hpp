#pragma once

#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

#include "rshlab/chain.hpp"
#include "rshlab/spectral.hpp"

namespace rshlab {

enum class VerdictMethod { spectral, reachability };

inline std::string_view to_string(VerdictMethod m) {
    return m == VerdictMethod::spectral ? "spectral" : "reachability";
}

struct ConvergenceVerdict {
    bool convergent = false;
    VerdictMethod method = VerdictMethod::spectral;
    std::optional<double> spectral_radius;
    std::optional<double> spectral_gap;
    /// Longest shortest path (in steps) from a non-optimal state to the optimal set.
    std::optional<std::size_t> witness_k;
    /// Original indices of states that can never leave the non-optimal set.
    std::vector<std::size_t> stuck_states;
};

/// Convergent iff rho(Q) < 1. The decision is taken on the gap 1 - rho(Q), which is
/// computed directly from the M-matrix I - Q and is positive exactly when every
/// elimination pivot is; this stays reliable when rho(Q) rounds to 1.
inline ConvergenceVerdict check_convergence_spectral(const AbsorbingChain &chain,
                                                     const SpectralOptions &opt = {}) {
    const SpectralInfo info = analyze_spectrum(chain, opt);
    ConvergenceVerdict v;
    v.method = VerdictMethod::spectral;
    v.spectral_radius = info.rho;
    v.spectral_gap = info.gap;
    v.convergent = info.gap_lower > 0.0;
    if (!v.convergent)
        v.stuck_states = info.dominant_block;
    return v;
}

/// Convergent iff every non-optimal state has a positive-probability path into the
/// optimal set. Reverse breadth-first search from the optimal states.
inline ConvergenceVerdict check_convergence_reachability(const TransitionKernel &kernel,
                                                         const StateSpace &space) {
    if (kernel.size() != space.size())
        throw DimensionMismatch("kernel vs state space", space.size(), kernel.size());
    const std::size_t n = space.size();
    std::vector<std::vector<std::size_t>> reverse(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (space.optimal(i))
            continue;
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && kernel(i, j) > 0.0)
                reverse[j].push_back(i);
    }

    constexpr auto unreached = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> depth(n, unreached);
    std::deque<std::size_t> frontier;
    for (std::size_t i = 0; i < n; ++i)
        if (space.optimal(i)) {
            depth[i] = 0;
            frontier.push_back(i);
        }
    while (!frontier.empty()) {
        const std::size_t v = frontier.front();
        frontier.pop_front();
        for (std::size_t u : reverse[v])
            if (depth[u] == unreached) {
                depth[u] = depth[v] + 1;
                frontier.push_back(u);
            }
    }

    ConvergenceVerdict v;
    v.method = VerdictMethod::reachability;
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (depth[i] == unreached)
            v.stuck_states.push_back(i);
        else
            k = std::max(k, depth[i]);
    }
    v.convergent = v.stuck_states.empty();
    v.witness_k = k;
    return v;
}

} // namespace rshlab
