#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "rshlab/chain.hpp"
#include "rshlab/errors.hpp"

namespace rshlab {

/// Maximisation problem over the integer domain {0, ..., n-1}.
struct ProblemSpec {
    std::size_t domain_size = 0;
    std::vector<double> fitness_values;

    void validate() const {
        if (domain_size < 2)
            throw InputError("domain_size must be at least 2");
        if (fitness_values.size() != domain_size)
            throw InputError("fitness has " + std::to_string(fitness_values.size()) +
                             " values but domain_size is " + std::to_string(domain_size));
        for (std::size_t i = 0; i < fitness_values.size(); ++i)
            if (!std::isfinite(fitness_values[i]))
                throw InputError("fitness[" + std::to_string(i) + "] is not finite");
    }

    StateSpace state_space(std::size_t cap = kDefaultStateCap) const {
        validate();
        return StateSpace(fitness_values, cap);
    }
};

inline constexpr std::size_t kDefaultDomainSize = 101;

/// Built-in fitness tables: "square" = x^2, "square10" = 10 x^2, "shifted_square" = (x-49)^2.
inline ProblemSpec builtin_problem(std::string_view name, std::size_t domain_size = kDefaultDomainSize) {
    ProblemSpec p{domain_size, std::vector<double>(domain_size)};
    for (std::size_t i = 0; i < domain_size; ++i) {
        const double x = static_cast<double>(i);
        if (name == "square")
            p.fitness_values[i] = x * x;
        else if (name == "square10")
            p.fitness_values[i] = 10.0 * x * x;
        else if (name == "shifted_square")
            p.fitness_values[i] = (x - 49.0) * (x - 49.0);
        else
            throw InputError("unknown builtin '" + std::string(name) +
                             "' (expected square, square10 or shifted_square)");
    }
    p.validate();
    return p;
}

inline const std::vector<std::string> &builtin_names() {
    static const std::vector<std::string> names{"square", "square10", "shifted_square"};
    return names;
}

/// Neighbour walk: propose x-1 and x+1 each with step_prob, keep a non-improving
/// proposal with accept_worse_prob.
struct WalkParams {
    double step_prob = 0.01;
    double accept_worse_prob = 0.0;

    void validate() const {
        if (!(step_prob > 0.0 && step_prob <= 0.5))
            throw InputError("step_prob must lie in (0, 0.5]");
        if (!(accept_worse_prob >= 0.0 && accept_worse_prob <= 1.0))
            throw InputError("accept_worse_prob must lie in [0, 1]");
    }
};

enum class Algorithm { rsh1, rsh2 };

inline std::string_view to_string(Algorithm a) { return a == Algorithm::rsh1 ? "rsh1" : "rsh2"; }

inline Algorithm parse_algorithm(std::string_view s) {
    if (s == "rsh1")
        return Algorithm::rsh1;
    if (s == "rsh2")
        return Algorithm::rsh2;
    throw InputError("unknown algorithm '" + std::string(s) + "' (expected rsh1 or rsh2)");
}

/// Elitist walk (0.01, 0) and non-elitist walk (0.01, 0.5).
inline WalkParams default_params(Algorithm a) {
    return a == Algorithm::rsh1 ? WalkParams{0.01, 0.0} : WalkParams{0.01, 0.5};
}

namespace detail {

inline TransitionKernel walk_kernel(const ProblemSpec &problem, double step, double worse) {
    problem.validate();
    const StateSpace space(problem.fitness_values);
    const std::size_t n = problem.domain_size;
    const auto &f = problem.fitness_values;
    Matrix p = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t x = 0; x < n; ++x) {
        const auto xi = static_cast<Eigen::Index>(x);
        if (space.optimal(x)) {
            p(xi, xi) = 1.0;
            continue;
        }
        double out = 0.0;
        auto propose = [&](std::size_t y) {
            const double prob = f[y] > f[x] ? step : step * worse;
            p(xi, static_cast<Eigen::Index>(y)) = prob;
            out += prob;
        };
        if (x > 0)
            propose(x - 1);
        if (x + 1 < n)
            propose(x + 1);
        p(xi, xi) = 1.0 - out;
    }
    return TransitionKernel(std::move(p));
}

} // namespace detail

/// Random walk with elitist selection. Optimal rows come out already lumped.
inline TransitionKernel kernel_rsh1(const ProblemSpec &problem, const WalkParams &params) {
    params.validate();
    return detail::walk_kernel(problem, params.step_prob, 0.0);
}

/// Random walk with non-elitist selection: a rejected proposal leaves the walker in place.
inline TransitionKernel kernel_rsh2(const ProblemSpec &problem, const WalkParams &params) {
    params.validate();
    return detail::walk_kernel(problem, params.step_prob, params.accept_worse_prob);
}

inline TransitionKernel make_kernel(Algorithm a, const ProblemSpec &problem, const WalkParams &params) {
    return a == Algorithm::rsh1 ? kernel_rsh1(problem, params) : kernel_rsh2(problem, params);
}

inline AbsorbingChain make_chain(Algorithm a, const ProblemSpec &problem, const WalkParams &params) {
    return build_chain(make_kernel(a, problem, params), problem.state_space());
}

inline AbsorbingChain make_chain(Algorithm a, const ProblemSpec &problem) {
    return make_chain(a, problem, default_params(a));
}

} // namespace rshlab
