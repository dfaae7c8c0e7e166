#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rshlab/cancel.hpp"
#include "rshlab/chain.hpp"
#include "rshlab/errors.hpp"
#include "rshlab/linalg.hpp"
#include "rshlab/spectral.hpp"

namespace rshlab {

/// Average convergence rate over t iterations together with its matrix-norm bounds.
struct RateBounds {
    std::size_t horizon = 0;
    /// -(1/t) ln(||q_t||_1 / ||q_0||_1)
    double exact_rate = 0.0;
    /// -(1/t) ln ||(Q^T)^t||_1
    double finite_lower = 0.0;
    /// -ln rho(Q)
    double asymptotic_lower = 0.0;
    /// (1/t) ln ||((Q^T)^{-1})^t||_1, present when Q is safely invertible.
    std::optional<double> finite_upper;
    /// ln rho(Q^{-1})
    std::optional<double> asymptotic_upper;
    /// Machine-readable reason the upper bounds are absent ("q-singular").
    std::optional<std::string> upper_absent_reason;
    /// ln(||q_t||_1 / ||q_0||_1)
    double log_survival = 0.0;
};

/// Condition-number ceiling above which Q is treated as singular.
inline constexpr double kInvertibleCondLimit = 1e12;

namespace detail {

/// Q^k kept as exp(log_scale) * m. While no rescaling has happened, `absorbed` holds
/// 1 - (row sums of Q^k) accumulated from the leak vector without cancellation.
struct ScaledPower {
    Matrix m;
    double log_scale = 0.0;
    Vector absorbed;
    bool absorbed_valid = true;

    static ScaledPower identity(Eigen::Index n) {
        return {Matrix::Identity(n, n), 0.0, Vector::Zero(n), true};
    }

    ScaledPower times(const ScaledPower &rhs) const {
        ScaledPower out;
        out.m = m * rhs.m;
        out.log_scale = log_scale + rhs.log_scale;
        out.absorbed_valid = absorbed_valid && rhs.absorbed_valid && log_scale == 0.0;
        if (out.absorbed_valid)
            out.absorbed = absorbed + m * rhs.absorbed;
        out.rescale();
        return out;
    }

    void rescale() {
        const double big = m.cwiseAbs().maxCoeff();
        if (big > 0.0 && (big < 1e-20 || big > 1e20)) {
            m /= big;
            log_scale += std::log(big);
            absorbed_valid = false;
        }
    }

    /// ln of the max absolute row sum of the represented matrix.
    double log_inf_norm() const {
        if (absorbed_valid) {
            const double survive = 1.0 - absorbed.minCoeff();
            if (survive > 0.5)
                return std::log1p(-absorbed.minCoeff());
        }
        const double norm = inf_norm(m);
        return norm > 0.0 ? log_scale + std::log(norm) : -std::numeric_limits<double>::infinity();
    }
};

inline ScaledPower scaled_power(const ScaledPower &base, std::size_t exponent, const CancelToken &cancel) {
    ScaledPower result = ScaledPower::identity(base.m.rows());
    ScaledPower square = base;
    while (exponent > 0) {
        cancel.throw_if_cancelled();
        if (exponent & 1U)
            result = result.times(square);
        exponent >>= 1U;
        if (exponent > 0)
            square = square.times(square);
    }
    return result;
}

/// Exact survival trajectory ln(||q_t|| / ||q_0||) for t = 1..horizon, renormalising the
/// iterate so that no horizon underflows.
inline std::vector<double> log_survival_series(const AbsorbingChain &chain, const Distribution &q0,
                                               std::size_t horizon, const CancelToken &cancel) {
    const double mass0 = nonopt_probability(q0);
    if (!(mass0 > 0.0))
        throw InputError("initial distribution has no non-optimal mass");
    RowVector w = q0.weights / mass0;
    double log_scale = 0.0;
    double absorbed = 0.0;
    bool absorbed_valid = true;
    std::vector<double> out;
    out.reserve(horizon);
    for (std::size_t t = 1; t <= horizon; ++t) {
        if ((t & 1023U) == 0)
            cancel.throw_if_cancelled();
        if (absorbed_valid)
            absorbed += w.dot(chain.leak());
        w = (w * chain.q()).eval();
        const double mass = w.sum();
        if (!(mass > 0.0)) {
            out.push_back(-std::numeric_limits<double>::infinity());
            continue;
        }
        double ln_survival = log_scale + std::log(mass);
        if (absorbed_valid && absorbed < 0.5)
            ln_survival = std::log1p(-absorbed);
        out.push_back(ln_survival);
        if (mass < 1e-200) {
            w /= mass;
            log_scale += std::log(mass);
            absorbed_valid = false;
        }
    }
    return out;
}

struct InverseInfo {
    std::optional<ScaledPower> inverse;
    std::optional<double> log_rho_inverse;
};

inline InverseInfo invert_q(const AbsorbingChain &chain) {
    InverseInfo info;
    const Matrix &q = chain.q();
    if (q.rows() == 0)
        return info;
    const Eigen::PartialPivLU<Matrix> lu(q);
    const double det = lu.determinant();
    if (!std::isfinite(det) || det == 0.0)
        return info;
    Matrix inv = lu.inverse();
    if (!inv.allFinite())
        return info;
    const double cond = one_norm(q) * one_norm(inv);
    if (!(cond < kInvertibleCondLimit))
        return info;
    const Eigen::EigenSolver<Matrix> eig(q, false);
    double min_modulus = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i)
        min_modulus = std::min(min_modulus, std::abs(eig.eigenvalues()(i)));
    if (!(min_modulus > 0.0))
        return info;
    ScaledPower p{std::move(inv), 0.0, Vector(), false};
    p.rescale();
    info.inverse = std::move(p);
    info.log_rho_inverse = -std::log(min_modulus);
    return info;
}

inline RateBounds assemble_bounds(std::size_t t, double log_survival, const ScaledPower &q_power,
                                  double asymptotic_lower, const InverseInfo &inv,
                                  const CancelToken &cancel) {
    RateBounds b;
    const double td = static_cast<double>(t);
    b.horizon = t;
    b.log_survival = log_survival;
    b.exact_rate = -log_survival / td;
    b.finite_lower = -q_power.log_inf_norm() / td;
    b.asymptotic_lower = asymptotic_lower;
    if (inv.inverse) {
        b.finite_upper = scaled_power(*inv.inverse, t, cancel).log_inf_norm() / td;
        b.asymptotic_upper = inv.log_rho_inverse;
    } else {
        b.upper_absent_reason = "q-singular";
    }
    return b;
}

} // namespace detail

/// Rate bounds at several horizons from a single pass over the distribution.
inline std::vector<RateBounds> rate_bounds_series(const AbsorbingChain &chain, const Distribution &q0,
                                                  std::vector<std::size_t> horizons,
                                                  const CancelToken &cancel = {}) {
    if (q0.size() != chain.size())
        throw DimensionMismatch("distribution vs chain", chain.size(), q0.size());
    std::sort(horizons.begin(), horizons.end());
    horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
    if (horizons.empty())
        return {};
    if (horizons.front() < 1)
        throw InputError("rate horizon must be at least 1");

    const auto survival = detail::log_survival_series(chain, q0, horizons.back(), cancel);
    SpectralOptions sopt;
    sopt.cancel = cancel;
    const SpectralInfo spec = analyze_spectrum(chain, sopt);
    const double asymptotic_lower = spec.gap >= 1.0 ? std::numeric_limits<double>::infinity()
                                                    : -std::log1p(-spec.gap);
    const auto inv = detail::invert_q(chain);
    const detail::ScaledPower base{chain.q(), 0.0, chain.leak(), true};

    std::vector<RateBounds> out;
    out.reserve(horizons.size());
    for (auto t : horizons) {
        const auto power = detail::scaled_power(base, t, cancel);
        out.push_back(detail::assemble_bounds(t, survival[t - 1], power, asymptotic_lower, inv, cancel));
    }
    return out;
}

inline RateBounds rate_bounds(const AbsorbingChain &chain, const Distribution &q0, std::size_t horizon,
                              const CancelToken &cancel = {}) {
    if (horizon < 1)
        throw InputError("rate horizon must be at least 1");
    return rate_bounds_series(chain, q0, {horizon}, cancel).front();
}

} // namespace rshlab
