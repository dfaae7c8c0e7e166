#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rshlab/cancel.hpp"
#include "rshlab/chain.hpp"
#include "rshlab/errors.hpp"
#include "rshlab/linalg.hpp"

namespace rshlab {

/// Nonnegative potential over the non-optimal states (zero on optimal states, not stored).
class DriftFunction {
  public:
    explicit DriftFunction(Vector d) : d_(std::move(d)) {
        for (Eigen::Index i = 0; i < d_.size(); ++i)
            if (!std::isfinite(d_(i)) || d_(i) < 0.0)
                throw InputError("drift value d[" + std::to_string(i) + "] must be finite and >= 0");
    }

    const Vector &values() const { return d_; }
    std::size_t size() const { return static_cast<std::size_t>(d_.size()); }

  private:
    Vector d_;
};

/// Hypothesis tolerance on every drift-versus-one comparison.
inline constexpr double kDriftTol = 1e-9;
/// Residual non-optimal mass (relative to the start) below which a finite horizon counts as
/// covering all iterations.
inline constexpr double kNegligibleMass = 1e-12;

namespace detail {

inline void require_dims(const AbsorbingChain &chain, const DriftFunction &d) {
    if (d.size() != chain.size())
        throw DimensionMismatch("drift function vs non-optimal states", chain.size(), d.size());
}

} // namespace detail

/// Delta = (I - Q) d, evaluated as leak_i d_i + sum_{j != i} Q_ij (d_i - d_j).
inline Vector pointwise_drift(const AbsorbingChain &chain, const DriftFunction &d) {
    detail::require_dims(chain, d);
    const Matrix &q = chain.q();
    const Vector &v = d.values();
    Vector out(q.rows());
    for (Eigen::Index i = 0; i < q.rows(); ++i) {
        double acc = chain.leak()(i) * v(i);
        for (Eigen::Index j = 0; j < q.cols(); ++j)
            if (j != i && q(i, j) != 0.0)
                acc += q(i, j) * (v(i) - v(j));
        out(i) = acc;
    }
    return out;
}

/// nabla^T = d^T (I - Q), with the diagonal of I - Q rebuilt from leak and off-diagonal mass.
inline Vector backward_drift(const AbsorbingChain &chain, const DriftFunction &d) {
    detail::require_dims(chain, d);
    const Matrix &q = chain.q();
    const Vector &v = d.values();
    Vector out(q.rows());
    for (Eigen::Index j = 0; j < q.rows(); ++j) {
        double stay_out = chain.leak()(j);
        for (Eigen::Index k = 0; k < q.cols(); ++k)
            if (k != j)
                stay_out += q(j, k);
        double inflow = 0.0;
        for (Eigen::Index i = 0; i < q.rows(); ++i)
            if (i != j)
                inflow += v(i) * q(i, j);
        out(j) = v(j) * stay_out - inflow;
    }
    return out;
}

struct AverageDrift {
    /// (t, average drift at t) for t = 0..horizon, minus iterations with zero mass.
    std::vector<std::pair<std::size_t, double>> values;
    /// ln(||q_horizon||_1 / ||q_0||_1); -inf once all mass is absorbed.
    double log_residual_mass = 0.0;
    /// True when the chain emptied before the horizon (later terms hold vacuously).
    bool emptied = false;
};

/// Average of Delta under q_t conditioned on non-optimality, for t = 0..horizon.
inline AverageDrift average_drift(const AbsorbingChain &chain, const DriftFunction &d,
                                  const Distribution &q0, std::size_t horizon,
                                  const CancelToken &cancel = {}) {
    detail::require_dims(chain, d);
    if (q0.size() != chain.size())
        throw DimensionMismatch("distribution vs chain", chain.size(), q0.size());
    const double mass0 = nonopt_probability(q0);
    if (!(mass0 > 0.0))
        throw InputError("average drift needs an initial distribution with non-optimal mass");

    const Vector delta = pointwise_drift(chain, d);
    AverageDrift out;
    out.values.reserve(horizon + 1);
    RowVector w = q0.weights / mass0;
    double log_mass = 0.0;
    for (std::size_t t = 0; t <= horizon; ++t) {
        if ((t & 1023U) == 0)
            cancel.throw_if_cancelled();
        const double mass = w.sum();
        if (!(mass > 0.0)) {
            out.emptied = true;
            out.log_residual_mass = -std::numeric_limits<double>::infinity();
            return out;
        }
        w /= mass;
        log_mass += std::log(mass);
        out.values.emplace_back(t, w.dot(delta));
        if (t < horizon)
            w = (w * chain.q()).eval();
    }
    out.log_residual_mass = log_mass;
    return out;
}

enum class DriftMode { avg_upper, avg_lower, pointwise_upper, pointwise_lower, backward_upper, backward_lower };

inline std::string_view to_string(DriftMode m) {
    switch (m) {
    case DriftMode::avg_upper: return "avg_upper";
    case DriftMode::avg_lower: return "avg_lower";
    case DriftMode::pointwise_upper: return "pointwise_upper";
    case DriftMode::pointwise_lower: return "pointwise_lower";
    case DriftMode::backward_upper: return "backward_upper";
    case DriftMode::backward_lower: return "backward_lower";
    }
    return "?";
}

inline DriftMode parse_drift_mode(std::string_view s) {
    for (auto m : {DriftMode::avg_upper, DriftMode::avg_lower, DriftMode::pointwise_upper,
                   DriftMode::pointwise_lower, DriftMode::backward_upper, DriftMode::backward_lower})
        if (to_string(m) == s)
            return m;
    throw InputError("unknown drift mode '" + std::string(s) + "'");
}

enum class CertificateKind { none, upper_hitting, lower_hitting, upper_staying, lower_staying };

inline std::string_view to_string(CertificateKind k) {
    switch (k) {
    case CertificateKind::none: return "none";
    case CertificateKind::upper_hitting: return "upper_hitting";
    case CertificateKind::lower_hitting: return "lower_hitting";
    case CertificateKind::upper_staying: return "upper_staying";
    case CertificateKind::lower_staying: return "lower_staying";
    }
    return "?";
}

enum class CertificateStatus { certified, horizon_limited, denied };

inline std::string_view to_string(CertificateStatus s) {
    switch (s) {
    case CertificateStatus::certified: return "certified";
    case CertificateStatus::horizon_limited: return "horizon_limited";
    case CertificateStatus::denied: return "denied";
    }
    return "?";
}

struct DriftReport {
    DriftMode mode = DriftMode::avg_upper;
    Vector pointwise;
    Vector backward;
    std::vector<std::pair<std::size_t, double>> average_by_t;
    CertificateKind certificate = CertificateKind::none;
    CertificateStatus status = CertificateStatus::denied;
    /// d(Phi_0) for hitting-time certificates.
    std::optional<double> bound;
    /// Per-state bound: the d vector for staying-time and point-wise certificates.
    std::optional<Vector> bound_vector;
    double hypothesis_margin = 0.0;
    /// Original index of the state where the hypothesis is tightest (or violated).
    std::optional<std::size_t> violator_state;
    /// Iteration where the average-drift hypothesis is tightest (or violated).
    std::optional<std::size_t> violator_iteration;
    std::optional<double> log_residual_mass;
};

/// Checks the hypothesis of the drift theorem selected by `mode` and, when it holds,
/// emits the corresponding bound. A failed hypothesis is reported, not thrown.
inline DriftReport certify(const AbsorbingChain &chain, const DriftFunction &d, const Distribution &q0,
                           std::size_t horizon, DriftMode mode, const CancelToken &cancel = {}) {
    detail::require_dims(chain, d);
    if (q0.size() != chain.size())
        throw DimensionMismatch("distribution vs chain", chain.size(), q0.size());
    DriftReport rep;
    rep.mode = mode;
    rep.pointwise = pointwise_drift(chain, d);
    rep.backward = backward_drift(chain, d);

    const bool upper = mode == DriftMode::avg_upper || mode == DriftMode::pointwise_upper ||
                       mode == DriftMode::backward_upper;
    // margin of a single drift value: drift - 1 for upper bounds, 1 - drift for lower bounds
    auto margin_of = [upper](double drift) { return upper ? drift - 1.0 : 1.0 - drift; };

    bool horizon_ok = true;
    rep.hypothesis_margin = std::numeric_limits<double>::infinity();
    if (mode == DriftMode::avg_upper || mode == DriftMode::avg_lower) {
        auto avg = average_drift(chain, d, q0, horizon, cancel);
        rep.log_residual_mass = avg.log_residual_mass;
        for (const auto &[t, value] : avg.values) {
            const double m = margin_of(value);
            if (m < rep.hypothesis_margin) {
                rep.hypothesis_margin = m;
                rep.violator_iteration = t;
            }
        }
        horizon_ok = avg.emptied || avg.log_residual_mass <= std::log(kNegligibleMass);
        rep.average_by_t = std::move(avg.values);
    } else {
        const Vector &drift = (mode == DriftMode::pointwise_upper || mode == DriftMode::pointwise_lower)
                                  ? rep.pointwise
                                  : rep.backward;
        for (Eigen::Index i = 0; i < drift.size(); ++i) {
            const double m = margin_of(drift(i));
            if (m < rep.hypothesis_margin) {
                rep.hypothesis_margin = m;
                rep.violator_state = chain.non_index()[static_cast<std::size_t>(i)];
            }
        }
    }

    if (!(rep.hypothesis_margin >= -kDriftTol)) {
        rep.certificate = CertificateKind::none;
        rep.status = CertificateStatus::denied;
        return rep;
    }

    const double d_phi0 = q0.weights.dot(d.values());
    switch (mode) {
    case DriftMode::avg_upper:
    case DriftMode::pointwise_upper:
        rep.certificate = CertificateKind::upper_hitting;
        rep.bound = d_phi0;
        break;
    case DriftMode::avg_lower:
    case DriftMode::pointwise_lower:
        rep.certificate = CertificateKind::lower_hitting;
        rep.bound = d_phi0;
        break;
    case DriftMode::backward_upper:
        rep.certificate = CertificateKind::upper_staying;
        break;
    case DriftMode::backward_lower:
        rep.certificate = CertificateKind::lower_staying;
        break;
    }
    if (mode != DriftMode::avg_upper && mode != DriftMode::avg_lower)
        rep.bound_vector = d.values();
    rep.status = horizon_ok ? CertificateStatus::certified : CertificateStatus::horizon_limited;
    return rep;
}

} // namespace rshlab
