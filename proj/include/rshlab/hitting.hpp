#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "rshlab/chain.hpp"
#include "rshlab/errors.hpp"
#include "rshlab/linalg.hpp"

namespace rshlab {

/// Expected hitting times h = N 1 and staying times s^T = 1^T N, N = (I - Q)^{-1}.
struct HittingTimes {
    Vector h;
    Vector staying;
    /// ||(I - Q) h - 1||_inf
    double residual = 0.0;
    /// max_i |(I - Q) h - 1|_i / (|I - Q| |h| + 1)_i
    double backward_error = 0.0;
};

inline constexpr double kHittingBackwardTol = 1e-8;

namespace detail {

/// (I - Q) x with the diagonal rebuilt as leak + off-diagonal row mass.
inline void apply_i_minus_q(const AbsorbingChain &chain, const Vector &x, Vector &ax, Vector &abs_ax) {
    const Matrix &q = chain.q();
    const auto m = q.rows();
    ax.resize(m);
    abs_ax.resize(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        double diag = chain.leak()(i);
        double off = 0.0, off_abs = 0.0;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (j == i)
                continue;
            diag += q(i, j);
            off += q(i, j) * x(j);
            off_abs += q(i, j) * std::abs(x(j));
        }
        ax(i) = diag * x(i) - off;
        abs_ax(i) = diag * std::abs(x(i)) + off_abs;
    }
}

} // namespace detail

/// Solves (I - Q) h = 1 and (I - Q)^T s = 1 with one subtraction-free factorization.
/// Throws SingularSystem when some non-optimal state cannot reach the optimal set.
inline HittingTimes hitting_times(const AbsorbingChain &chain) {
    HittingTimes out;
    const auto m = static_cast<Eigen::Index>(chain.size());
    if (m == 0) {
        out.h = out.staying = Vector(0);
        return out;
    }
    const MMatrixLU lu(chain.q(), chain.leak());
    const Vector ones = Vector::Ones(m);
    out.h = lu.solve(ones);
    out.staying = lu.solve_transposed(ones);

    Vector ah, abs_ah;
    detail::apply_i_minus_q(chain, out.h, ah, abs_ah);
    for (Eigen::Index i = 0; i < m; ++i) {
        const double r = std::abs(ah(i) - 1.0);
        out.residual = std::max(out.residual, r);
        out.backward_error = std::max(out.backward_error, r / (abs_ah(i) + 1.0));
    }
    if (!(out.backward_error <= kHittingBackwardTol))
        throw Error("hitting-time solve failed its residual check (backward error " +
                    std::to_string(out.backward_error) + ")");
    return out;
}

/// |sum(h) - sum(s)| / sum(h). Both sums equal 1^T N 1.
inline double forward_backward_identity(const HittingTimes &times) {
    const double sh = times.h.sum();
    const double ss = times.staying.sum();
    if (sh == 0.0)
        return ss == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(sh - ss) / sh;
}

/// h(Phi_0) = sum_X h(X) P(Phi_0 = X).
inline double expected_hitting_time(const HittingTimes &times, const Distribution &initial) {
    if (initial.size() != static_cast<std::size_t>(times.h.size()))
        throw DimensionMismatch("distribution vs hitting times",
                                static_cast<std::size_t>(times.h.size()), initial.size());
    return initial.weights.dot(times.h);
}

} // namespace rshlab
