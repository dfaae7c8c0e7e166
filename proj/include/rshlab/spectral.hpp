#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "rshlab/cancel.hpp"
#include "rshlab/chain.hpp"
#include "rshlab/errors.hpp"
#include "rshlab/linalg.hpp"

#include <Eigen/SparseCore>

namespace rshlab {

struct SpectralOptions {
    double tol = 1e-10;
    std::size_t max_sweeps = 1'000'000;
    /// Consecutive slow sweeps that switch power iteration over to Gelfand squaring.
    std::size_t stagnation_window = 100;
    CancelToken cancel;
};

/// Spectral data of the transient block Q.
struct SpectralInfo {
    double rho = 0.0;
    /// 1 - rho computed directly from the M-matrix I - Q, accurate even when rho rounds to 1.
    double gap = 1.0;
    /// Certified bracket of the gap (Collatz-Wielandt bounds on (I - B)^{-1}).
    double gap_lower = 1.0;
    double gap_upper = 1.0;
    /// Largest-radius strongly connected block, as original state indices.
    std::vector<std::size_t> dominant_block;
    std::string method = "trivial";
    std::size_t sweeps = 0;
};

/// Strongly connected components of the support graph of a square nonnegative matrix,
/// in reverse topological order (Tarjan).
inline std::vector<std::vector<std::size_t>> strongly_connected_components(const Matrix &a) {
    const auto n = static_cast<std::size_t>(a.rows());
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j && a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0.0)
                adj[i].push_back(j);

    constexpr std::size_t unvisited = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> index(n, unvisited), low(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> components;
    std::size_t counter = 0;

    struct Frame {
        std::size_t node;
        std::size_t next_edge;
    };
    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited)
            continue;
        std::vector<Frame> call{{root, 0}};
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!call.empty()) {
            Frame &frame = call.back();
            const std::size_t v = frame.node;
            if (frame.next_edge < adj[v].size()) {
                const std::size_t w = adj[v][frame.next_edge++];
                if (index[w] == unvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    call.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            if (low[v] == index[v]) {
                std::vector<std::size_t> comp;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = false;
                    comp.push_back(w);
                } while (w != v);
                std::sort(comp.begin(), comp.end());
                components.push_back(std::move(comp));
            }
            call.pop_back();
            if (!call.empty())
                low[call.back().node] = std::min(low[call.back().node], low[v]);
        }
    }
    return components;
}

namespace detail {

struct Bracket {
    double lower;
    double upper;
    double mid() const { return 0.5 * (lower + upper); }
    double width() const { return upper - lower; }
};

/// Collatz-Wielandt bounds min/max (y_i / x_i) for x > 0.
inline Bracket ratio_bounds(const Vector &y, const Vector &x) {
    Bracket b{std::numeric_limits<double>::infinity(), 0.0};
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double r = y(i) / x(i);
        b.lower = std::min(b.lower, r);
        b.upper = std::max(b.upper, r);
    }
    return b;
}

/// ||B^N||^{1/N} with N = 2^j, squaring a row-sum-normalised copy to avoid overflow.
/// The minimum row sum gives the matching lower bound for an irreducible block.
inline Bracket gelfand_radius(const Matrix &block, double tol, const CancelToken &cancel,
                              std::size_t &sweeps) {
    Matrix m = block;
    double log_scale = 0.0;
    double exponent = 1.0;
    Bracket best{0.0, std::numeric_limits<double>::infinity()};
    for (int j = 0; j <= 200; ++j) {
        cancel.throw_if_cancelled();
        const Vector rows = m.rowwise().sum();
        const double hi = rows.maxCoeff();
        const double lo = rows.minCoeff();
        if (!(hi > 0.0))
            return {0.0, 0.0};
        const Bracket b{lo > 0.0 ? std::exp((log_scale + std::log(lo)) / exponent) : 0.0,
                        std::exp((log_scale + std::log(hi)) / exponent)};
        best = {std::max(best.lower, b.lower), std::min(best.upper, b.upper)};
        if (best.width() <= tol)
            return best;
        m /= hi;
        log_scale += std::log(hi);
        m = (m * m).eval();
        log_scale *= 2.0;
        exponent *= 2.0;
        ++sweeps;
    }
    throw NoConvergence("Gelfand squaring did not reach the requested tolerance", best.lower,
                        best.upper);
}

/// Perron root of an irreducible nonnegative block (size >= 2).
inline double block_radius(const Matrix &block, const SpectralOptions &opt, std::string &method,
                           std::size_t &sweeps) {
    const auto n = block.rows();
    // A block without self-loops may be periodic; shifting by I makes it primitive.
    const bool shift = (block.diagonal().array() <= 0.0).all();
    const double s = shift ? 1.0 : 0.0;
    // Walk kernels are banded, so sweeps run on a compressed copy.
    const Eigen::SparseMatrix<double, Eigen::RowMajor> sparse = block.sparseView();
    Vector x = Vector::Ones(n);
    Vector y(n);
    double previous = std::numeric_limits<double>::quiet_NaN();
    std::size_t slow = 0;
    for (std::size_t sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        if ((sweep & 1023U) == 0)
            opt.cancel.throw_if_cancelled();
        y.noalias() = sparse * x;
        if (shift)
            y += x;
        ++sweeps;
        const Bracket b = ratio_bounds(y, x);
        if (b.width() <= opt.tol) {
            method = "power";
            return b.mid() - s;
        }
        const double est = b.mid();
        if (std::isfinite(previous) && std::abs(est - previous) <= (opt.tol / 10.0) * std::abs(est)) {
            if (++slow >= opt.stagnation_window) {
                method = "gelfand";
                return gelfand_radius(block, opt.tol, opt.cancel, sweeps).mid();
            }
        } else {
            slow = 0;
        }
        previous = est;
        x = y * (1.0 / y.maxCoeff());
    }
    method = "gelfand";
    try {
        return gelfand_radius(block, opt.tol, opt.cancel, sweeps).mid();
    } catch (const NoConvergence &e) {
        throw NoConvergence("power iteration exceeded its sweep cap", e.lower(), e.upper());
    }
}

/// Smallest eigenvalue of the M-matrix I - B by inverse iteration on the subtraction-free
/// factorization; returns a certified bracket. A vanishing pivot means I - B is singular.
inline Bracket block_gap(const Matrix &block, const Vector &leak, const SpectralOptions &opt) {
    const MMatrixLU lu(block, leak);
    if (lu.singular())
        return {0.0, 0.0};
    Vector x = Vector::Ones(block.rows());
    Bracket gap{0.0, std::numeric_limits<double>::infinity()};
    const std::size_t cap = std::min<std::size_t>(opt.max_sweeps, 100'000);
    for (std::size_t sweep = 0; sweep < cap; ++sweep) {
        if ((sweep & 255U) == 0)
            opt.cancel.throw_if_cancelled();
        const Vector y = lu.solve(x);
        const Bracket inv = ratio_bounds(y, x);
        gap = {std::max(gap.lower, 1.0 / inv.upper), std::min(gap.upper, 1.0 / inv.lower)};
        if (gap.width() <= opt.tol * gap.upper)
            break;
        x = y / y.maxCoeff();
    }
    return gap;
}

} // namespace detail

/// Spectral radius and gap of Q, block by block over its strongly connected components
/// (the spectrum of a reducible nonnegative matrix is the union of its irreducible blocks).
/// Singleton blocks contribute their diagonal entry exactly; larger blocks use power
/// iteration from the all-ones vector, falling back to Gelfand squaring on stagnation.
inline SpectralInfo analyze_spectrum(const AbsorbingChain &chain, const SpectralOptions &opt = {}) {
    if (!(opt.tol > 0.0))
        throw InputError("spectral tolerance must be positive");
    SpectralInfo info;
    if (chain.size() == 0)
        return info;
    const Matrix &q = chain.q();
    info.rho = -1.0;
    info.gap_lower = info.gap_upper = info.gap = std::numeric_limits<double>::infinity();
    for (const auto &comp : strongly_connected_components(q)) {
        const auto k = static_cast<Eigen::Index>(comp.size());
        Matrix block(k, k);
        Vector leak(k);
        std::vector<bool> inside(chain.size(), false);
        for (auto c : comp)
            inside[c] = true;
        for (Eigen::Index a = 0; a < k; ++a) {
            const auto i = static_cast<Eigen::Index>(comp[static_cast<std::size_t>(a)]);
            for (Eigen::Index b = 0; b < k; ++b)
                block(a, b) = q(i, static_cast<Eigen::Index>(comp[static_cast<std::size_t>(b)]));
            double out = chain.leak()(i);
            for (Eigen::Index j = 0; j < q.cols(); ++j)
                if (!inside[static_cast<std::size_t>(j)])
                    out += q(i, j);
            leak(a) = out;
        }

        double rho_c;
        detail::Bracket gap_c;
        std::string method = "trivial";
        std::size_t sweeps = 0;
        if (k == 1) {
            rho_c = block(0, 0);
            gap_c = {leak(0), leak(0)};
        } else {
            rho_c = detail::block_radius(block, opt, method, sweeps);
            gap_c = detail::block_gap(block, leak, opt);
        }
        info.sweeps += sweeps;
        if (gap_c.mid() < info.gap || (gap_c.mid() == info.gap && rho_c > info.rho)) {
            info.gap = gap_c.mid();
            info.gap_lower = gap_c.lower;
            info.gap_upper = gap_c.upper;
            info.dominant_block.clear();
            for (auto c : comp)
                info.dominant_block.push_back(chain.non_index()[c]);
        }
        if (rho_c > info.rho) {
            info.rho = rho_c;
            info.method = method;
        }
    }
    info.rho = std::clamp(info.rho, 0.0, 1.0);
    return info;
}

/// rho(Q) within tol.
inline double spectral_radius(const AbsorbingChain &chain, double tol = 1e-10) {
    SpectralOptions opt;
    opt.tol = tol;
    return analyze_spectrum(chain, opt).rho;
}

} // namespace rshlab
