#pragma once

// Independent reference computations used only by the tests. None of these share code
// paths with the library routines they check.

#include <cmath>
#include <algorithm>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace oracle {

using Dense = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// P(x, y) straight from the piecewise walk definition over {0..n-1}.
inline double case_table(const std::vector<double> &f, std::size_t x, std::size_t y, double step,
                         double worse) {
    const std::size_t n = f.size();
    double best = f[0];
    for (double v : f)
        best = std::max(best, v);
    if (f[x] == best)
        return x == y ? 1.0 : 0.0;
    auto move = [&](std::size_t z) -> double {
        if (z >= n)
            return 0.0;
        return f[z] > f[x] ? step : step * worse;
    };
    const double down = x >= 1 ? move(x - 1) : 0.0;
    const double up = move(x + 1);
    if (x >= 1 && y == x - 1)
        return down;
    if (y == x + 1)
        return up;
    if (y == x)
        return 1.0 - down - up;
    return 0.0;
}

/// Q block (non-optimal rows/cols in ascending order) assembled from case_table.
inline Dense q_block(const std::vector<double> &f, double step, double worse) {
    double best = f[0];
    for (double v : f)
        best = std::max(best, v);
    std::vector<std::size_t> non;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (f[i] != best)
            non.push_back(i);
    Dense q(non.size(), non.size());
    for (std::size_t a = 0; a < non.size(); ++a)
        for (std::size_t b = 0; b < non.size(); ++b)
            q(a, b) = case_table(f, non[a], non[b], step, worse);
    return q;
}

inline std::vector<double> square(std::size_t n = 101, double scale = 1.0) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i)
        f[i] = scale * double(i) * double(i);
    return f;
}

inline std::vector<double> shifted_square(std::size_t n = 101) {
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i)
        f[i] = (double(i) - 49.0) * (double(i) - 49.0);
    return f;
}

/// Largest eigenvalue modulus from a general dense eigensolver.
inline double eigen_radius(const Dense &q) {
    Eigen::EigenSolver<Dense> es(q, false);
    double r = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        r = std::max(r, std::abs(es.eigenvalues()(i)));
    return r;
}

/// Plain value iteration h <- 1 + Q h from h = 0 until successive iterates agree to rel_tol.
inline Vec value_iteration(const Dense &q, double rel_tol, std::size_t max_iter, bool *converged = nullptr) {
    Vec h = Vec::Zero(q.rows());
    for (std::size_t k = 0; k < max_iter; ++k) {
        Vec next = Vec::Ones(q.rows()) + q * h;
        const double change = (next - h).cwiseAbs().maxCoeff();
        h = next;
        if (change <= rel_tol * h.cwiseAbs().maxCoeff() * 1e-3) {
            if (converged)
                *converged = true;
            return h;
        }
    }
    if (converged)
        *converged = false;
    return h;
}

/// The value-iteration fixed point reached by doubling, in quadruple precision: after j
/// rounds h = sum_{k < 2^j} Q^k 1. The extra precision keeps row sums of Q^(2^j) distinct
/// from 1 even when 1 - rho(Q) is far below double epsilon. The diagonal is taken as the
/// complement 1 - leak - (off-diagonal mass) of each stochastic row, evaluated in quad.
inline Vec value_iteration_quad(const Dense &q, const Vec &leak, int max_rounds = 120) {
    using quad = __float128;
    const auto n = static_cast<std::size_t>(q.rows());
    std::vector<quad> p(n * n), next(n * n), h(n, 1), tail(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            p[i * n + j] = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    for (std::size_t i = 0; i < n; ++i) {
        quad out = leak(static_cast<Eigen::Index>(i));
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                out += p[i * n + j];
        p[i * n + i] = 1 - out;
    }
    for (int round = 0; round < max_rounds; ++round) {
        quad biggest = 0;
        for (std::size_t i = 0; i < n; ++i) {
            quad acc = 0;
            for (std::size_t j = 0; j < n; ++j)
                acc += p[i * n + j] * h[j];
            tail[i] = acc;
        }
        for (std::size_t i = 0; i < n; ++i)
            h[i] += tail[i];
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                next[i * n + j] = 0;
            for (std::size_t k = 0; k < n; ++k) {
                const quad a = p[i * n + k];
                if (a == 0)
                    continue;
                for (std::size_t j = 0; j < n; ++j)
                    next[i * n + j] += a * p[k * n + j];
            }
            for (std::size_t j = 0; j < n; ++j)
                biggest = std::max(biggest, next[i * n + j]);
        }
        p.swap(next);
        if (biggest < quad(1e-30))
            break;
    }
    Vec out(q.rows());
    for (std::size_t i = 0; i < n; ++i)
        out(static_cast<Eigen::Index>(i)) = static_cast<double>(h[i]);
    return out;
}

/// q0^T Q^t by repeated full multiplication.
inline Eigen::RowVectorXd dense_iterate(const Dense &q, Eigen::RowVectorXd v, std::size_t t) {
    for (std::size_t k = 0; k < t; ++k)
        v = v * q;
    return v;
}

} // namespace oracle
