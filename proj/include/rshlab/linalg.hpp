#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rshlab/errors.hpp"

namespace rshlab {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Max row sum of |A|.
inline double inf_norm(const Matrix &a) {
    return a.rows() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Max column sum of |A|.
inline double one_norm(const Matrix &a) {
    return a.cols() == 0 ? 0.0 : a.cwiseAbs().colwise().sum().maxCoeff();
}

/// Factorization of an M-matrix A = I - Q built without a single subtraction.
///
/// Q is nonnegative and substochastic, and `leak[i]` is the probability of leaving the
/// transient block from row i (the row sum of R plus any excluded columns). The diagonal
/// of A is rebuilt as leak + off-diagonal mass rather than as 1 - Q(i,i), and elimination
/// carries the leak of every Schur complement row forward (Grassmann-Taksar-Heyman style).
/// Every quantity is then a sum of nonnegative terms, so pivots and solutions carry
/// small componentwise relative error even when I - Q is nearly singular.
class MMatrixLU {
  public:
    MMatrixLU(const Matrix &q, const Vector &leak) : n_(static_cast<std::size_t>(q.rows())) {
        // work(i,j) for i != j holds the magnitude of the (negative) off-diagonal of A.
        work_ = q;
        Vector row_leak = leak;
        pivot_.resize(static_cast<Eigen::Index>(n_));
        for (std::size_t k = 0; k < n_; ++k) {
            const auto kk = static_cast<Eigen::Index>(k);
            double piv = row_leak(kk);
            for (Eigen::Index j = kk + 1; j < static_cast<Eigen::Index>(n_); ++j)
                piv += work_(kk, j);
            pivot_(kk) = piv;
            if (!(piv > 0.0) || !std::isfinite(piv)) {
                singular_at_ = k;
                return;
            }
            for (Eigen::Index i = kk + 1; i < static_cast<Eigen::Index>(n_); ++i) {
                const double wik = work_(i, kk);
                if (wik == 0.0)
                    continue;
                const double mult = wik / piv;
                work_(i, kk) = mult;
                for (Eigen::Index j = kk + 1; j < static_cast<Eigen::Index>(n_); ++j) {
                    if (j != i)
                        work_(i, j) += mult * work_(kk, j);
                }
                row_leak(i) += mult * row_leak(kk);
            }
        }
    }

    bool singular() const { return singular_at_ != npos; }

    /// First elimination step whose pivot vanished; meaningful only when singular().
    std::size_t singular_at() const { return singular_at_; }

    const Vector &pivots() const { return pivot_; }

    /// Solves (I - Q) x = b for nonnegative b.
    Vector solve(const Vector &b) const {
        require_regular();
        const auto n = static_cast<Eigen::Index>(n_);
        Vector y = b;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index k = 0; k < i; ++k)
                y(i) += work_(i, k) * y(k);
        Vector x(n);
        for (Eigen::Index i = n - 1; i >= 0; --i) {
            double acc = y(i);
            for (Eigen::Index j = i + 1; j < n; ++j)
                acc += work_(i, j) * x(j);
            x(i) = acc / pivot_(i);
        }
        return x;
    }

    /// Solves (I - Q)^T x = b for nonnegative b.
    Vector solve_transposed(const Vector &b) const {
        require_regular();
        const auto n = static_cast<Eigen::Index>(n_);
        Vector z(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            double acc = b(j);
            for (Eigen::Index k = 0; k < j; ++k)
                acc += work_(k, j) * z(k);
            z(j) = acc / pivot_(j);
        }
        Vector x = z;
        for (Eigen::Index k = n - 1; k >= 0; --k)
            for (Eigen::Index i = k + 1; i < n; ++i)
                x(k) += work_(i, k) * x(i);
        return x;
    }

  private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    void require_regular() const {
        if (singular())
            throw SingularSystem(singular_at_);
    }

    std::size_t n_;
    Matrix work_;
    Vector pivot_;
    std::size_t singular_at_ = npos;
};

} // namespace rshlab
