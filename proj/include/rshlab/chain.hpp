#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rshlab/errors.hpp"
#include "rshlab/linalg.hpp"

namespace rshlab {

/// Dense storage guard: a chain larger than this is refused unless the caller raises it.
inline constexpr std::size_t kDefaultStateCap = 5000;

/// Absolute tolerance for row-stochasticity checks.
inline constexpr double kStochasticTol = 1e-12;

/// Finite state space with a fitness value per state. Every state attaining the
/// maximum fitness is optimal; ties are not broken.
class StateSpace {
  public:
    explicit StateSpace(std::vector<double> fitness, std::size_t cap = kDefaultStateCap)
        : fitness_(std::move(fitness)) {
        if (fitness_.size() < 2)
            throw InputError("state space needs at least 2 states, got " +
                             std::to_string(fitness_.size()));
        if (fitness_.size() > cap)
            throw CapacityError("state space of " + std::to_string(fitness_.size()) +
                                " states exceeds the dense cap of " + std::to_string(cap));
        for (std::size_t i = 0; i < fitness_.size(); ++i)
            if (!std::isfinite(fitness_[i]))
                throw InputError("fitness[" + std::to_string(i) + "] is not finite");
        const double best = *std::max_element(fitness_.begin(), fitness_.end());
        optimal_.reserve(fitness_.size());
        for (double f : fitness_)
            optimal_.push_back(f == best);
    }

    std::size_t size() const { return fitness_.size(); }
    double fitness(std::size_t i) const { return fitness_[i]; }
    const std::vector<double> &fitness() const { return fitness_; }
    bool optimal(std::size_t i) const { return optimal_[i]; }
    const std::vector<bool> &optimal_mask() const { return optimal_; }

    std::size_t optimal_count() const {
        return static_cast<std::size_t>(std::count(optimal_.begin(), optimal_.end(), true));
    }

  private:
    std::vector<double> fitness_;
    std::vector<bool> optimal_;
};

/// Row-stochastic transition matrix, entry (i,j) = P(i -> j).
class TransitionKernel {
  public:
    explicit TransitionKernel(Matrix matrix) : matrix_(std::move(matrix)) {
        if (matrix_.rows() != matrix_.cols())
            throw DimensionMismatch("transition kernel must be square",
                                    static_cast<std::size_t>(matrix_.rows()),
                                    static_cast<std::size_t>(matrix_.cols()));
        for (Eigen::Index i = 0; i < matrix_.rows(); ++i) {
            const auto row = static_cast<std::size_t>(i);
            double sum = 0.0;
            for (Eigen::Index j = 0; j < matrix_.cols(); ++j) {
                const double p = matrix_(i, j);
                if (!(p >= 0.0 && p <= 1.0))
                    throw MalformedKernel(row, "entry " + std::to_string(j) + " = " +
                                                   std::to_string(p) + " outside [0,1]");
                sum += p;
            }
            if (std::abs(sum - 1.0) > kStochasticTol)
                throw MalformedKernel(row, "row sums to " + std::to_string(sum));
        }
    }

    std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
    const Matrix &matrix() const { return matrix_; }
    double operator()(std::size_t i, std::size_t j) const {
        return matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

  private:
    Matrix matrix_;
};

/// Replaces every optimal row by a self-loop of probability one; the auxiliary chain
/// that freezes once an optimum is found. Non-optimal rows are untouched.
inline TransitionKernel lump_optimal(const TransitionKernel &kernel, const StateSpace &space) {
    if (kernel.size() != space.size())
        throw DimensionMismatch("kernel vs state space", space.size(), kernel.size());
    Matrix m = kernel.matrix();
    for (std::size_t i = 0; i < space.size(); ++i) {
        if (!space.optimal(i))
            continue;
        const auto r = static_cast<Eigen::Index>(i);
        m.row(r).setZero();
        m(r, r) = 1.0;
    }
    return TransitionKernel(std::move(m));
}

/// Canonical-form split of a lumped kernel into the transient block Q (non-optimal to
/// non-optimal) and R (non-optimal to optimal). Positions in Q follow ascending original
/// state order; non_index/opt_index map positions back to states.
class AbsorbingChain {
  public:
    AbsorbingChain(Matrix q, Matrix r, std::vector<std::size_t> non_index,
                   std::vector<std::size_t> opt_index)
        : q_(std::move(q)), r_(std::move(r)), non_(std::move(non_index)),
          opt_(std::move(opt_index)) {
        const auto m = non_.size();
        if (static_cast<std::size_t>(q_.rows()) != m || static_cast<std::size_t>(q_.cols()) != m)
            throw DimensionMismatch("Q block", m, static_cast<std::size_t>(q_.rows()));
        if (static_cast<std::size_t>(r_.rows()) != m ||
            static_cast<std::size_t>(r_.cols()) != opt_.size())
            throw DimensionMismatch("R block", opt_.size(), static_cast<std::size_t>(r_.cols()));
        leak_ = r_.rowwise().sum();
        for (std::size_t i = 0; i < m; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            if ((q_.row(ii).array() < 0.0).any() || (r_.row(ii).array() < 0.0).any())
                throw MalformedKernel(non_[i], "negative entry in canonical blocks");
            const double total = q_.row(ii).sum() + leak_(ii);
            if (std::abs(total - 1.0) > kStochasticTol)
                throw MalformedKernel(non_[i], "Q+R row sums to " + std::to_string(total));
        }
        std::size_t max_state = 0;
        for (auto s : non_)
            max_state = std::max(max_state, s);
        for (auto s : opt_)
            max_state = std::max(max_state, s);
        position_.assign(max_state + 1, npos);
        for (std::size_t i = 0; i < m; ++i)
            position_[non_[i]] = i;
    }

    /// Number of non-optimal (transient) states.
    std::size_t size() const { return non_.size(); }
    std::size_t state_count() const { return non_.size() + opt_.size(); }

    const Matrix &q() const { return q_; }
    const Matrix &r() const { return r_; }
    /// One-step absorption probability per non-optimal position (row sums of R).
    const Vector &leak() const { return leak_; }

    const std::vector<std::size_t> &non_index() const { return non_; }
    const std::vector<std::size_t> &opt_index() const { return opt_; }

    /// Position of an original state inside Q, or nullopt for optimal states.
    std::optional<std::size_t> position(std::size_t state) const {
        if (state >= position_.size() || position_[state] == npos)
            return std::nullopt;
        return position_[state];
    }

    /// Inverse permutation back to the full (lumped) kernel.
    Matrix reconstruct() const {
        const auto n = static_cast<Eigen::Index>(state_count());
        Matrix p = Matrix::Zero(n, n);
        for (std::size_t i = 0; i < non_.size(); ++i) {
            const auto row = static_cast<Eigen::Index>(non_[i]);
            for (std::size_t j = 0; j < non_.size(); ++j)
                p(row, static_cast<Eigen::Index>(non_[j])) =
                    q_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
            for (std::size_t j = 0; j < opt_.size(); ++j)
                p(row, static_cast<Eigen::Index>(opt_[j])) =
                    r_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        for (auto s : opt_)
            p(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s)) = 1.0;
        return p;
    }

  private:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    Matrix q_;
    Matrix r_;
    Vector leak_;
    std::vector<std::size_t> non_;
    std::vector<std::size_t> opt_;
    std::vector<std::size_t> position_;
};

inline AbsorbingChain build_chain(const TransitionKernel &kernel, const StateSpace &space) {
    if (kernel.size() != space.size())
        throw DimensionMismatch("kernel vs state space", space.size(), kernel.size());
    std::vector<std::size_t> non, opt;
    for (std::size_t i = 0; i < space.size(); ++i)
        (space.optimal(i) ? opt : non).push_back(i);
    for (auto s : opt)
        if (kernel(s, s) != 1.0)
            throw AbsorbingViolation(s);

    const auto m = static_cast<Eigen::Index>(non.size());
    const auto a = static_cast<Eigen::Index>(opt.size());
    Matrix q(m, m), r(m, a);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto from = non[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < m; ++j)
            q(i, j) = kernel(from, non[static_cast<std::size_t>(j)]);
        for (Eigen::Index j = 0; j < a; ++j)
            r(i, j) = kernel(from, opt[static_cast<std::size_t>(j)]);
    }
    return AbsorbingChain(std::move(q), std::move(r), std::move(non), std::move(opt));
}

/// Probability mass over the non-optimal states at iteration t (the row vector q_t).
struct Distribution {
    RowVector weights;
    std::size_t iteration = 0;

    std::size_t size() const { return static_cast<std::size_t>(weights.size()); }
};

inline Distribution point_mass(const AbsorbingChain &chain, std::size_t state) {
    Distribution d{RowVector::Zero(static_cast<Eigen::Index>(chain.size())), 0};
    if (auto pos = chain.position(state))
        d.weights(static_cast<Eigen::Index>(*pos)) = 1.0;
    else if (state >= chain.state_count())
        throw InputError("initial state " + std::to_string(state) + " outside the state space");
    return d;
}

/// Uniform over all states, restricted to the non-optimal ones (each weight 1/n).
inline Distribution uniform_initial(const AbsorbingChain &chain) {
    const double w = 1.0 / static_cast<double>(chain.state_count());
    return {RowVector::Constant(static_cast<Eigen::Index>(chain.size()), w), 0};
}

inline double nonopt_probability(const Distribution &dist) {
    return dist.weights.cwiseAbs().sum();
}

/// One step of q_{t+1}^T = q_t^T Q.
inline Distribution iterate(const AbsorbingChain &chain, const Distribution &dist) {
    if (dist.size() != chain.size())
        throw DimensionMismatch("distribution vs chain", chain.size(), dist.size());
    return {dist.weights * chain.q(), dist.iteration + 1};
}

} // namespace rshlab
