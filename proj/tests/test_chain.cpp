#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rshlab/chain.hpp"
#include "rshlab/heuristics.hpp"
#include "rshlab/random.hpp"

using namespace rshlab;

namespace {

AbsorbingChain rsh1_square() { return make_chain(Algorithm::rsh1, builtin_problem("square")); }

Matrix two_state(double p_non_to_opt) {
    Matrix m(2, 2);
    m << 1.0 - p_non_to_opt, p_non_to_opt, 0.0, 1.0;
    return m;
}

} // namespace

TEST(StateSpace, MarksEveryMaximumAsOptimal) {
    const StateSpace s({1.0, 3.0, 2.0, 3.0});
    EXPECT_FALSE(s.optimal(0));
    EXPECT_TRUE(s.optimal(1));
    EXPECT_FALSE(s.optimal(2));
    EXPECT_TRUE(s.optimal(3));
    EXPECT_EQ(s.optimal_count(), 2u);
}

TEST(StateSpace, RejectsBadInput) {
    EXPECT_THROW(StateSpace({1.0}), InputError);
    EXPECT_THROW(StateSpace({1.0, std::nan("")}), InputError);
    EXPECT_THROW(StateSpace({1.0, INFINITY}), InputError);
    EXPECT_THROW(StateSpace(std::vector<double>(11, 0.0), 10), CapacityError);
}

TEST(TransitionKernel, NamesTheOffendingRow) {
    Matrix m(2, 2);
    m << 0.5, 0.4, 0.0, 1.0;
    try {
        TransitionKernel k(m);
        FAIL() << "expected MalformedKernel";
    } catch (const MalformedKernel &e) {
        EXPECT_EQ(e.row(), 0u);
    }
    m << 0.5, 0.5, -0.1, 1.1;
    EXPECT_THROW(TransitionKernel{m}, MalformedKernel);
}

TEST(BuildChain, TwoStateAbsorbing) {
    const StateSpace space({0.0, 1.0});
    const auto chain = build_chain(TransitionKernel(two_state(1.0)), space);
    ASSERT_EQ(chain.size(), 1u);
    EXPECT_EQ(chain.q()(0, 0), 0.0);
    EXPECT_EQ(chain.r()(0, 0), 1.0);
    EXPECT_EQ(chain.non_index(), std::vector<std::size_t>{0});
    EXPECT_EQ(chain.opt_index(), std::vector<std::size_t>{1});
}

TEST(BuildChain, RejectsNonAbsorbingOptimum) {
    const StateSpace space({0.0, 1.0});
    Matrix m(2, 2);
    m << 0.5, 0.5, 0.3, 0.7;
    try {
        build_chain(TransitionKernel(m), space);
        FAIL() << "expected AbsorbingViolation";
    } catch (const AbsorbingViolation &e) {
        EXPECT_EQ(e.state(), 1u);
    }
    EXPECT_NO_THROW(build_chain(lump_optimal(TransitionKernel(m), space), space));
}

TEST(BuildChain, Rsh1SquareIsBidiagonalInDescendingOrder) {
    const auto chain = rsh1_square();
    ASSERT_EQ(chain.size(), 100u);
    // Listed from state 99 down to 0 the block is lower bidiagonal: 0.99 on the diagonal,
    // 0.01 just below it.
    const auto m = static_cast<Eigen::Index>(chain.size());
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) {
            const double v = chain.q()(m - 1 - a, m - 1 - b);
            if (a == b)
                EXPECT_DOUBLE_EQ(v, 0.99);
            else if (a == b + 1)
                EXPECT_DOUBLE_EQ(v, 0.01);
            else
                EXPECT_EQ(v, 0.0);
        }
    EXPECT_DOUBLE_EQ(chain.leak()(99), 0.01);
}

TEST(BuildChain, Rsh2SquareRowSumsMatchCaseTable) {
    const auto f = oracle::square();
    const auto chain = make_chain(Algorithm::rsh2, builtin_problem("square"));
    const oracle::Dense q = oracle::q_block(f, 0.01, 0.5);
    for (Eigen::Index i = 0; i < 100; ++i) {
        EXPECT_NEAR(chain.q().row(i).sum(), q.row(i).sum(), 1e-15);
        const double expected = i == 99 ? 0.99 : 1.0;
        EXPECT_NEAR(chain.q().row(i).sum(), expected, 1e-12) << "row " << i;
    }
}

TEST(BuildChain, ReconstructionIsExact) {
    for (const auto &name : builtin_names())
        for (auto algo : {Algorithm::rsh1, Algorithm::rsh2}) {
            const auto problem = builtin_problem(name);
            const auto kernel = make_kernel(algo, problem, default_params(algo));
            const auto chain = build_chain(kernel, problem.state_space());
            EXPECT_TRUE(chain.reconstruct() == kernel.matrix()) << name;
        }
}

TEST(BuildChain, ProbabilityConservationPerRow) {
    // Random sparse stochastic kernels over small spaces with random fitness ties.
    SplitMix64 rng(42);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + uniform_below(rng, 9);
        std::vector<double> f(n);
        for (auto &v : f)
            v = static_cast<double>(uniform_below(rng, 4));
        const StateSpace space(f);
        Matrix m = Matrix::Zero(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            double total = 0.0;
            for (std::size_t j = 0; j < n; ++j)
                if (uniform01(rng) < 0.5) {
                    m(i, j) = uniform01(rng);
                    total += m(i, j);
                }
            if (total == 0.0)
                m(i, i) = total = 1.0;
            m.row(i) /= total;
            Eigen::Index big;
            m.row(i).maxCoeff(&big);
            m(i, big) += 1.0 - m.row(i).sum();
        }
        const auto kernel = lump_optimal(TransitionKernel(m), space);
        const auto chain = build_chain(kernel, space);
        for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(chain.size()); ++i)
            EXPECT_NEAR(chain.q().row(i).sum() + chain.r().row(i).sum(), 1.0, 1e-12);
        EXPECT_TRUE(chain.reconstruct() == kernel.matrix());
    }
}

TEST(LumpOptimal, ReplacesOptimalRowsOnly) {
    const StateSpace space({0.0, 1.0, 0.5});
    Matrix m(3, 3);
    m << 0.5, 0.5, 0.0, 0.3, 0.4, 0.3, 0.0, 0.2, 0.8;
    const auto lumped = lump_optimal(TransitionKernel(m), space);
    EXPECT_EQ(lumped(1, 1), 1.0);
    EXPECT_EQ(lumped(1, 0), 0.0);
    EXPECT_EQ(lumped(1, 2), 0.0);
    EXPECT_TRUE(lumped.matrix().row(0) == m.row(0));
    EXPECT_TRUE(lumped.matrix().row(2) == m.row(2));
}

TEST(LumpOptimal, IdempotentOnAbsorbingKernels) {
    const auto problem = builtin_problem("square");
    const auto kernel = kernel_rsh1(problem, default_params(Algorithm::rsh1));
    EXPECT_TRUE(lump_optimal(kernel, problem.state_space()).matrix() == kernel.matrix());
}

TEST(LumpOptimal, ShiftedSquareRawWalkRowAtOptimum) {
    // The unlumped non-elitist walk at x = 100: only x-1 exists, it is worse, so the
    // raw row is 0.005 to 99 and 0.995 stay.
    const auto f = oracle::shifted_square();
    Matrix raw = Matrix::Zero(101, 101);
    for (std::size_t x = 0; x < 101; ++x) {
        double out = 0.0;
        for (std::size_t y : {x - 1, x + 1}) {
            if (y >= 101)
                continue;
            raw(x, y) = f[y] > f[x] ? 0.01 : 0.005;
            out += raw(x, y);
        }
        raw(x, x) = 1.0 - out;
    }
    EXPECT_DOUBLE_EQ(raw(100, 99), 0.005);
    EXPECT_DOUBLE_EQ(raw(100, 100), 0.995);
    const StateSpace space(f);
    const auto lumped = lump_optimal(TransitionKernel(raw), space);
    EXPECT_EQ(lumped(100, 100), 1.0);
    EXPECT_EQ(lumped(100, 99), 0.0);
}

TEST(Iterate, PointMassNextToOptimum) {
    const auto chain = rsh1_square();
    const auto q1 = iterate(chain, point_mass(chain, 99));
    EXPECT_DOUBLE_EQ(nonopt_probability(q1), 0.99);
    EXPECT_EQ(q1.iteration, 1u);
}

TEST(Iterate, ZeroStaysZero) {
    const auto chain = rsh1_square();
    Distribution zero{RowVector::Zero(100), 3};
    const auto next = iterate(chain, zero);
    EXPECT_EQ(nonopt_probability(next), 0.0);
    EXPECT_EQ(next.iteration, 4u);
}

TEST(Iterate, MatchesDenseMatrixPowers) {
    const auto chain = rsh1_square();
    const oracle::Dense q = oracle::q_block(oracle::square(), 0.01, 0.0);
    Distribution d{RowVector::Constant(100, 0.01), 0};
    const Eigen::RowVectorXd v0 = Eigen::RowVectorXd::Constant(100, 0.01);
    for (std::size_t t = 1; t <= 50; ++t) {
        d = iterate(chain, d);
        const auto expect = oracle::dense_iterate(q, v0, t).sum();
        EXPECT_NEAR(nonopt_probability(d), expect, 1e-12) << "t=" << t;
    }
}

TEST(Iterate, DimensionMismatch) {
    const auto chain = rsh1_square();
    EXPECT_THROW(iterate(chain, Distribution{RowVector::Zero(3), 0}), DimensionMismatch);
}

TEST(Iterate, MassIsMonotone) {
    SplitMix64 rng(7);
    for (const auto &name : builtin_names())
        for (auto algo : {Algorithm::rsh1, Algorithm::rsh2}) {
            const auto chain = make_chain(algo, builtin_problem(name));
            Distribution d{RowVector(static_cast<Eigen::Index>(chain.size())), 0};
            for (Eigen::Index i = 0; i < d.weights.size(); ++i)
                d.weights(i) = uniform01(rng);
            d.weights /= d.weights.sum();
            for (int t = 0; t < 200; ++t) {
                const auto next = iterate(chain, d);
                EXPECT_LE(nonopt_probability(next), nonopt_probability(d) + 1e-15);
                d = next;
            }
        }
}

TEST(Distribution, Helpers) {
    const auto chain = rsh1_square();
    EXPECT_DOUBLE_EQ(nonopt_probability(point_mass(chain, 20)), 1.0);
    EXPECT_EQ(nonopt_probability(point_mass(chain, 100)), 0.0);
    EXPECT_NEAR(nonopt_probability(uniform_initial(chain)), 100.0 / 101.0, 1e-15);
    EXPECT_THROW(point_mass(chain, 101), InputError);
}
