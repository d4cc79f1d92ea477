#include <gtest/gtest.h>

#include <optional>

#include "lesc/lrr.hpp"
#include "support.hpp"

using namespace lesc;
using lesc::testing::max_abs_diff;

namespace {

Matrix clean_low_rank(std::uint64_t seed) { return lesc::testing::low_rank(20, 60, 3, seed); }

} // namespace

TEST(SolveLrr, MatchesDenseReference) {
    const Matrix X = lesc::testing::low_rank(6, 15, 3, 5) + 0.05 * lesc::testing::random_matrix(6, 15, 6);
    LrrConfig cfg;
    cfg.lambda2 = 0.3;
    const auto sol = solve_lrr(X, cfg);
    const auto ref = lesc::testing::reference_lrr(X, cfg.lambda2, cfg.mu0, cfg.mu_max, cfg.rho_scale, cfg.tol,
                                                  static_cast<int>(cfg.max_iter));
    ASSERT_TRUE(sol.trace.converged);
    ASSERT_TRUE(ref.converged);
    EXPECT_EQ(sol.trace.iterations, ref.residuals.size());
    const std::size_t shared = std::min(sol.trace.residuals.size(), ref.residuals.size());
    for (std::size_t i = 0; i < shared; ++i) {
        EXPECT_NEAR(sol.trace.residuals[i], ref.residuals[i], 1e-8 * std::max(1.0, ref.residuals[i])) << i;
    }
    EXPECT_LT(max_abs_diff(sol.C, ref.C), 1e-7);
    EXPECT_LT(max_abs_diff(sol.E, ref.E), 1e-7);
}

TEST(SolveLrr, FullRankFeaturesMatchReference) {
    // q > n: the instance basis is the whole space.
    const Matrix X = lesc::testing::random_matrix(12, 8, 41);
    LrrConfig cfg;
    const auto sol = solve_lrr(X, cfg);
    const auto ref = lesc::testing::reference_lrr(X, cfg.lambda2, cfg.mu0, cfg.mu_max, cfg.rho_scale, cfg.tol, 500);
    EXPECT_EQ(sol.trace.iterations, ref.residuals.size());
    EXPECT_LT(max_abs_diff(sol.C, ref.C), 1e-7);
}

TEST(SolveLrr, OrthogonalLinesGiveBlockDiagonal) {
    // 10 multiples of e1 and 10 of e2 in R^4.
    Matrix X = Matrix::Zero(4, 20);
    const Matrix w = lesc::testing::random_matrix(1, 20, 12);
    for (int j = 0; j < 10; ++j) X(0, j) = 1.0 + std::abs(w(0, j));
    for (int j = 10; j < 20; ++j) X(1, j) = 1.0 + std::abs(w(0, j));
    const auto sol = solve_lrr(X, LrrConfig{});
    EXPECT_TRUE(sol.trace.converged);
    EXPECT_GE(lesc::testing::block_mass(sol.C, 10), 0.9);
}

TEST(SolveLrr, LargePenaltySuppressesCorruption) {
    const Matrix X = clean_low_rank(3);
    LrrConfig cfg;
    cfg.lambda2 = 1e3;
    const auto sol = solve_lrr(X, cfg);
    EXPECT_LT(sol.E.norm() / X.norm(), 1e-3);
    EXPECT_LT((X - X * sol.C).norm() / X.norm(), 1e-3);
}

TEST(SolveLrr, DuplicateColumnsAndPermutationSymmetry) {
    Matrix X = lesc::testing::random_matrix(5, 12, 99);
    X.col(7) = X.col(2);
    LrrConfig cfg;
    const auto sol = solve_lrr(X, cfg);
    ASSERT_TRUE(sol.trace.converged);
    EXPECT_LE((X - X * sol.C - sol.E).cwiseAbs().maxCoeff(), cfg.tol);

    Matrix swapped = X;
    swapped.col(2).swap(swapped.col(5));
    const auto other = solve_lrr(swapped, cfg);
    EXPECT_NEAR(lrr_objective(sol.C, sol.E, cfg.lambda2), lrr_objective(other.C, other.E, cfg.lambda2), 1e-6);
}

TEST(SolveLrr, SubproblemsAreSolvedExactly) {
    const Matrix X = lesc::testing::low_rank(6, 14, 2, 17) + 0.1 * lesc::testing::random_matrix(6, 14, 18);
    LrrConfig cfg;
    cfg.lambda2 = 0.2;
    const Eigen::Index n = X.cols();
    Matrix prevC = Matrix::Zero(n, n), prevY2 = Matrix::Zero(n, n);
    Matrix prevE = Matrix::Zero(X.rows(), n), prevY1 = Matrix::Zero(X.rows(), n);
    double last_mu = 0.0;
    std::size_t seen = 0;
    solve_lrr(X, cfg, [&](const LrrIterate& s) {
        ++seen;
        const double mu = s.mu;
        EXPECT_GE(mu, last_mu);
        EXPECT_LE(mu, cfg.mu_max);
        last_mu = mu;
        // J = svt(C + Y2/mu, 1/mu) from the previous state.
        EXPECT_LT(max_abs_diff(s.J, lesc::testing::oracle_svt<Matrix>(prevC + prevY2 / mu, 1.0 / mu)), 1e-8);
        // mu (I + X^T X) C = mu J - Y2 + X^T Y1 + mu (X^T X - X^T E)
        const Matrix lhs = mu * (Matrix::Identity(n, n) + X.transpose() * X) * s.C;
        const Matrix rhs = mu * s.J - prevY2 + X.transpose() * prevY1 + mu * (X.transpose() * X - X.transpose() * prevE);
        EXPECT_LT((lhs - rhs).norm(), 1e-8 * std::max(1.0, rhs.norm()));
        const Matrix T = X - X * s.C + prevY1 / mu;
        for (Eigen::Index j = 0; j < n; ++j) {
            const Eigen::VectorXd want = lesc::testing::oracle_column_prox(T.col(j), cfg.lambda2 / mu);
            EXPECT_LT((s.E.col(j) - want).cwiseAbs().maxCoeff(), 1e-8);
        }
        // Multiplier ascent.
        EXPECT_LT(max_abs_diff(s.Y1, prevY1 + mu * (X - X * s.C - s.E)), 1e-8 * std::max(1.0, s.Y1.norm()));
        EXPECT_LT(max_abs_diff(s.Y2, prevY2 + mu * (s.C - s.J)), 1e-8 * std::max(1.0, s.Y2.norm()));
        prevC = s.C;
        prevE = s.E;
        prevY1 = s.Y1;
        prevY2 = s.Y2;
    });
    EXPECT_GT(seen, 10u);
}

TEST(SolveLrr, FeasibleWhenConverged) {
    const Matrix X = clean_low_rank(8);
    LrrConfig cfg;
    const auto sol = solve_lrr(X, cfg);
    ASSERT_TRUE(sol.trace.converged);
    EXPECT_EQ(sol.trace.residuals.size(), sol.trace.iterations);
    EXPECT_LE(sol.trace.residuals.back(), cfg.tol);
    EXPECT_LE((X - X * sol.C - sol.E).norm(), cfg.tol * std::sqrt(static_cast<double>(X.size())));
    for (std::size_t i = 1; i < sol.trace.penalties.size(); ++i) {
        EXPECT_GE(sol.trace.penalties[i], sol.trace.penalties[i - 1]);
    }
}

TEST(SolveLrr, PenaltyIsCapped) {
    const Matrix X = clean_low_rank(9);
    LrrConfig cfg;
    cfg.mu_max = 1e-2;
    cfg.max_iter = 120;
    const auto sol = solve_lrr(X, cfg);
    for (const double mu : sol.trace.penalties) EXPECT_LE(mu, cfg.mu_max);
    EXPECT_EQ(sol.trace.penalties.back(), cfg.mu_max);
}

TEST(SolveLrr, IterationCapReportsNonConvergence) {
    LrrConfig cfg;
    cfg.max_iter = 3;
    const auto sol = solve_lrr(clean_low_rank(4), cfg);
    EXPECT_FALSE(sol.trace.converged);
    EXPECT_EQ(sol.trace.iterations, 3u);
    EXPECT_EQ(sol.trace.residuals.size(), 3u);
    EXPECT_TRUE(sol.C.allFinite());
}

TEST(SolveLrr, Deterministic) {
    const Matrix X = clean_low_rank(10);
    const auto a = solve_lrr(X, LrrConfig{});
    const auto b = solve_lrr(X, LrrConfig{});
    EXPECT_EQ(a.trace.residuals, b.trace.residuals);
    EXPECT_TRUE((a.C.array() == b.C.array()).all());
}

TEST(SolveLrr, RejectsBadInput) {
    EXPECT_THROW(solve_lrr(Matrix::Ones(3, 1), LrrConfig{}), ArgumentError);
    EXPECT_THROW(solve_lrr(Matrix::Zero(3, 4), LrrConfig{}), ArgumentError);
    Matrix nan = Matrix::Ones(2, 3);
    nan(0, 0) = std::nan("");
    EXPECT_THROW(solve_lrr(nan, LrrConfig{}), ArgumentError);
    const Matrix X = Matrix::Identity(3, 3);
    auto bad = [&](auto edit) {
        LrrConfig c;
        edit(c);
        EXPECT_THROW(solve_lrr(X, c), ArgumentError);
    };
    bad([](LrrConfig& c) { c.lambda2 = 0; });
    bad([](LrrConfig& c) { c.mu0 = 2e6; });
    bad([](LrrConfig& c) { c.rho_scale = 1.0; });
    bad([](LrrConfig& c) { c.tol = 0; });
    bad([](LrrConfig& c) { c.max_iter = 0; });
}
