#include "kdb/matrix_balance.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace kdb;
using kdb::testing::uniform;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d)
{
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

double max_abs(const Eigen::MatrixXd& m)
{
  return m.cwiseAbs().maxCoeff();
}

ErrorCode code_of(const std::function<void()>& f)
{
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no kdb::Error thrown";
  return ErrorCode::invalid_argument;
}

// Independent fixed-point iteration x <- sqrt(x / (Cx)) on a 2x2 matrix.
std::pair<double, double> fixed_point_2x2(double a, double b, double d)
{
  double x = 1.0, y = 1.0;
  for (int i = 0; i < 100000; ++i) {
    const double nx = std::sqrt(x / (a * x + b * y));
    const double ny = std::sqrt(y / (b * x + d * y));
    const bool done = std::abs(nx - x) < 1e-16 && std::abs(ny - y) < 1e-16;
    x = nx;
    y = ny;
    if (done)
      break;
  }
  return {x, y};
}

} // namespace

TEST(SkBalance, ConstantMatrix)
{
  const auto r = sk_balance(mat2(1, 1, 1, 1));
  EXPECT_TRUE(r.converged());
  EXPECT_LT(max_abs(r.balanced - Eigen::MatrixXd::Constant(2, 2, 0.5)), 1e-12);
}

TEST(SkBalance, DoublyStochasticIsFixedPoint)
{
  const Eigen::MatrixXd c = mat2(0.3, 0.7, 0.7, 0.3);
  const auto r = sk_balance(c);
  EXPECT_EQ(r.iterations, 0u);
  EXPECT_LT(max_abs(r.balanced - c), 1e-15);
  for (int i = 0; i < 2; ++i)
    EXPECT_NEAR(r.row_scaling(i) * r.col_scaling(i), 1.0, 1e-15);
}

TEST(SkBalance, AgreesWithSymmetricBalancer)
{
  const Eigen::MatrixXd c = mat2(2, 1, 1, 3);
  const auto a = sk_balance(c, BalanceOptions{1e-12});
  const auto b = ssk_balance(SymmetricMatrix(c), BalanceOptions{1e-12});
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(2);
  EXPECT_LT((a.balanced * ones - ones).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((a.balanced.transpose() * ones - ones).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(max_abs(a.balanced - b.balanced), 1e-8);
}

TEST(SkBalance, Errors)
{
  EXPECT_EQ(code_of([] { sk_balance(mat2(1, 0, 1, 1)); }), ErrorCode::not_strictly_positive);
  EXPECT_EQ(code_of([] { sk_balance(Eigen::MatrixXd::Ones(2, 3)); }), ErrorCode::dimension_mismatch);
  EXPECT_EQ(code_of([] { sk_balance(mat2(1, 1, 1, 1), BalanceOptions{0.0}); }), ErrorCode::invalid_argument);
}

TEST(SkBalance, IterationCapReportsResidual)
{
  Rng rng(1);
  const Eigen::MatrixXd c = kdb::testing::random_positive(rng, 8, 0.01, 100.0);
  const auto r = sk_balance(c, BalanceOptions{1e-14, 1});
  EXPECT_EQ(r.status, Status::max_iterations);
  EXPECT_EQ(r.iterations, 1u);
  EXPECT_GT(r.residual, 1e-14);
}

TEST(SkBalance, UniqueUpToScalar)
{
  Rng rng(9);
  for (int t = 0; t < 30; ++t) {
    const auto n = static_cast<Eigen::Index>(2 + rng() % 12);
    const Eigen::MatrixXd c = kdb::testing::random_positive(rng, n, 0.1, 10.0);
    Eigen::VectorXd start(n);
    for (Eigen::Index i = 0; i < n; ++i)
      start(i) = uniform(rng, 0.1, 10.0);
    const BalanceOptions opts{1e-13};
    const auto a = sk_balance(c, opts);
    const auto b = sk_balance(c, start, opts);
    ASSERT_TRUE(a.converged() && b.converged());
    EXPECT_LT(max_abs(a.balanced - b.balanced), 1e-8);
    const Eigen::VectorXd ratio1 = a.row_scaling.cwiseQuotient(b.row_scaling);
    const Eigen::VectorXd ratio2 = b.col_scaling.cwiseQuotient(a.col_scaling);
    EXPECT_LT((ratio1.array() / ratio1(0) - 1.0).abs().maxCoeff(), 1e-8);
    EXPECT_LT((ratio2.array() / ratio1(0) - 1.0).abs().maxCoeff(), 1e-8);
  }
}

TEST(SkScale, Examples)
{
  const Eigen::VectorXd one2 = Eigen::VectorXd::Ones(2);
  const auto a = sk_scale(mat2(1, 1, 1, 1), one2, one2);
  EXPECT_LT(max_abs(a.balanced - Eigen::MatrixXd::Constant(2, 2, 0.5)), 1e-12);

  Eigen::VectorXd r(2);
  r << 1.5, 0.5;
  const auto b = sk_scale(mat2(1, 1, 1, 1), r, one2);
  EXPECT_LT(max_abs(b.balanced - mat2(0.75, 0.75, 0.25, 0.25)), 1e-12);
}

TEST(SkScale, RandomTargets)
{
  Rng rng(17);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXd c = kdb::testing::random_positive(rng, 5, 0.1, 10.0);
    Eigen::VectorXd r(5), col(5);
    for (int i = 0; i < 5; ++i) {
      r(i) = uniform(rng, 0.5, 3.0);
      col(i) = uniform(rng, 0.5, 3.0);
    }
    col *= r.sum() / col.sum();
    const auto res = sk_scale(c, r, col, BalanceOptions{1e-12});
    ASSERT_TRUE(res.converged());
    EXPECT_LT((res.balanced.rowwise().sum() - r).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((res.balanced.colwise().sum().transpose() - col).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(SkScale, MarginalMismatch)
{
  Eigen::VectorXd r(2), c(2);
  r << 1.0, 1.0;
  c << 1.0, 1.5;
  EXPECT_EQ(code_of([&] { sk_scale(mat2(1, 1, 1, 1), r, c); }), ErrorCode::marginal_mismatch);
}

TEST(SskBalance, Examples)
{
  const auto a = ssk_balance(SymmetricMatrix(mat2(1, 2, 2, 1)));
  EXPECT_NEAR(a.row_scaling(0), 1.0 / std::sqrt(3.0), 1e-9);
  EXPECT_NEAR(a.row_scaling(1), 1.0 / std::sqrt(3.0), 1e-9);
  EXPECT_LT(max_abs(a.balanced - mat2(1.0 / 3, 2.0 / 3, 2.0 / 3, 1.0 / 3)), 1e-9);

  const auto b = ssk_balance(SymmetricMatrix(mat2(1, 1, 1, 1)));
  EXPECT_NEAR(b.row_scaling(0), 1.0 / std::sqrt(2.0), 1e-9);
  EXPECT_NEAR(b.row_scaling(1), 1.0 / std::sqrt(2.0), 1e-9);

  const auto c = ssk_balance(SymmetricMatrix(mat2(2, 1, 1, 3)), BalanceOptions{1e-14});
  const auto [x, y] = fixed_point_2x2(2, 1, 3);
  EXPECT_NEAR(c.row_scaling(0), x, 1e-10);
  EXPECT_NEAR(c.row_scaling(1), y, 1e-10);
}

TEST(SskBalance, Errors)
{
  EXPECT_EQ(code_of([] { ssk_balance(SymmetricMatrix(mat2(0, 0, 0, 1))); }), ErrorCode::zero_row_sum);
  EXPECT_EQ(code_of([] { ssk_balance(SymmetricMatrix(mat2(0, 1, 1, 1))); }), ErrorCode::not_strictly_positive);
  EXPECT_THROW(SymmetricMatrix(mat2(1, 2, 3, 1)), Error);
  EXPECT_THROW(SymmetricMatrix(mat2(1, -2, -2, 1)), Error);
}

TEST(SskBalance, ResultInvariants)
{
  Rng rng(4);
  for (int t = 0; t < 40; ++t) {
    const auto n = static_cast<Eigen::Index>(3 + rng() % 30);
    const SymmetricMatrix c = kdb::testing::random_symmetric(rng, n, 0.1, 10.0);
    const auto r = ssk_balance(c);
    ASSERT_TRUE(r.converged());
    EXPECT_LE(r.residual, 1e-8);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        const double want = r.row_scaling(i) * c.matrix()(i, j) * r.row_scaling(j);
        EXPECT_NEAR(r.balanced(i, j), want, 1e-12 * want);
      }
  }
}

TEST(SskBalance, EveryIterateIsSymmetric)
{
  Rng rng(8);
  const SymmetricMatrix c = kdb::testing::random_symmetric(rng, 25, 0.1, 10.0);
  BalanceOptions opts;
  std::size_t calls = 0;
  opts.on_iterate = [&](std::size_t, const Eigen::MatrixXd& p) {
    ++calls;
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      for (Eigen::Index j = 0; j < p.cols(); ++j)
        ASSERT_EQ(p(i, j), p(j, i));
  };
  const auto r = ssk_balance(c, opts);
  EXPECT_EQ(calls, r.iterations);
  EXPECT_GT(calls, 0u);
}

TEST(SskBalance, FixedPointOfOperator)
{
  Rng rng(12);
  for (int t = 0; t < 30; ++t) {
    const auto n = static_cast<Eigen::Index>(2 + rng() % 20);
    const SymmetricMatrix c = kdb::testing::random_symmetric(rng, n, 0.1, 10.0);
    const BalanceOptions opts{1e-10};
    const auto r = ssk_balance(c, opts);
    const std::vector<double> d(r.row_scaling.data(), r.row_scaling.data() + n);
    const auto td = balance_operator_step(c, PositiveVector(d));
    for (Eigen::Index i = 0; i < n; ++i)
      EXPECT_LE(std::abs(td[static_cast<std::size_t>(i)] - d[static_cast<std::size_t>(i)]), 10 * opts.tol);
  }
}

TEST(SskBalance, MatchesVectorIteration)
{
  Rng rng(13);
  const SymmetricMatrix c = kdb::testing::random_symmetric(rng, 12, 0.1, 10.0);
  const auto r = ssk_balance(c, BalanceOptions{1e-13});
  PositiveVector x(std::vector<double>(12, 1.0));
  for (int i = 0; i < 2000; ++i)
    x = balance_operator_step(c, x);
  for (Eigen::Index i = 0; i < 12; ++i)
    EXPECT_NEAR(r.row_scaling(i), x[static_cast<std::size_t>(i)], 1e-11);
}

TEST(SskBalance, GershgorinLowerBound)
{
  Rng rng(14);
  int checked = 0;
  for (int t = 0; t < 60; ++t) {
    const auto n = static_cast<Eigen::Index>(2 + rng() % 19);
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i; j < n; ++j)
        c(i, j) = c(j, i) = uniform(rng, 0.1, 1.0);
    for (Eigen::Index i = 0; i < n; ++i)
      c(i, i) = uniform(rng, 2.0, 4.0) * static_cast<double>(n);
    const auto r = ssk_balance(SymmetricMatrix(c), BalanceOptions{1e-12});
    double bound = 1.0;
    for (Eigen::Index i = 0; i < n; ++i)
      bound = std::min(bound, 2 * r.balanced(i, i) - 1);
    if (bound <= 0)
      continue;
    ++checked;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r.balanced);
    EXPECT_GE(eig.eigenvalues().minCoeff(), bound - 1e-10);
  }
  EXPECT_GT(checked, 30);
}

TEST(SskBalance, PerturbationIsLipschitz)
{
  Rng rng(15);
  const Eigen::Index n = 10;
  const double big_m = 20.0;
  const SymmetricMatrix c = kdb::testing::random_symmetric(rng, n, 1.0, big_m);
  Eigen::MatrixXd e(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      e(i, j) = e(j, i) = uniform(rng, -1.0, 1.0);
  e /= e.norm();
  const BalanceOptions opts{1e-14, 100000};
  const auto base = ssk_balance(c, opts);
  std::vector<double> ks;
  for (double delta : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const auto pert = ssk_balance(SymmetricMatrix(c.matrix() + delta * e), opts);
    ks.push_back((base.row_scaling - pert.row_scaling).norm() / delta);
  }
  for (double k : ks) {
    EXPECT_GT(k, 0.0);
    EXPECT_LT(k, 10.0);
  }
  // The ratio settles as delta shrinks.
  EXPECT_NEAR(ks[3] / ks[2], 1.0, 0.05);
  EXPECT_NEAR(ks[2] / ks[1], 1.0, 0.05);
}

TEST(BalanceOperator, Examples)
{
  const SymmetricMatrix c(mat2(1, 2, 2, 1));
  const auto y = balance_operator_step(c, PositiveVector({1.0, 1.0}));
  EXPECT_NEAR(y[0], 1.0 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(y[1], 1.0 / std::sqrt(3.0), 1e-15);
  const auto z = balance_operator_step(c, y);
  EXPECT_NEAR(z[0], y[0], 1e-12);
  EXPECT_NEAR(z[1], y[1], 1e-12);
  EXPECT_EQ(code_of([&] { balance_operator_step(c, PositiveVector({1.0, 1.0, 1.0})); }),
            ErrorCode::dimension_mismatch);
}

TEST(BalanceOperator, ContractsHilbertDistance)
{
  Rng rng(16);
  for (int t = 0; t < 300; ++t) {
    const auto n = static_cast<std::size_t>(2 + rng() % 15);
    const SymmetricMatrix c = kdb::testing::random_symmetric(rng, static_cast<Eigen::Index>(n), 0.1, 10.0);
    const PositiveVector x(kdb::testing::random_positive_vector(rng, n));
    const PositiveVector y(kdb::testing::random_positive_vector(rng, n));
    EXPECT_LT(hilbert_distance(balance_operator_step(c, x), balance_operator_step(c, y)),
              hilbert_distance(x, y));
  }
}

TEST(HistogramBias, Examples)
{
  MatrixBalanceResult r;
  r.row_scaling = Eigen::VectorXd::Constant(4, 0.3);
  const auto g = histogram_bias(r, Grid1D(4));
  for (std::size_t i = 0; i < 4; ++i)
    EXPECT_NEAR(g[i], 1.0, 1e-15);

  r.row_scaling = Eigen::VectorXd(2);
  r.row_scaling << 1.0, 2.0;
  const auto h = histogram_bias(r, Grid1D(2));
  EXPECT_NEAR(h[0], 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(h[1], 2.0 / 3.0, 1e-15);
  EXPECT_THROW(histogram_bias(r, Grid1D(3)), Error);
}
