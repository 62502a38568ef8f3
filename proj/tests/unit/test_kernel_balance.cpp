#include "kdb/kernel_balance.hpp"
#include "kdb/sim.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace kdb;
using kdb::testing::uniform;

namespace {

WeightedSample unit(ContactSample s)
{
  return WeightedSample(std::move(s));
}

// Rejection sample from g(x) g(y) with g(x) = (cos(10 pi x) + 3.5) / 3.5.
ContactSample product_sample(std::size_t n, std::uint64_t seed)
{
  Rng rng(seed);
  auto g = [](double x) { return (std::cos(10 * std::numbers::pi * x) + 3.5) / 3.5; };
  const double env = (4.5 / 3.5) * (4.5 / 3.5);
  std::vector<ContactPoint> pts;
  while (pts.size() < n) {
    const double x = uniform01(rng);
    const double y = uniform01(rng);
    if (uniform01(rng) * env < g(x) * g(y))
      pts.push_back({x, y, 1.0});
  }
  return ContactSample(std::move(pts));
}

double sup_diff_after_gauge(const std::vector<double>& a, const std::vector<double>& b)
{
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] / ma - b[i] / mb) * static_cast<double>(a.size()));
  return d;
}

} // namespace

TEST(MarginalKde, SinglePointByHand)
{
  const ContactSample s({{0.4, 0.6, 1.0}});
  const auto r = marginal_kde(unit(s), KernelSpec{0.1, Boundary::none}, Grid1D(5));
  EXPECT_NEAR(r[2], 2.4197072, 1e-7);
}

TEST(MarginalKde, LinearInWeights)
{
  Rng rng(2);
  const auto s = kdb::testing::random_sample(rng, 40, 5);
  std::vector<double> w = kdb::testing::random_positive_vector(rng, s.size(), 0.5, 2.0);
  std::vector<double> w3(w);
  for (auto& v : w3)
    v *= 3.0;
  const KernelSpec k{0.07};
  const auto a = marginal_kde(WeightedSample(s, w), k, Grid1D(64));
  const auto b = marginal_kde(WeightedSample(s, w3), k, Grid1D(64));
  for (std::size_t i = 0; i < 64; ++i)
    EXPECT_NEAR(b[i], 3.0 * a[i], 1e-12 * b[i]);
}

TEST(MarginalKde, MirrorSymmetry)
{
  Rng rng(3);
  std::vector<ContactPoint> pts;
  for (int k = 0; k < 30; ++k) {
    const double x = uniform01(rng), y = uniform01(rng);
    pts.push_back({x, y, 2.0});
    pts.push_back({1 - y, 1 - x, 2.0});
  }
  for (auto b : {Boundary::none, Boundary::reflect}) {
    const auto r = marginal_kde(unit(ContactSample(pts)), KernelSpec{0.05, b}, Grid1D(50));
    for (std::size_t i = 0; i < 50; ++i)
      EXPECT_NEAR(r[i], r[49 - i], 1e-12 * r[i]);
  }
}

TEST(MarginalKde, StrictlyPositive)
{
  Rng rng(4);
  for (int t = 0; t < 20; ++t) {
    const auto s = kdb::testing::random_sample(rng, 1 + rng() % 5);
    const double h = uniform(rng, 0.03, 0.2);
    for (auto b : {Boundary::none, Boundary::reflect}) {
      const auto r = marginal_kde(unit(s), KernelSpec{h, b}, Grid1D(128));
      EXPECT_GT(r.min(), 0.0);
    }
  }
}

TEST(MarginalKde, Errors)
{
  EXPECT_THROW(marginal_kde(unit(ContactSample()), KernelSpec{0.1}, Grid1D(8)), Error);
  EXPECT_THROW(marginal_kde(unit(ContactSample({{0.1, 0.2, 1}})), KernelSpec{0.0}, Grid1D(8)), Error);
}

TEST(Kde2d, SymmetricAtSinglePoint)
{
  const ContactSample s({{0.4, 0.6, 1.0}});
  const KernelSpec k{0.1, Boundary::none};
  EXPECT_DOUBLE_EQ(kde_2d_at(unit(s), k, 0.4, 0.6), kde_2d_at(unit(s), k, 0.6, 0.4));
  const auto f = kde_2d(unit(s), k, Grid1D(10));
  EXPECT_TRUE(f.is_exactly_symmetric());
  EXPECT_TRUE(f.symmetric());
}

TEST(Kde2d, GridMatchesPointEvaluation)
{
  Rng rng(5);
  const auto s = kdb::testing::random_sample(rng, 25, 3);
  const Grid1D grid(40);
  for (auto b : {Boundary::none, Boundary::reflect}) {
    const KernelSpec k{0.08, b};
    const auto f = kde_2d(unit(s), k, grid);
    for (std::size_t i = 0; i < 40; i += 3)
      for (std::size_t j = 0; j < 40; j += 5) {
        const double want = kde_2d_at(unit(s), k, grid.center(i), grid.center(j));
        EXPECT_NEAR(f(i, j), want, 1e-12 * want);
      }
  }
}

// Integrating the 2D estimate over one axis reproduces the 1D marginal.
TEST(Kde2d, MarginalIdentityExtendedQuadrature)
{
  Rng rng(6);
  for (int t = 0; t < 5; ++t) {
    const auto s = kdb::testing::random_sample(rng, 1 + rng() % 10);
    const double h = uniform(rng, 0.03, 0.15);
    const KernelSpec k{h, Boundary::none};
    const Grid1D grid(32);
    const auto r = marginal_kde(unit(s), k, grid);
    const double lo = -8 * h, hi = 1 + 8 * h;
    const int steps = static_cast<int>(std::ceil((hi - lo) / (h / 6)));
    const double dy = (hi - lo) / steps;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double q = 0;
      for (int j = 0; j < steps; ++j)
        q += kde_2d_at(unit(s), k, grid.center(i), lo + (j + 0.5) * dy);
      EXPECT_NEAR(q * dy, r[i], 1e-6);
    }
  }
}

TEST(Kde2d, MarginalIdentityReflectedOnUnitInterval)
{
  Rng rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto s = kdb::testing::random_sample(rng, 1 + rng() % 30, 4);
    const double h = uniform(rng, 0.01, 0.15);
    const KernelSpec k{h, Boundary::reflect};
    const Grid1D grid(256);
    const auto r = marginal_kde(unit(s), k, grid);
    const auto rows = kde_2d(unit(s), k, grid).row_quadrature();
    for (std::size_t i = 0; i < grid.size(); ++i)
      EXPECT_NEAR(rows[i], r[i], 1e-6);
  }
}

TEST(Kde2d, TotalMassOnExtendedPlane)
{
  Rng rng(8);
  const auto s = kdb::testing::random_sample(rng, 6);
  const double h = 0.1;
  const KernelSpec k{h, Boundary::none};
  const double lo = -8 * h, hi = 1 + 8 * h;
  const int steps = 130;
  const double d = (hi - lo) / steps;
  double q = 0;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j)
      q += kde_2d_at(unit(s), k, lo + (i + 0.5) * d, lo + (j + 0.5) * d);
  EXPECT_NEAR(q * d * d, 1.0, 1e-6);
}

TEST(KskBalance, UniformSampleGivesFlatBias)
{
  Rng rng(9);
  const auto s = kdb::testing::random_sample(rng, 20000);
  const auto r = ksk_balance(s, KernelSpec{0.05}, Grid1D(128));
  ASSERT_TRUE(r.converged());
  EXPECT_NEAR(quadrature_1d(r.bias), 1.0, 1e-9);
  for (std::size_t i = 0; i < r.bias.size(); ++i)
    EXPECT_NEAR(r.bias[i], 1.0, 0.1);
}

TEST(KskBalance, MirrorEquivariance)
{
  Rng rng(10);
  std::vector<ContactPoint> pts;
  for (int k = 0; k < 300; ++k) {
    const double x = uniform01(rng), y = uniform01(rng);
    pts.push_back({x, y, 1.0});
    pts.push_back({1 - y, 1 - x, 1.0});
  }
  const auto r = ksk_balance(ContactSample(pts), KernelSpec{0.06}, Grid1D(100), KskOptions{1e-10});
  for (std::size_t i = 0; i < 100; ++i)
    EXPECT_NEAR(r.bias[i], r.bias[99 - i], 1e-9);
}

TEST(KskBalance, MatchesGridBalancerOnKde)
{
  const auto s = product_sample(50000, 31);
  const Grid1D grid(256);
  const KernelSpec k{0.02, Boundary::reflect, 10.0};
  const auto ksk = ksk_balance(s, k, grid, KskOptions{1e-10});
  ASSERT_TRUE(ksk.converged());
  const auto cssk = cssk_grid_balance(kde_2d(unit(s), k, grid), 1e-10);
  ASSERT_TRUE(cssk.converged());
  EXPECT_LT(sup_diff_after_gauge(ksk.balancing.values(), cssk.balancing.values()), 1e-6);
}

TEST(KskBalance, ResidualIsMonotone)
{
  Rng rng(11);
  for (int t = 0; t < 8; ++t) {
    const auto s = kdb::testing::random_sample(rng, 200 + rng() % 2000, 3);
    const auto r = ksk_balance(s, KernelSpec{uniform(rng, 0.02, 0.2)}, Grid1D(128), KskOptions{1e-9});
    ASSERT_GE(r.residual_history.size(), 1u);
    EXPECT_EQ(r.residual_history.size(), r.iterations + 1);
    for (std::size_t i = 1; i < r.residual_history.size(); ++i)
      EXPECT_LE(r.residual_history[i], r.residual_history[i - 1] * (1 + 1e-12));
  }
}

TEST(KskBalance, CountScalingIsBitExact)
{
  Rng rng(12);
  const auto s = kdb::testing::random_sample(rng, 500, 7);
  std::vector<ContactPoint> scaled(s.points());
  for (auto& p : scaled)
    p.count *= 3.0;
  const KernelSpec k{0.05};
  const auto a = ksk_balance(s, k, Grid1D(64));
  const auto b = ksk_balance(ContactSample(scaled), k, Grid1D(64));
  EXPECT_EQ(a.bias.values(), b.bias.values());
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(KskBalance, ConvergesAndReportsAccumulator)
{
  Rng rng(13);
  const auto s = kdb::testing::random_sample(rng, 3000);
  const auto r = ksk_balance(s, KernelSpec{0.05}, Grid1D(64));
  ASSERT_TRUE(r.converged());
  EXPECT_LE(r.residual, 1e-6);
  EXPECT_GT(r.bias.min(), 0.0);
  EXPECT_EQ(r.bandwidth, 0.05);
  // G = h^-2 for the exact update.
  for (std::size_t i = 0; i < 64; ++i)
    EXPECT_NEAR(r.accumulator[i] * r.balancing[i] * r.balancing[i], 1.0, 1e-9);
}

TEST(KskBalance, PointWeightsAppliedBiasRestatesGuard)
{
  Rng rng(14);
  const auto s = kdb::testing::random_sample(rng, 1500);
  const Grid1D grid(64);
  const KernelSpec k{0.15};
  const KskOptions opts{1e-5, 5000, KskUpdate::point_weights};
  const auto r = ksk_balance(s, k, grid, opts);
  ASSERT_TRUE(r.converged()) << r.residual;
  const auto m = marginal_kde(apply_bias(s, r.accumulator), k, grid);
  for (std::size_t i = 0; i < 64; ++i)
    EXPECT_LE(std::abs(m[i] - 1.0), opts.tol);
}

TEST(KskBalance, IterationCap)
{
  Rng rng(15);
  const auto s = kdb::testing::random_sample(rng, 500);
  const auto r = ksk_balance(s, KernelSpec{0.02}, Grid1D(64), KskOptions{1e-14, 2});
  EXPECT_EQ(r.status, Status::max_iterations);
  EXPECT_EQ(r.iterations, 2u);
}

TEST(KskBalance, Errors)
{
  EXPECT_THROW(ksk_balance(ContactSample(), KernelSpec{0.1}, Grid1D(8)), Error);
  try {
    ksk_balance(ContactSample({{0.01, 0.02, 1}}), KernelSpec{0.001}, Grid1D(512));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kernel_underflow);
  }
}

TEST(CsskGrid, ConstantIsBalanced)
{
  const Grid1D g(16);
  const auto r = cssk_grid_balance(GridFunction2D(g, std::vector<double>(256, 1.0), true));
  EXPECT_EQ(r.iterations, 0u);
  for (double v : r.balanced.values())
    EXPECT_EQ(v, 1.0);
  for (double v : r.balancing.values())
    EXPECT_EQ(v, 1.0);
}

TEST(CsskGrid, ProductDensity)
{
  const Grid1D g(64);
  auto gt = GridFunction1D::sample(g, [](double x) { return std::cos(10 * std::numbers::pi * x) + 3.5; });
  gt = normalize_unit_mean(gt);
  std::vector<double> f(64 * 64);
  for (std::size_t i = 0; i < 64; ++i)
    for (std::size_t j = 0; j < 64; ++j)
      f[i * 64 + j] = gt[i] * gt[j];
  const auto r = cssk_grid_balance(GridFunction2D(g, f, true), 1e-12);
  ASSERT_TRUE(r.converged());
  for (double v : r.balanced.values())
    EXPECT_NEAR(v, 1.0, 1e-10);
  std::vector<double> inv(64);
  for (std::size_t i = 0; i < 64; ++i)
    inv[i] = 1.0 / gt[i];
  EXPECT_LT(sup_diff_after_gauge(r.balancing.values(), inv), 1e-10);
}

TEST(CsskGrid, Errors)
{
  const Grid1D g(2);
  EXPECT_THROW(cssk_grid_balance(GridFunction2D(g, {1, 0, 0, 1}, true)), Error);
  EXPECT_THROW(cssk_grid_balance(GridFunction2D(g, {1, 2, 3, 1}, false)), Error);
}

TEST(ApplyBias, Examples)
{
  Rng rng(16);
  const auto s = kdb::testing::random_sample(rng, 20);
  const auto a = apply_bias(s, GridFunction1D::constant(Grid1D(8), 1.0));
  for (double w : a.weights())
    EXPECT_EQ(w, 1.0);
  const auto b = apply_bias(s, GridFunction1D::constant(Grid1D(8), 4.0));
  for (double w : b.weights())
    EXPECT_EQ(w, 0.25);
  EXPECT_THROW(apply_bias(s, [](double) { return 0.0; }), Error);
  EXPECT_THROW(apply_bias(s, GridFunction1D::constant(Grid1D(8), -1.0)), Error);
}
