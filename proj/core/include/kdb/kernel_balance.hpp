#pragma once

#include "kdb/contact_sample.hpp"
#include "kdb/error.hpp"
#include "kdb/grid.hpp"
#include "kdb/kernel.hpp"

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace kdb {

// r(x) = 1/(2 N h) sum_k c_k w_k [K((x-X_k)/h) + K((x-Y_k)/h)] at the grid centers.
GridFunction1D marginal_kde(const WeightedSample& sample, const KernelSpec& kernel, const Grid1D& grid);

// Symmetrized product-kernel density on the grid, exactly symmetric.
GridFunction2D kde_2d(const WeightedSample& sample, const KernelSpec& kernel, const Grid1D& grid);

// The same density at an arbitrary point.
double kde_2d_at(const WeightedSample& sample, const KernelSpec& kernel, double x, double y);

enum class KskUpdate
{
  // Scale h <- h / sqrt(r) where r is the marginal of h(x) f(x,y) h(y) for
  // the sample's own kernel density f. Converges like the grid balancer.
  exact_marginal,
  // Per-point weights w_k = 1/sqrt(G(X_k) G(Y_k)) with G the running product
  // of weighted 1D marginals, G interpolated at the sample positions.
  point_weights
};

struct KskOptions
{
  double tol = 1e-6;
  std::size_t max_iter = 500;
  KskUpdate update = KskUpdate::exact_marginal;
};

struct KernelBalanceResult
{
  KernelBalanceResult(GridFunction1D b, GridFunction1D h, GridFunction1D g)
    : bias(std::move(b)), balancing(std::move(h)), accumulator(std::move(g))
  {}

  GridFunction1D bias;         // unit mean
  GridFunction1D balancing;    // the function h actually applied
  GridFunction1D accumulator;  // running product of marginals
  double bandwidth = 0.0;
  std::size_t iterations = 0;
  double residual = 0.0;       // max over grid centers of |r - 1|
  Status status = Status::converged;
  std::vector<double> residual_history;

  bool converged() const noexcept { return status == Status::converged; }
};

KernelBalanceResult ksk_balance(const ContactSample& sample, const KernelSpec& kernel, const Grid1D& grid,
                                const KskOptions& opts = {});

struct CsskResult
{
  CsskResult(GridFunction2D p, GridFunction1D h) : balanced(std::move(p)), balancing(std::move(h)) {}

  GridFunction2D balanced;
  GridFunction1D balancing;
  std::size_t iterations = 0;
  double residual = 0.0;
  Status status = Status::converged;

  bool converged() const noexcept { return status == Status::converged; }
};

// Continuous symmetric balancing on the grid: p <- p / sqrt(r(x) r(y)),
// h <- h / sqrt(r), r the midpoint-rule row integrals of p.
CsskResult cssk_grid_balance(const GridFunction2D& f, double tol = 1e-8, std::size_t max_iter = 10000);

// w_k = 1/sqrt(b(X_k) b(Y_k)). Pass the accumulator form b = g^2 (for
// example KernelBalanceResult::accumulator) to undo a bias g completely.
WeightedSample apply_bias(const ContactSample& sample, const GridFunction1D& bias);
WeightedSample apply_bias(const ContactSample& sample, const std::function<double(double)>& bias);

} // namespace kdb
