#pragma once

#include "kdb/error.hpp"
#include "kdb/grid.hpp"
#include "kdb/hilbert.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <functional>

namespace kdb {

// Dense, exactly symmetric, finite, nonnegative square matrix.
class SymmetricMatrix
{
public:
  explicit SymmetricMatrix(Eigen::MatrixXd m);

  std::size_t size() const noexcept { return static_cast<std::size_t>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return m_; }
  double operator()(std::size_t i, std::size_t j) const noexcept
  {
    return m_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double total() const;

private:
  Eigen::MatrixXd m_;
};

struct BalanceOptions
{
  double tol = 1e-8;
  std::size_t max_iter = 10000;
  // Called after every update with the iteration number and current iterate.
  std::function<void(std::size_t, const Eigen::MatrixXd&)> on_iterate;
};

struct MatrixBalanceResult
{
  Eigen::MatrixXd balanced;     // P = diag(d1) C diag(d2)
  Eigen::VectorXd row_scaling;  // d1
  Eigen::VectorXd col_scaling;  // d2, equal to d1 for the symmetric balancer
  std::size_t iterations = 0;
  double residual = 0.0;        // infinity norm of the marginal deviation
  Status status = Status::converged;

  bool converged() const noexcept { return status == Status::converged; }
};

// Alternating row then column normalization until rows and columns sum to 1.
MatrixBalanceResult sk_balance(const Eigen::MatrixXd& c, const BalanceOptions& opts = {});
MatrixBalanceResult sk_balance(const Eigen::MatrixXd& c, const Eigen::VectorXd& initial_col_scaling,
                               const BalanceOptions& opts);

// Alternating scaling to row sums r and column sums c.
MatrixBalanceResult sk_scale(const Eigen::MatrixXd& c, const Eigen::VectorXd& r,
                             const Eigen::VectorXd& col, const BalanceOptions& opts = {});
MatrixBalanceResult sk_scale(const Eigen::MatrixXd& c, const Eigen::VectorXd& r,
                             const Eigen::VectorXd& col, const Eigen::VectorXd& initial_col_scaling,
                             const BalanceOptions& opts);

// Simultaneous symmetric scaling P <- R^{-1/2} P R^{-1/2}, R the row sums of
// the current P.
MatrixBalanceResult ssk_balance(const SymmetricMatrix& c, const BalanceOptions& opts = {});

// x -> sqrt(x / (C x)) elementwise.
PositiveVector balance_operator_step(const SymmetricMatrix& c, const PositiveVector& x);

// Cellwise-constant bias proportional to 1/d, normalized to unit mean.
GridFunction1D histogram_bias(const MatrixBalanceResult& result, const Grid1D& grid);

} // namespace kdb
