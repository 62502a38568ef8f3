#include "kdb/matrix_balance.hpp"

#include <cmath>
#include <string>

namespace kdb {

namespace {

std::string entry_name(Eigen::Index i, Eigen::Index j)
{
  return "(" + std::to_string(i) + "," + std::to_string(j) + ")";
}

void require_strictly_positive(const Eigen::MatrixXd& c)
{
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j)
      require(c(i, j) > 0.0 && std::isfinite(c(i, j)), ErrorCode::not_strictly_positive,
              "entry " + entry_name(i, j) + " = " + std::to_string(c(i, j)) +
                " is not strictly positive");
}

void require_square(const Eigen::MatrixXd& c)
{
  require(c.rows() > 0 && c.rows() == c.cols(), ErrorCode::dimension_mismatch,
          "matrix must be square and nonempty");
}

// Fixed-order products so results do not depend on vectorization choices.
Eigen::VectorXd times(const Eigen::MatrixXd& c, const Eigen::VectorXd& x)
{
  const Eigen::Index n = c.rows();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    const double xj = x(j);
    for (Eigen::Index i = 0; i < n; ++i)
      y(i) += c(i, j) * xj;
  }
  return y;
}

Eigen::VectorXd transpose_times(const Eigen::MatrixXd& c, const Eigen::VectorXd& x)
{
  Eigen::VectorXd y(c.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      s += c(i, j) * x(i);
    y(j) = s;
  }
  return y;
}

double deviation(const Eigen::VectorXd& a, const Eigen::VectorXd& target)
{
  double d = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a(i) - target(i)));
  return d;
}

Eigen::MatrixXd scaled(const Eigen::MatrixXd& c, const Eigen::VectorXd& d1, const Eigen::VectorXd& d2)
{
  Eigen::MatrixXd p(c.rows(), c.cols());
  for (Eigen::Index j = 0; j < c.cols(); ++j)
    for (Eigen::Index i = 0; i < c.rows(); ++i)
      p(i, j) = d1(i) * c(i, j) * d2(j);
  return p;
}

double sk_residual(const Eigen::MatrixXd& c, const Eigen::VectorXd& d1, const Eigen::VectorXd& d2,
                   const Eigen::VectorXd& r, const Eigen::VectorXd& col)
{
  const Eigen::VectorXd rows = d1.cwiseProduct(times(c, d2));
  const Eigen::VectorXd cols = d2.cwiseProduct(transpose_times(c, d1));
  return std::max(deviation(rows, r), deviation(cols, col));
}

} // namespace

SymmetricMatrix::SymmetricMatrix(Eigen::MatrixXd m) : m_(std::move(m))
{
  require_square(m_);
  for (Eigen::Index j = 0; j < m_.cols(); ++j)
    for (Eigen::Index i = 0; i < m_.rows(); ++i) {
      const double v = m_(i, j);
      require(std::isfinite(v), ErrorCode::invalid_argument,
              "entry " + entry_name(i, j) + " is not finite");
      require(v >= 0.0, ErrorCode::invalid_argument,
              "entry " + entry_name(i, j) + " is negative");
      require(v == m_(j, i), ErrorCode::invalid_argument,
              "matrix is not symmetric at " + entry_name(i, j));
    }
}

double SymmetricMatrix::total() const
{
  double s = 0.0;
  for (Eigen::Index j = 0; j < m_.cols(); ++j)
    for (Eigen::Index i = 0; i < m_.rows(); ++i)
      s += m_(i, j);
  return s;
}

MatrixBalanceResult sk_scale(const Eigen::MatrixXd& c, const Eigen::VectorXd& r,
                             const Eigen::VectorXd& col, const Eigen::VectorXd& initial_col_scaling,
                             const BalanceOptions& opts)
{
  require_square(c);
  const Eigen::Index n = c.rows();
  require(r.size() == n && col.size() == n && initial_col_scaling.size() == n,
          ErrorCode::dimension_mismatch, "marginal or scaling length does not match the matrix");
  require(opts.tol > 0.0, ErrorCode::invalid_argument, "tol must be positive");
  for (Eigen::Index i = 0; i < n; ++i) {
    require(r(i) > 0.0 && col(i) > 0.0, ErrorCode::invalid_argument,
            "target marginals must be positive");
    require(initial_col_scaling(i) > 0.0, ErrorCode::invalid_argument,
            "initial scaling must be positive");
  }
  const double sr = r.sum();
  const double sc = col.sum();
  require(std::abs(sr - sc) <= 1e-9 * std::max(std::abs(sr), std::abs(sc)),
          ErrorCode::marginal_mismatch,
          "row target sums to " + std::to_string(sr) + ", column target to " + std::to_string(sc));
  require_strictly_positive(c);

  MatrixBalanceResult out;
  Eigen::VectorXd d1 = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd d2 = initial_col_scaling;
  double res = sk_residual(c, d1, d2, r, col);
  std::size_t it = 0;
  while (res > opts.tol && it < opts.max_iter) {
    d1 = r.cwiseQuotient(times(c, d2));
    d2 = col.cwiseQuotient(transpose_times(c, d1));
    ++it;
    res = sk_residual(c, d1, d2, r, col);
    if (opts.on_iterate)
      opts.on_iterate(it, scaled(c, d1, d2));
  }
  out.balanced = scaled(c, d1, d2);
  out.row_scaling = d1;
  out.col_scaling = d2;
  out.iterations = it;
  out.residual = res;
  out.status = res <= opts.tol ? Status::converged : Status::max_iterations;
  return out;
}

MatrixBalanceResult sk_scale(const Eigen::MatrixXd& c, const Eigen::VectorXd& r,
                             const Eigen::VectorXd& col, const BalanceOptions& opts)
{
  return sk_scale(c, r, col, Eigen::VectorXd::Ones(c.cols()), opts);
}

MatrixBalanceResult sk_balance(const Eigen::MatrixXd& c, const Eigen::VectorXd& initial_col_scaling,
                               const BalanceOptions& opts)
{
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(c.rows());
  return sk_scale(c, ones, Eigen::VectorXd::Ones(c.cols()), initial_col_scaling, opts);
}

MatrixBalanceResult sk_balance(const Eigen::MatrixXd& c, const BalanceOptions& opts)
{
  return sk_balance(c, Eigen::VectorXd::Ones(c.cols()), opts);
}

MatrixBalanceResult ssk_balance(const SymmetricMatrix& sym, const BalanceOptions& opts)
{
  require(opts.tol > 0.0, ErrorCode::invalid_argument, "tol must be positive");
  const Eigen::MatrixXd& c = sym.matrix();
  const Eigen::Index n = c.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      s += c(i, j);
    require(s > 0.0, ErrorCode::zero_row_sum, "row " + std::to_string(j) + " sums to zero");
  }
  require_strictly_positive(c);

  // P is symmetric, so its row sums are its column sums, read contiguously.
  auto row_sums = [n](const Eigen::MatrixXd& p) {
    Eigen::VectorXd r(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        s += p(i, j);
      r(j) = s;
    }
    return r;
  };

  Eigen::MatrixXd p = c;
  Eigen::VectorXd d = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd r = row_sums(p);
  double res = deviation(r, Eigen::VectorXd::Ones(n));
  std::size_t it = 0;
  Eigen::VectorXd s(n);
  while (res > opts.tol && it < opts.max_iter) {
    for (Eigen::Index i = 0; i < n; ++i)
      s(i) = 1.0 / std::sqrt(r(i));
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i)
        p(i, j) *= s(i) * s(j);
    d = d.cwiseProduct(s);
    ++it;
    r = row_sums(p);
    res = deviation(r, Eigen::VectorXd::Ones(n));
    if (opts.on_iterate)
      opts.on_iterate(it, p);
  }

  MatrixBalanceResult out;
  out.balanced = std::move(p);
  out.row_scaling = d;
  out.col_scaling = d;
  out.iterations = it;
  out.residual = res;
  out.status = res <= opts.tol ? Status::converged : Status::max_iterations;
  return out;
}

PositiveVector balance_operator_step(const SymmetricMatrix& c, const PositiveVector& x)
{
  require(x.size() == c.size(), ErrorCode::dimension_mismatch,
          "vector length " + std::to_string(x.size()) + " does not match matrix order " +
            std::to_string(c.size()));
  const Eigen::Map<const Eigen::VectorXd> xv(x.entries().data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::VectorXd cx = times(c.matrix(), xv);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] = std::sqrt(x[i] / cx(static_cast<Eigen::Index>(i)));
  return PositiveVector(std::move(y));
}

GridFunction1D histogram_bias(const MatrixBalanceResult& result, const Grid1D& grid)
{
  require(static_cast<std::size_t>(result.row_scaling.size()) == grid.size(),
          ErrorCode::dimension_mismatch, "grid size must equal the matrix order");
  std::vector<double> g(grid.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = 1.0 / result.row_scaling(static_cast<Eigen::Index>(i));
  return normalize_unit_mean(GridFunction1D(grid, std::move(g)));
}

} // namespace kdb
