#include "kdb/grid.hpp"

#include "kdb/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kdb {

Grid1D::Grid1D(std::size_t m) : m_(m)
{
  require(m >= 2, ErrorCode::invalid_argument, "grid needs at least 2 cells");
}

std::vector<double> Grid1D::centers() const
{
  std::vector<double> c(m_);
  for (std::size_t i = 0; i < m_; ++i)
    c[i] = center(i);
  return c;
}

std::size_t Grid1D::cell_of(double x) const noexcept
{
  if (!(x > 0.0))
    return 0;
  const double t = std::floor(x * static_cast<double>(m_));
  if (t >= static_cast<double>(m_))
    return m_ - 1;
  return static_cast<std::size_t>(t);
}

GridFunction1D::GridFunction1D(Grid1D grid, std::vector<double> values)
  : grid_(grid), values_(std::move(values))
{
  require(values_.size() == grid_.size(), ErrorCode::dimension_mismatch,
          "grid function has " + std::to_string(values_.size()) + " values for " +
            std::to_string(grid_.size()) + " cells");
  for (double v : values_)
    require(std::isfinite(v), ErrorCode::invalid_argument, "grid function value is not finite");
}

GridFunction1D GridFunction1D::constant(Grid1D grid, double value)
{
  return GridFunction1D(grid, std::vector<double>(grid.size(), value));
}

GridFunction1D GridFunction1D::sample(Grid1D grid, const std::function<double(double)>& f)
{
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = f(grid.center(i));
  return GridFunction1D(grid, std::move(v));
}

double GridFunction1D::interpolate(double x) const noexcept
{
  const auto m = grid_.size();
  const double t = x * static_cast<double>(m) - 0.5;
  if (t <= 0.0)
    return values_.front();
  if (t >= static_cast<double>(m - 1))
    return values_.back();
  const auto i = static_cast<std::size_t>(t);
  const double frac = t - static_cast<double>(i);
  return values_[i] + frac * (values_[i + 1] - values_[i]);
}

double GridFunction1D::min() const
{
  return *std::min_element(values_.begin(), values_.end());
}

double GridFunction1D::max() const
{
  return *std::max_element(values_.begin(), values_.end());
}

double quadrature_1d(const GridFunction1D& f)
{
  double s = 0.0;
  for (double v : f.values())
    s += v;
  return s / static_cast<double>(f.size());
}

GridFunction1D normalize_unit_mean(const GridFunction1D& f)
{
  const double mean = quadrature_1d(f);
  require(mean > 0.0 && std::isfinite(mean), ErrorCode::invalid_argument,
          "cannot normalize a function with nonpositive mean");
  std::vector<double> v = f.values();
  for (double& x : v)
    x /= mean;
  return GridFunction1D(f.grid(), std::move(v));
}

GridFunction2D::GridFunction2D(Grid1D grid, std::vector<double> values, bool symmetric)
  : grid_(grid), values_(std::move(values)), symmetric_(symmetric)
{
  const auto m = grid_.size();
  require(values_.size() == m * m, ErrorCode::dimension_mismatch,
          "2D grid function needs m*m values");
  for (double v : values_)
    require(std::isfinite(v), ErrorCode::invalid_argument, "2D grid value is not finite");
  if (symmetric_)
    require(is_exactly_symmetric(), ErrorCode::invalid_argument,
            "2D grid function flagged symmetric but f(i,j) != f(j,i)");
}

std::vector<double> GridFunction2D::row_quadrature() const
{
  const auto m = grid_.size();
  std::vector<double> r(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    const double* row = values_.data() + i * m;
    for (std::size_t j = 0; j < m; ++j)
      s += row[j];
    r[i] = s / static_cast<double>(m);
  }
  return r;
}

double GridFunction2D::total_mass() const
{
  double s = 0.0;
  for (double v : row_quadrature())
    s += v;
  return s / static_cast<double>(grid_.size());
}

bool GridFunction2D::is_exactly_symmetric() const
{
  const auto m = grid_.size();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (values_[i * m + j] != values_[j * m + i])
        return false;
  return true;
}

} // namespace kdb
