#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace kdb {

// m equal cells on [0,1]; functions live at the cell centers.
class Grid1D
{
public:
  explicit Grid1D(std::size_t m);

  std::size_t size() const noexcept { return m_; }
  double width() const noexcept { return 1.0 / static_cast<double>(m_); }
  double center(std::size_t i) const noexcept
  {
    return static_cast<double>(2 * i + 1) / static_cast<double>(2 * m_);
  }
  std::vector<double> centers() const;

  // Index of the cell containing x; x = 1 belongs to the last cell.
  std::size_t cell_of(double x) const noexcept;

  bool operator==(const Grid1D& other) const noexcept { return m_ == other.m_; }

private:
  std::size_t m_;
};

class GridFunction1D
{
public:
  GridFunction1D(Grid1D grid, std::vector<double> values);
  static GridFunction1D constant(Grid1D grid, double value);
  static GridFunction1D sample(Grid1D grid, const std::function<double(double)>& f);

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  // Linear between centers, constant in the two boundary half-cells.
  double interpolate(double x) const noexcept;

  double min() const;
  double max() const;

private:
  Grid1D grid_;
  std::vector<double> values_;
};

// Midpoint rule: (1/m) * sum of values, summed in index order.
double quadrature_1d(const GridFunction1D& f);

// Rescale so that quadrature_1d(result) == 1. Requires a positive mean.
GridFunction1D normalize_unit_mean(const GridFunction1D& f);

// Row-major m x m values on a shared grid.
class GridFunction2D
{
public:
  GridFunction2D(Grid1D grid, std::vector<double> values, bool symmetric = false);

  const Grid1D& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }
  bool symmetric() const noexcept { return symmetric_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator()(std::size_t i, std::size_t j) const noexcept
  {
    return values_[i * grid_.size() + j];
  }

  // Midpoint-rule row integrals (1/m) sum_j f(i, j).
  std::vector<double> row_quadrature() const;
  double total_mass() const;
  bool is_exactly_symmetric() const;

private:
  Grid1D grid_;
  std::vector<double> values_;
  bool symmetric_;
};

} // namespace kdb
