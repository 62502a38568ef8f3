#include "kdb/kernel_balance.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kdb {

namespace {

void require_nonempty(const ContactSample& s)
{
  require(!s.empty(), ErrorCode::empty_sample, "sample has no points");
}

std::vector<double> point_mass(const WeightedSample& s)
{
  std::vector<double> p = s.base().masses();
  for (std::size_t k = 0; k < p.size(); ++k)
    p[k] *= s.weights()[k];
  return p;
}

double max_deviation_from_one(const std::vector<double>& r)
{
  double d = 0.0;
  for (double v : r)
    d = std::max(d, std::abs(v - 1.0));
  return d;
}

void require_positive_marginal(const std::vector<double>& r, const Grid1D& grid, double h)
{
  for (std::size_t i = 0; i < r.size(); ++i)
    require(r[i] > 0.0 && std::isfinite(r[i]), ErrorCode::kernel_underflow,
            "marginal vanishes at x = " + std::to_string(grid.center(i)) + " for bandwidth " +
              std::to_string(h) + "; no sample coordinate is within kernel reach");
}

// Marginal of h(x) f(x,y) h(y), f the sample's 2D kernel density, with the
// inner integral taken by the midpoint rule on the grid.
void exact_marginal(const ContactSample& sample, const std::vector<double>& p, const KernelSpec& kernel,
                    std::size_t m, const std::vector<double>& h, std::vector<double>& r)
{
  std::fill(r.begin(), r.end(), 0.0);
  const double inv_m = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const auto& pt = sample[k];
    double sx = 0.0;
    double sy = 0.0;
    visit_kernel(m, kernel, pt.x, [&](std::size_t i, double v) { sx += v * h[i]; });
    visit_kernel(m, kernel, pt.y, [&](std::size_t i, double v) { sy += v * h[i]; });
    const double cx = 0.5 * p[k] * sy * inv_m;
    const double cy = 0.5 * p[k] * sx * inv_m;
    visit_kernel(m, kernel, pt.x, [&](std::size_t i, double v) { r[i] += cx * v; });
    visit_kernel(m, kernel, pt.y, [&](std::size_t i, double v) { r[i] += cy * v; });
  }
  for (std::size_t i = 0; i < m; ++i)
    r[i] *= h[i];
}

KernelBalanceResult ksk_exact(const ContactSample& sample, const KernelSpec& kernel, const Grid1D& grid,
                              const KskOptions& opts)
{
  const std::size_t m = grid.size();
  const std::vector<double> p = sample.masses();
  std::vector<double> h(m, 1.0);
  std::vector<double> acc(m, 1.0);
  std::vector<double> r(m);
  std::vector<double> history;

  exact_marginal(sample, p, kernel, m, h, r);
  require_positive_marginal(r, grid, kernel.bandwidth);
  double res = max_deviation_from_one(r);
  history.push_back(res);
  std::size_t it = 0;
  while (res > opts.tol && it < opts.max_iter) {
    for (std::size_t i = 0; i < m; ++i) {
      h[i] /= std::sqrt(r[i]);
      acc[i] *= r[i];
    }
    ++it;
    exact_marginal(sample, p, kernel, m, h, r);
    require_positive_marginal(r, grid, kernel.bandwidth);
    res = max_deviation_from_one(r);
    history.push_back(res);
  }

  std::vector<double> inv(m);
  for (std::size_t i = 0; i < m; ++i)
    inv[i] = 1.0 / h[i];
  KernelBalanceResult out{normalize_unit_mean(GridFunction1D(grid, std::move(inv))),
                          GridFunction1D(grid, std::move(h)), GridFunction1D(grid, std::move(acc))};
  out.bandwidth = kernel.bandwidth;
  out.iterations = it;
  out.residual = res;
  out.status = res <= opts.tol ? Status::converged : Status::max_iterations;
  out.residual_history = std::move(history);
  return out;
}

KernelBalanceResult ksk_point_weights(const ContactSample& sample, const KernelSpec& kernel,
                                      const Grid1D& grid, const KskOptions& opts)
{
  const std::size_t m = grid.size();
  std::vector<double> acc(m, 1.0);
  std::vector<double> w(sample.size(), 1.0);
  std::vector<double> history;

  auto marginal = [&] {
    return marginal_kde(WeightedSample(sample, w), kernel, grid).values();
  };
  std::vector<double> r = marginal();
  require_positive_marginal(r, grid, kernel.bandwidth);
  double res = max_deviation_from_one(r);
  history.push_back(res);
  std::size_t it = 0;
  while (res > opts.tol && it < opts.max_iter) {
    for (std::size_t i = 0; i < m; ++i)
      acc[i] *= r[i];
    const GridFunction1D g(grid, acc);
    for (std::size_t k = 0; k < sample.size(); ++k)
      w[k] = 1.0 / std::sqrt(g.interpolate(sample[k].x) * g.interpolate(sample[k].y));
    ++it;
    r = marginal();
    require_positive_marginal(r, grid, kernel.bandwidth);
    res = max_deviation_from_one(r);
    history.push_back(res);
  }

  std::vector<double> root(m);
  std::vector<double> bal(m);
  for (std::size_t i = 0; i < m; ++i) {
    root[i] = std::sqrt(acc[i]);
    bal[i] = 1.0 / root[i];
  }
  KernelBalanceResult out{normalize_unit_mean(GridFunction1D(grid, std::move(root))),
                          GridFunction1D(grid, std::move(bal)), GridFunction1D(grid, std::move(acc))};
  out.bandwidth = kernel.bandwidth;
  out.iterations = it;
  out.residual = res;
  out.status = res <= opts.tol ? Status::converged : Status::max_iterations;
  out.residual_history = std::move(history);
  return out;
}

} // namespace

GridFunction1D marginal_kde(const WeightedSample& sample, const KernelSpec& kernel, const Grid1D& grid)
{
  require_nonempty(sample.base());
  validate(kernel);
  const std::size_t m = grid.size();
  const std::vector<double> p = point_mass(sample);
  std::vector<double> r(m, 0.0);
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const auto& pt = sample.base()[k];
    const double c = 0.5 * p[k];
    visit_kernel(m, kernel, pt.x, [&](std::size_t i, double v) { r[i] += c * v; });
    visit_kernel(m, kernel, pt.y, [&](std::size_t i, double v) { r[i] += c * v; });
  }
  return GridFunction1D(grid, std::move(r));
}

GridFunction2D kde_2d(const WeightedSample& sample, const KernelSpec& kernel, const Grid1D& grid)
{
  require_nonempty(sample.base());
  validate(kernel);
  const std::size_t m = grid.size();
  const std::vector<double> p = point_mass(sample);
  std::vector<double> a(m * m, 0.0);
  std::vector<double> kx(m, 0.0);
  std::vector<double> ky(m, 0.0);

  for (std::size_t k = 0; k < sample.size(); ++k) {
    const auto& pt = sample.base()[k];
    std::size_t xlo = m, xhi = 0, ylo = m, yhi = 0;
    visit_kernel(m, kernel, pt.x, [&](std::size_t i, double v) {
      kx[i] += v;
      xlo = std::min(xlo, i);
      xhi = std::max(xhi, i);
    });
    visit_kernel(m, kernel, pt.y, [&](std::size_t i, double v) {
      ky[i] += v;
      ylo = std::min(ylo, i);
      yhi = std::max(yhi, i);
    });
    if (xlo <= xhi && ylo <= yhi) {
      for (std::size_t i = xlo; i <= xhi; ++i) {
        const double ci = p[k] * kx[i];
        double* row = a.data() + i * m;
        for (std::size_t j = ylo; j <= yhi; ++j)
          row[j] += ci * ky[j];
      }
    }
    if (xlo <= xhi)
      std::fill(kx.begin() + static_cast<long>(xlo), kx.begin() + static_cast<long>(xhi) + 1, 0.0);
    if (ylo <= yhi)
      std::fill(ky.begin() + static_cast<long>(ylo), ky.begin() + static_cast<long>(yhi) + 1, 0.0);
  }

  std::vector<double> f(m * m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      f[i * m + j] = 0.5 * (a[i * m + j] + a[j * m + i]);
  return GridFunction2D(grid, std::move(f), true);
}

double kde_2d_at(const WeightedSample& sample, const KernelSpec& kernel, double x, double y)
{
  require_nonempty(sample.base());
  validate(kernel);
  const std::vector<double> p = point_mass(sample);
  double s = 0.0;
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const auto& pt = sample.base()[k];
    s += 0.5 * p[k] *
         (kernel_value(kernel, x, pt.x) * kernel_value(kernel, y, pt.y) +
          kernel_value(kernel, x, pt.y) * kernel_value(kernel, y, pt.x));
  }
  return s;
}

KernelBalanceResult ksk_balance(const ContactSample& sample, const KernelSpec& kernel, const Grid1D& grid,
                                const KskOptions& opts)
{
  require_nonempty(sample);
  validate(kernel);
  require(opts.tol > 0.0, ErrorCode::invalid_argument, "tol must be positive");
  if (opts.update == KskUpdate::point_weights)
    return ksk_point_weights(sample, kernel, grid, opts);
  return ksk_exact(sample, kernel, grid, opts);
}

CsskResult cssk_grid_balance(const GridFunction2D& f, double tol, std::size_t max_iter)
{
  require(tol > 0.0, ErrorCode::invalid_argument, "tol must be positive");
  require(f.is_exactly_symmetric(), ErrorCode::invalid_argument, "density is not symmetric on the grid");
  for (std::size_t i = 0; i < f.values().size(); ++i)
    require(f.values()[i] > 0.0, ErrorCode::not_strictly_positive,
            "density is not strictly positive at cell (" + std::to_string(i / f.size()) + "," +
              std::to_string(i % f.size()) + ")");

  const std::size_t m = f.size();
  const double inv_m = 1.0 / static_cast<double>(m);
  std::vector<double> p = f.values();
  std::vector<double> h(m, 1.0);
  std::vector<double> r(m);
  std::vector<double> s(m);

  auto marginals = [&] {
    for (std::size_t i = 0; i < m; ++i) {
      double sum = 0.0;
      const double* row = p.data() + i * m;
      for (std::size_t j = 0; j < m; ++j)
        sum += row[j];
      r[i] = sum * inv_m;
    }
    return max_deviation_from_one(r);
  };

  double res = marginals();
  std::size_t it = 0;
  while (res > tol && it < max_iter) {
    for (std::size_t i = 0; i < m; ++i) {
      s[i] = 1.0 / std::sqrt(r[i]);
      h[i] *= s[i];
    }
    for (std::size_t i = 0; i < m; ++i) {
      double* row = p.data() + i * m;
      for (std::size_t j = 0; j < m; ++j)
        row[j] *= s[i] * s[j];
    }
    ++it;
    res = marginals();
  }

  CsskResult out{GridFunction2D(f.grid(), std::move(p), true), GridFunction1D(f.grid(), std::move(h))};
  out.iterations = it;
  out.residual = res;
  out.status = res <= tol ? Status::converged : Status::max_iterations;
  return out;
}

WeightedSample apply_bias(const ContactSample& sample, const std::function<double(double)>& bias)
{
  std::vector<double> w(sample.size());
  for (std::size_t k = 0; k < sample.size(); ++k) {
    const double bx = bias(sample[k].x);
    const double by = bias(sample[k].y);
    require(bx > 0.0 && by > 0.0 && std::isfinite(bx) && std::isfinite(by),
            ErrorCode::not_strictly_positive,
            "bias is not positive at sample point " + std::to_string(k));
    w[k] = 1.0 / std::sqrt(bx * by);
  }
  return WeightedSample(sample, std::move(w));
}

WeightedSample apply_bias(const ContactSample& sample, const GridFunction1D& bias)
{
  return apply_bias(sample, [&bias](double x) { return bias.interpolate(x); });
}

} // namespace kdb
