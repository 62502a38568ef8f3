#pragma once

#include <cmath>
#include <cstddef>

namespace kdb {

inline constexpr double inv_sqrt_2pi = 0.398942280401432677939946059934;

// Standard normal density.
inline double gaussian_kernel(double u) noexcept
{
  return inv_sqrt_2pi * std::exp(-0.5 * u * u);
}

enum class Boundary
{
  none,    // plain Gaussian, mass leaks past 0 and 1
  reflect  // method of images at 0 and 1, unit mass on [0,1]
};

struct KernelSpec
{
  double bandwidth = 0.05;
  Boundary boundary = Boundary::reflect;
  // Terms with |u| beyond this many bandwidths are dropped. The default sits
  // past the double underflow point of exp(-u^2/2), so nothing is lost.
  double cutoff = 40.0;
};

void validate(const KernelSpec& spec);

// K_h(x, z) at an arbitrary x, images included for Boundary::reflect.
double kernel_value(const KernelSpec& spec, double x, double z) noexcept;

namespace detail {

// visit(i, phi((c_i - z)/h)/h) for every center c_i = (2i+1)/(2m) within the
// cutoff. Consecutive values are produced by the multiplicative recurrence
// e_{k+1} = e_k * a_k, a_{k+1} = a_k * q, re-anchored with a direct exp
// every few steps to keep the rounding drift negligible.
template <class Visit>
void visit_gaussian(std::size_t m, double h, double cutoff, double z, Visit& visit)
{
  constexpr long reanchor = 32;
  const double md = static_cast<double>(m);
  const long ml = static_cast<long>(m);
  const double delta = 1.0 / (md * h);
  const double half_d2 = 0.5 * delta * delta;
  const double q = std::exp(-delta * delta);
  const double scale = inv_sqrt_2pi / h;

  long i0 = static_cast<long>(std::floor(z * md));
  if (i0 < 0)
    i0 = 0;
  if (i0 > ml - 1)
    i0 = ml - 1;
  const double u0 = (static_cast<double>(2 * i0 + 1) / (2.0 * md) - z) / h;
  if (std::abs(u0) > cutoff)
    return;
  const double e0 = std::exp(-0.5 * u0 * u0);
  visit(static_cast<std::size_t>(i0), scale * e0);

  double e = e0;
  double a = std::exp(-u0 * delta - half_d2);
  for (long k = 1; i0 + k < ml; ++k) {
    const double u = u0 + static_cast<double>(k) * delta;
    if (u > cutoff)
      break;
    if (k % reanchor == 0) {
      e = std::exp(-0.5 * u * u);
      a = std::exp(-u * delta - half_d2);
    } else {
      e *= a;
      a *= q;
    }
    if (e == 0.0)
      break;
    visit(static_cast<std::size_t>(i0 + k), scale * e);
  }

  e = e0;
  double b = std::exp(u0 * delta - half_d2);
  for (long k = 1; i0 - k >= 0; ++k) {
    const double u = u0 - static_cast<double>(k) * delta;
    if (-u > cutoff)
      break;
    if (k % reanchor == 0) {
      e = std::exp(-0.5 * u * u);
      b = std::exp(u * delta - half_d2);
    } else {
      e *= b;
      b *= q;
    }
    if (e == 0.0)
      break;
    visit(static_cast<std::size_t>(i0 - k), scale * e);
  }
}

} // namespace detail

// Calls visit(i, K_h(c_i, z)) for the grid centers where the kernel centered
// at z is nonzero after the cutoff. With reflection the images at -z and 2-z
// are visited separately, so an index may be reported more than once and
// callers must accumulate.
template <class Visit>
void visit_kernel(std::size_t m, const KernelSpec& spec, double z, Visit&& visit)
{
  detail::visit_gaussian(m, spec.bandwidth, spec.cutoff, z, visit);
  if (spec.boundary == Boundary::reflect) {
    detail::visit_gaussian(m, spec.bandwidth, spec.cutoff, -z, visit);
    detail::visit_gaussian(m, spec.bandwidth, spec.cutoff, 2.0 - z, visit);
  }
}

} // namespace kdb
