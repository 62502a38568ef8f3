#include "kdb/kernel.hpp"

#include "kdb/error.hpp"

namespace kdb {

void validate(const KernelSpec& spec)
{
  require(spec.bandwidth > 0.0 && std::isfinite(spec.bandwidth), ErrorCode::invalid_argument,
          "bandwidth must be positive and finite");
  require(spec.cutoff > 0.0, ErrorCode::invalid_argument, "kernel cutoff must be positive");
}

double kernel_value(const KernelSpec& spec, double x, double z) noexcept
{
  const double h = spec.bandwidth;
  double v = gaussian_kernel((x - z) / h);
  if (spec.boundary == Boundary::reflect)
    v += gaussian_kernel((x + z) / h) + gaussian_kernel((x - (2.0 - z)) / h);
  return v / h;
}

} // namespace kdb
