#include "kdb/hilbert.hpp"

#include "kdb/error.hpp"

#include <cmath>
#include <string>

namespace kdb {

PositiveVector::PositiveVector(std::vector<double> entries) : entries_(std::move(entries))
{
  require(!entries_.empty(), ErrorCode::invalid_argument, "positive vector is empty");
  for (std::size_t i = 0; i < entries_.size(); ++i)
    require(entries_[i] > 0.0 && std::isfinite(entries_[i]), ErrorCode::not_strictly_positive,
            "entry " + std::to_string(i) + " is not a positive finite number");
}

double hilbert_distance(const PositiveVector& x, const PositiveVector& y)
{
  require(x.size() == y.size(), ErrorCode::dimension_mismatch,
          "hilbert_distance on vectors of length " + std::to_string(x.size()) + " and " +
            std::to_string(y.size()));
  double hi = x[0] / y[0];
  double lo = hi;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double r = x[i] / y[i];
    if (r > hi)
      hi = r;
    if (r < lo)
      lo = r;
  }
  return std::log(hi / lo);
}

} // namespace kdb
