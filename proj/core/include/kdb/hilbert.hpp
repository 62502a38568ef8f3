#pragma once

#include <cstddef>
#include <vector>

namespace kdb {

// Vector with strictly positive, finite entries.
class PositiveVector
{
public:
  explicit PositiveVector(std::vector<double> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  const std::vector<double>& entries() const noexcept { return entries_; }
  double operator[](std::size_t i) const noexcept { return entries_[i]; }

private:
  std::vector<double> entries_;
};

// log(max_i(x_i/y_i) / min_i(x_i/y_i)), the projective distance between rays.
double hilbert_distance(const PositiveVector& x, const PositiveVector& y);

} // namespace kdb
