#include "kdb/contact_sample.hpp"

#include "kdb/error.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace kdb {

ContactSample::ContactSample(std::vector<ContactPoint> points) : points_(std::move(points))
{
  for (std::size_t k = 0; k < points_.size(); ++k) {
    auto& p = points_[k];
    require(p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0, ErrorCode::out_of_range,
            "point " + std::to_string(k) + " lies outside the unit square");
    require(p.count > 0.0 && std::isfinite(p.count), ErrorCode::invalid_argument,
            "point " + std::to_string(k) + " has a nonpositive count");
    if (p.x > p.y)
      std::swap(p.x, p.y);
    total_ += p.count;
  }
}

std::vector<double> ContactSample::masses() const
{
  std::vector<double> p(points_.size());
  for (std::size_t k = 0; k < p.size(); ++k)
    p[k] = points_[k].count / total_;
  return p;
}

WeightedSample::WeightedSample(ContactSample base)
  : base_(std::move(base)), weights_(base_.size(), 1.0)
{}

WeightedSample::WeightedSample(ContactSample base, std::vector<double> weights)
  : base_(std::move(base)), weights_(std::move(weights))
{
  require(weights_.size() == base_.size(), ErrorCode::dimension_mismatch,
          "weights length does not match the sample");
  for (std::size_t k = 0; k < weights_.size(); ++k)
    require(weights_[k] > 0.0 && std::isfinite(weights_[k]), ErrorCode::not_strictly_positive,
            "weight " + std::to_string(k) + " is not positive");
}

} // namespace kdb
