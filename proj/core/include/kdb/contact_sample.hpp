#pragma once

#include <cstddef>
#include <vector>

namespace kdb {

struct ContactPoint
{
  double x = 0.0;
  double y = 0.0;
  double count = 1.0;
};

// Pre-binned contacts in the unit square. Each stored point stands for both
// (x, y) and (y, x); it is kept with x <= y.
class ContactSample
{
public:
  ContactSample() = default;
  explicit ContactSample(std::vector<ContactPoint> points);

  bool empty() const noexcept { return points_.empty(); }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<ContactPoint>& points() const noexcept { return points_; }
  const ContactPoint& operator[](std::size_t k) const noexcept { return points_[k]; }

  // Sum of counts in storage order.
  double total_count() const noexcept { return total_; }

  // c_k / total_count, each computed by one division.
  std::vector<double> masses() const;

private:
  std::vector<ContactPoint> points_;
  double total_ = 0.0;
};

// A sample with one positive weight per point.
class WeightedSample
{
public:
  explicit WeightedSample(ContactSample base);  // unit weights
  WeightedSample(ContactSample base, std::vector<double> weights);

  const ContactSample& base() const noexcept { return base_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return base_.size(); }

private:
  ContactSample base_;
  std::vector<double> weights_;
};

} // namespace kdb
