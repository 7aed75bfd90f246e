#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace thinfilm {

/// Film thickness on a uniform periodic grid: node i sits at origin + i*dx and
/// node size() is identified with node 0.
class Field {
 public:
  Field() = default;
  Field(std::vector<double> values, double dx, double origin);

  std::size_t size() const noexcept { return values_.size(); }
  double dx() const noexcept { return dx_; }
  double origin() const noexcept { return origin_; }
  double length() const noexcept { return dx_ * static_cast<double>(values_.size()); }
  double x(std::size_t i) const noexcept { return origin_ + static_cast<double>(i) * dx_; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  /// Periodic access for any signed index.
  double wrap(std::ptrdiff_t i) const noexcept;

  double mass() const noexcept;
  double max() const noexcept;
  double min() const noexcept;

 private:
  std::vector<double> values_;
  double dx_ = 1.0;
  double origin_ = 0.0;
};

}  // namespace thinfilm
