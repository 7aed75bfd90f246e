#include "thinfilm/field.hpp"

#include <algorithm>
#include <cmath>

#include "thinfilm/errors.hpp"

namespace thinfilm {

Field::Field(std::vector<double> values, double dx, double origin)
    : values_(std::move(values)), dx_(dx), origin_(origin) {
  if (!(dx_ > 0.0)) throw Error(Errc::InvalidArgument, "grid spacing must be positive");
  if (values_.empty()) throw Error(Errc::InvalidArgument, "field needs at least one node");
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "field values must be finite");
  }
}

double Field::wrap(std::ptrdiff_t i) const noexcept {
  const auto n = static_cast<std::ptrdiff_t>(values_.size());
  i %= n;
  if (i < 0) i += n;
  return values_[static_cast<std::size_t>(i)];
}

double Field::mass() const noexcept {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * dx_;
}

double Field::max() const noexcept { return *std::max_element(values_.begin(), values_.end()); }

double Field::min() const noexcept { return *std::min_element(values_.begin(), values_.end()); }

}  // namespace thinfilm
