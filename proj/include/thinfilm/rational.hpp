#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace thinfilm {

/// Reduced fraction num/den with den > 0. Arithmetic reports overflow by
/// returning nullopt instead of wrapping.
class Rational {
 public:
  constexpr Rational() = default;
  Rational(std::int64_t num, std::int64_t den = 1);

  std::int64_t num() const noexcept { return num_; }
  std::int64_t den() const noexcept { return den_; }
  double to_double() const noexcept;

  /// Parses "3", "-0.25", "1.5e-3" or "2/7".
  static std::optional<Rational> parse(std::string_view text);
  /// Exact dyadic value of a finite double, if it fits in 64-bit terms.
  static std::optional<Rational> from_double(double v);

  friend std::optional<Rational> add(const Rational& a, const Rational& b);
  friend std::optional<Rational> sub(const Rational& a, const Rational& b);
  friend std::optional<Rational> scale(const Rational& a, std::int64_t num, std::int64_t den);
  /// Exact three-way comparison (-1, 0, 1).
  friend int compare(const Rational& a, const Rational& b) noexcept;

  std::string str() const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

/// A dimensionless exponent that remembers its exact value, so that
/// boundary cases like m = n + 2 compare exactly.
struct Exponent {
  double value = 0.0;
  std::optional<Rational> exact;

  Exponent() = default;
  Exponent(double v);  // NOLINT: implicit from double is intended
  explicit Exponent(Rational r);

  static Exponent parse(std::string_view text);
  operator double() const noexcept { return value; }  // NOLINT
};

/// Sign of (lhs_scale*lhs + lhs_offset) - (rhs_scale*rhs + rhs_offset), all
/// scales/offsets being small rationals. Uses exact arithmetic when both
/// exponents carry exact values and nothing overflows; plain doubles otherwise.
int compare_affine(const Exponent& lhs, Rational lhs_scale, Rational lhs_offset,
                   const Exponent& rhs, Rational rhs_scale, Rational rhs_offset);

}  // namespace thinfilm
