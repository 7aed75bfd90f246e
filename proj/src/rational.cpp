#include "thinfilm/rational.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

#include "thinfilm/errors.hpp"

namespace thinfilm {

namespace {

using i128 = __int128;

constexpr i128 kMax = std::numeric_limits<std::int64_t>::max();

i128 gcd128(i128 a, i128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::optional<Rational> make(i128 num, i128 den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 g = gcd128(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  if (num > kMax || num < -kMax || den > kMax) return std::nullopt;
  return Rational(static_cast<std::int64_t>(num), static_cast<std::int64_t>(den));
}

// Multiplying two 64-bit values into i128 can't overflow, but sums of two
// such products can exceed the i128 range only for operands near 2^63.
bool products_safe(const Rational& a, const Rational& b) {
  constexpr std::int64_t lim = std::int64_t{1} << 62;
  auto ok = [](std::int64_t v) { return v > -lim && v < lim; };
  return ok(a.num()) && ok(a.den()) && ok(b.num()) && ok(b.den());
}

}  // namespace

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw Error(Errc::InvalidArgument, "rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  num_ = num;
  den_ = den;
}

double Rational::to_double() const noexcept {
  return static_cast<double>(num_) / static_cast<double>(den_);
}

std::optional<Rational> Rational::parse(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) return std::nullopt;

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    auto p = parse(text.substr(0, slash));
    auto q = parse(text.substr(slash + 1));
    if (!p || !q || q->num() == 0) return std::nullopt;
    return make(static_cast<i128>(p->num()) * q->den(), static_cast<i128>(p->den()) * q->num());
  }

  bool negative = false;
  std::size_t i = 0;
  if (text[i] == '+' || text[i] == '-') {
    negative = text[i] == '-';
    ++i;
  }
  i128 mantissa = 0;
  int frac_digits = 0;
  bool seen_point = false;
  bool any_digit = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c >= '0' && c <= '9') {
      mantissa = mantissa * 10 + (c - '0');
      if (mantissa > kMax) return std::nullopt;
      if (seen_point) ++frac_digits;
      any_digit = true;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!any_digit) return std::nullopt;
  int exponent = 0;
  if (i < text.size()) {
    if (text[i] != 'e' && text[i] != 'E') return std::nullopt;
    ++i;
    auto rest = text.substr(i);
    if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), exponent);
    if (ec != std::errc() || ptr != rest.data() + rest.size()) return std::nullopt;
  }
  exponent -= frac_digits;
  if (exponent > 18 || exponent < -18) return std::nullopt;
  i128 pow10 = 1;
  for (int k = 0; k < std::abs(exponent); ++k) pow10 *= 10;
  if (negative) mantissa = -mantissa;
  return exponent >= 0 ? make(mantissa * pow10, 1) : make(mantissa, pow10);
}

std::optional<Rational> Rational::from_double(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  int exp2 = 0;
  double frac = std::frexp(v, &exp2);  // v = frac * 2^exp2, |frac| in [0.5, 1)
  // 53-bit integer mantissa
  auto mant = static_cast<i128>(std::ldexp(frac, 53));
  int shift = exp2 - 53;
  if (shift >= 0) {
    if (shift > 62) return std::nullopt;
    return make(mant << shift, 1);
  }
  // strip trailing zero bits before building the power-of-two denominator
  while (shift < 0 && mant != 0 && (mant & 1) == 0) {
    mant >>= 1;
    ++shift;
  }
  if (mant == 0) return Rational(0, 1);
  if (-shift > 62) return std::nullopt;
  return make(mant, static_cast<i128>(1) << (-shift));
}

std::optional<Rational> add(const Rational& a, const Rational& b) {
  if (!products_safe(a, b)) return std::nullopt;
  return make(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
              static_cast<i128>(a.den_) * b.den_);
}

std::optional<Rational> sub(const Rational& a, const Rational& b) {
  if (!products_safe(a, b)) return std::nullopt;
  return make(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
              static_cast<i128>(a.den_) * b.den_);
}

std::optional<Rational> scale(const Rational& a, std::int64_t num, std::int64_t den) {
  return make(static_cast<i128>(a.num_) * num, static_cast<i128>(a.den_) * den);
}

int compare(const Rational& a, const Rational& b) noexcept {
  i128 lhs = static_cast<i128>(a.num_) * b.den_;
  i128 rhs = static_cast<i128>(b.num_) * a.den_;
  return (lhs > rhs) - (lhs < rhs);
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

Exponent::Exponent(double v) : value(v), exact(Rational::from_double(v)) {}

Exponent::Exponent(Rational r) : value(r.to_double()), exact(r) {}

Exponent Exponent::parse(std::string_view text) {
  if (auto r = Rational::parse(text)) return Exponent(*r);
  std::string buf(text);
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str() || *end != '\0' || !std::isfinite(v)) {
    throw Error(Errc::ConfigError, "not a number: '" + buf + "'");
  }
  return Exponent(v);
}

int compare_affine(const Exponent& lhs, Rational lhs_scale, Rational lhs_offset,
                   const Exponent& rhs, Rational rhs_scale, Rational rhs_offset) {
  if (lhs.exact && rhs.exact) {
    auto l1 = scale(*lhs.exact, lhs_scale.num(), lhs_scale.den());
    auto r1 = scale(*rhs.exact, rhs_scale.num(), rhs_scale.den());
    if (l1 && r1) {
      auto l = add(*l1, lhs_offset);
      auto r = add(*r1, rhs_offset);
      if (l && r) return compare(*l, *r);
    }
  }
  double l = lhs_scale.to_double() * lhs.value + lhs_offset.to_double();
  double r = rhs_scale.to_double() * rhs.value + rhs_offset.to_double();
  return (l > r) - (l < r);
}

}  // namespace thinfilm
