#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace smartpaste {

/// Exact base-10 number: mantissa * 10^-scale.
///
/// The scale is kept as written ("1.50" stays two places) so rendering never
/// drifts; comparison and equality are numeric ("1.50" == "1.5").
class Decimal {
 public:
  using Int = boost::multiprecision::cpp_int;

  /// Digits kept after the point by division before trailing zeros are
  /// stripped.
  static constexpr int kDivisionDigits = 16;

  Decimal() = default;
  Decimal(Int mantissa, int scale);
  static Decimal from_int(long long v) { return Decimal(Int(v), 0); }

  /// Accepts `[+-]?[0-9]+(\.[0-9]+)?` and nothing else.
  static std::optional<Decimal> parse(std::string_view text);

  std::string to_string() const;

  const Int& mantissa() const { return mantissa_; }
  int scale() const { return scale_; }
  int sign() const { return mantissa_.sign(); }
  bool is_zero() const { return mantissa_.is_zero(); }

  /// Same value with trailing fractional zeros removed.
  Decimal normalized() const;
  Decimal negated() const { return Decimal(-mantissa_, scale_); }
  Decimal abs() const { return Decimal(mantissa_ < 0 ? Int(-mantissa_) : mantissa_, scale_); }

  /// Round half away from zero to `places` fractional digits; values that
  /// already fit are returned unchanged.
  Decimal round_half_up(int places) const;

  friend Decimal operator+(const Decimal& a, const Decimal& b);
  friend Decimal operator-(const Decimal& a, const Decimal& b);
  friend Decimal operator*(const Decimal& a, const Decimal& b);
  /// nullopt on division by zero.
  static std::optional<Decimal> divide(const Decimal& a, const Decimal& b,
                                       int digits = kDivisionDigits);

  friend std::strong_ordering operator<=>(const Decimal& a, const Decimal& b);
  friend bool operator==(const Decimal& a, const Decimal& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }

 private:
  Int mantissa_{0};
  int scale_{0};
};

}  // namespace smartpaste
