#include "smartpaste/decimal.hpp"

#include <algorithm>
#include <cctype>

namespace smartpaste {

namespace {

Decimal::Int pow10(int n) {
  Decimal::Int r = 1;
  for (int i = 0; i < n; ++i) r *= 10;
  return r;
}

// Returns a's and b's mantissas rescaled to the larger of the two scales.
std::pair<Decimal::Int, Decimal::Int> aligned(const Decimal& a, const Decimal& b, int& scale) {
  scale = std::max(a.scale(), b.scale());
  return {a.mantissa() * pow10(scale - a.scale()), b.mantissa() * pow10(scale - b.scale())};
}

// Integer division rounding half away from zero.
Decimal::Int div_round(const Decimal::Int& n, const Decimal::Int& d) {
  Decimal::Int an = n < 0 ? Decimal::Int(-n) : n;
  Decimal::Int ad = d < 0 ? Decimal::Int(-d) : d;
  Decimal::Int q = (2 * an + ad) / (2 * ad);
  bool negative = (n < 0) != (d < 0);
  return negative ? Decimal::Int(-q) : q;
}

}  // namespace

Decimal::Decimal(Int mantissa, int scale) : mantissa_(std::move(mantissa)), scale_(scale) {
  if (scale_ < 0) {
    mantissa_ *= pow10(-scale_);
    scale_ = 0;
  }
}

std::optional<Decimal> Decimal::parse(std::string_view text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
    negative = text[i] == '-';
    ++i;
  }
  std::string digits;
  int scale = 0;
  std::size_t int_start = i;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) digits += text[i++];
  if (i == int_start) return std::nullopt;
  if (i < text.size() && text[i] == '.') {
    ++i;
    std::size_t frac_start = i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      digits += text[i++];
      ++scale;
    }
    if (i == frac_start) return std::nullopt;
  }
  if (i != text.size()) return std::nullopt;
  // cpp_int reads a leading 0 as an octal prefix.
  std::size_t nz = digits.find_first_not_of('0');
  Int m(nz == std::string::npos ? std::string("0") : digits.substr(nz));
  if (negative) m = -m;
  return Decimal(std::move(m), scale);
}

std::string Decimal::to_string() const {
  Int abs_m = mantissa_ < 0 ? Int(-mantissa_) : mantissa_;
  std::string digits = abs_m.str();
  if (scale_ > 0) {
    if (static_cast<int>(digits.size()) <= scale_)
      digits.insert(0, static_cast<std::size_t>(scale_ - digits.size() + 1), '0');
    digits.insert(digits.size() - static_cast<std::size_t>(scale_), ".");
  }
  if (mantissa_ < 0) digits.insert(0, "-");
  return digits;
}

Decimal Decimal::normalized() const {
  Int m = mantissa_;
  int s = scale_;
  while (s > 0 && m % 10 == 0) {
    m /= 10;
    --s;
  }
  return Decimal(std::move(m), s);
}

Decimal Decimal::round_half_up(int places) const {
  if (places < 0) places = 0;
  if (scale_ <= places) return *this;
  return Decimal(div_round(mantissa_, pow10(scale_ - places)), places);
}

Decimal operator+(const Decimal& a, const Decimal& b) {
  int scale = 0;
  auto [x, y] = aligned(a, b, scale);
  return Decimal(x + y, scale);
}

Decimal operator-(const Decimal& a, const Decimal& b) {
  int scale = 0;
  auto [x, y] = aligned(a, b, scale);
  return Decimal(x - y, scale);
}

Decimal operator*(const Decimal& a, const Decimal& b) {
  return Decimal(a.mantissa_ * b.mantissa_, a.scale_ + b.scale_);
}

std::optional<Decimal> Decimal::divide(const Decimal& a, const Decimal& b, int digits) {
  if (b.is_zero()) return std::nullopt;
  // a/b = (ma / mb) * 10^(sb - sa); scale the numerator so the quotient has
  // `target` fractional digits.
  int target = std::max(digits, a.scale_ - b.scale_);
  int exponent = target + b.scale_ - a.scale_;
  Int q = div_round(a.mantissa_ * pow10(exponent), b.mantissa_);
  return Decimal(std::move(q), target).normalized();
}

std::strong_ordering operator<=>(const Decimal& a, const Decimal& b) {
  int scale = 0;
  auto [x, y] = aligned(a, b, scale);
  if (x < y) return std::strong_ordering::less;
  if (x > y) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

}  // namespace smartpaste
