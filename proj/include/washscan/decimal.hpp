#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace washscan {

/// Fixed-point decimal with 8 fractional digits on a signed 128-bit backing
/// integer. Addition and subtraction are exact (overflow throws);
/// multiplication rounds the 16-digit intermediate back to 8 digits,
/// half-up on the magnitude. Money fields throughout the pipeline use this
/// type so that sums and conservation checks are bit-reproducible.
class Decimal {
 public:
  static constexpr int kFracDigits = 8;
  static constexpr std::int64_t kScale = 100'000'000;

  constexpr Decimal() = default;

  static constexpr Decimal from_raw(__int128 raw) {
    Decimal d;
    d.raw_ = raw;
    return d;
  }

  static Decimal from_int(std::int64_t units) {
    return from_raw(static_cast<__int128>(units) * kScale);
  }

  /// Plain decimal notation only: [+-]digits[.digits]. Digits beyond the
  /// 8th fractional place are rounded half-up. Returns nullopt on any
  /// other shape (empty, lone sign, exponent, stray characters).
  static std::optional<Decimal> try_parse(std::string_view text) {
    std::size_t i = 0;
    bool negative = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      negative = text[i] == '-';
      ++i;
    }
    if (i >= text.size() || !is_digit(text[i])) return std::nullopt;

    unsigned __int128 mag = 0;
    int int_digits = 0;
    while (i < text.size() && is_digit(text[i])) {
      if (++int_digits > 30) return std::nullopt;
      mag = mag * 10 + unsigned(text[i] - '0');
      ++i;
    }
    int frac_seen = 0;
    bool round_up = false;
    if (i < text.size() && text[i] == '.') {
      ++i;
      if (i >= text.size() || !is_digit(text[i])) return std::nullopt;
      while (i < text.size() && is_digit(text[i])) {
        if (frac_seen < kFracDigits) {
          mag = mag * 10 + unsigned(text[i] - '0');
          ++frac_seen;
        } else if (frac_seen == kFracDigits) {
          // First extra digit decides the half-up rounding; the rest only
          // matter for the exact half case, which half-up ignores anyway.
          round_up = text[i] >= '5';
          ++frac_seen;
        }
        ++i;
      }
    }
    if (i != text.size()) return std::nullopt;
    int missing = kFracDigits - (frac_seen > kFracDigits ? kFracDigits : frac_seen);
    for (int k = 0; k < missing; ++k) mag *= 10;
    if (round_up) mag += 1;
    if (mag > kMaxMagnitude) return std::nullopt;
    __int128 raw = static_cast<__int128>(mag);
    return from_raw(negative ? -raw : raw);
  }

  static Decimal parse(std::string_view text) {
    auto d = try_parse(text);
    if (!d) throw std::invalid_argument("bad decimal: '" + std::string(text) + "'");
    return *d;
  }

  constexpr __int128 raw() const { return raw_; }
  constexpr bool is_zero() const { return raw_ == 0; }
  constexpr bool is_negative() const { return raw_ < 0; }
  constexpr bool is_positive() const { return raw_ > 0; }

  double to_double() const { return static_cast<double>(raw_) / double(kScale); }

  Decimal operator-() const { return from_raw(-raw_); }

  Decimal operator+(Decimal o) const {
    __int128 r;
    if (__builtin_add_overflow(raw_, o.raw_, &r)) throw std::overflow_error("decimal add overflow");
    return from_raw(r);
  }
  Decimal operator-(Decimal o) const {
    __int128 r;
    if (__builtin_sub_overflow(raw_, o.raw_, &r)) throw std::overflow_error("decimal sub overflow");
    return from_raw(r);
  }
  Decimal& operator+=(Decimal o) { return *this = *this + o; }
  Decimal& operator-=(Decimal o) { return *this = *this - o; }

  /// Product rounded back to 8 fractional digits, half-up on the magnitude.
  Decimal operator*(Decimal o) const {
    __int128 prod;
    if (__builtin_mul_overflow(raw_, o.raw_, &prod)) throw std::overflow_error("decimal mul overflow");
    return from_raw(div_round_half_up(prod, kScale));
  }
  Decimal& operator*=(Decimal o) { return *this = *this * o; }

  /// num/den rounded half-up to `frac_digits` decimal places (den != 0).
  static Decimal ratio(Decimal num, Decimal den, int frac_digits) {
    if (den.raw_ == 0) throw std::domain_error("decimal ratio: zero denominator");
    if (frac_digits < 0 || frac_digits > kFracDigits) throw std::invalid_argument("ratio digits");
    __int128 pow = 1;
    for (int i = 0; i < frac_digits; ++i) pow *= 10;
    __int128 scaled;
    if (__builtin_mul_overflow(num.raw_, pow, &scaled)) throw std::overflow_error("decimal ratio overflow");
    __int128 q = div_round_half_up(scaled, den.raw_);
    __int128 rescale = kScale;
    for (int i = 0; i < frac_digits; ++i) rescale /= 10;
    __int128 raw;
    if (__builtin_mul_overflow(q, rescale, &raw)) throw std::overflow_error("decimal ratio overflow");
    return from_raw(raw);
  }

  /// 100*num/den as a percentage with exactly 2 decimal places, half-up.
  static Decimal percent(Decimal num, Decimal den) {
    return ratio(num * from_int(100), den, 2);
  }
  static Decimal percent_of_counts(std::uint64_t num, std::uint64_t den) {
    return percent(from_int(static_cast<std::int64_t>(num)),
                   from_int(static_cast<std::int64_t>(den)));
  }

  /// Value rounded half-up to `frac_digits` places (still scale-8 inside).
  Decimal round_to(int frac_digits) const {
    if (frac_digits < 0 || frac_digits >= kFracDigits) return *this;
    __int128 pow = 1;
    for (int i = 0; i < kFracDigits - frac_digits; ++i) pow *= 10;
    return from_raw(div_round_half_up(raw_, pow) * pow);
  }

  Decimal abs() const { return raw_ < 0 ? from_raw(-raw_) : *this; }

  auto operator<=>(const Decimal& o) const = default;

  /// Canonical form: sign, integer part, fraction with trailing zeros
  /// trimmed, no decimal point when the fraction is empty. Round-trips
  /// exactly through parse().
  std::string to_string() const {
    unsigned __int128 mag = raw_ < 0 ? static_cast<unsigned __int128>(-raw_)
                                     : static_cast<unsigned __int128>(raw_);
    unsigned __int128 whole = mag / kScale;
    std::uint64_t frac = static_cast<std::uint64_t>(mag % kScale);
    std::string out;
    if (raw_ < 0) out.push_back('-');
    out += u128_to_string(whole);
    if (frac != 0) {
      char buf[kFracDigits + 1];
      for (int i = kFracDigits - 1; i >= 0; --i) {
        buf[i] = char('0' + frac % 10);
        frac /= 10;
      }
      int len = kFracDigits;
      while (len > 0 && buf[len - 1] == '0') --len;
      out.push_back('.');
      out.append(buf, std::size_t(len));
    }
    return out;
  }

  /// Fixed formatting with exactly `frac_digits` places, rounding half-up.
  std::string format_fixed(int frac_digits) const {
    Decimal r = round_to(frac_digits);
    unsigned __int128 mag = r.raw_ < 0 ? static_cast<unsigned __int128>(-r.raw_)
                                       : static_cast<unsigned __int128>(r.raw_);
    unsigned __int128 whole = mag / kScale;
    std::uint64_t frac = static_cast<std::uint64_t>(mag % kScale);
    std::string out;
    if (r.raw_ < 0 && (whole != 0 || frac != 0)) out.push_back('-');
    out += u128_to_string(whole);
    if (frac_digits > 0) {
      out.push_back('.');
      std::uint64_t div = kScale / 10;
      for (int i = 0; i < frac_digits; ++i) {
        out.push_back(char('0' + (frac / div) % 10));
        div /= 10;
      }
    }
    return out;
  }

  static std::string u128_to_string(unsigned __int128 v) {
    char buf[48];
    int i = 48;
    do {
      buf[--i] = char('0' + int(v % 10));
      v /= 10;
    } while (v != 0);
    return std::string(buf + i, std::size_t(48 - i));
  }

 private:
  static constexpr bool is_digit(char c) { return c >= '0' && c <= '9'; }

  // kMaxMagnitude leaves headroom so add/sub of any two parsed values
  // cannot wrap the 128-bit backing integer.
  static constexpr unsigned __int128 kMaxMagnitude =
      (static_cast<unsigned __int128>(1) << 126);

  /// Half-up on the magnitude (away from zero when num/den is negative).
  static __int128 div_round_half_up(__int128 num, __int128 den) {
    bool neg = (num < 0) != (den < 0);
    unsigned __int128 n = num < 0 ? static_cast<unsigned __int128>(-num)
                                  : static_cast<unsigned __int128>(num);
    unsigned __int128 d = den < 0 ? static_cast<unsigned __int128>(-den)
                                  : static_cast<unsigned __int128>(den);
    unsigned __int128 q = n / d;
    unsigned __int128 rem = n % d;
    if (rem * 2 >= d) ++q;
    __int128 out = static_cast<__int128>(q);
    return neg ? -out : out;
  }

  __int128 raw_ = 0;
};

namespace decimal_detail {

// 256-bit product of two magnitudes below 2^127, little-endian 64-bit limbs.
struct U256 {
  std::uint64_t w[4] = {0, 0, 0, 0};
};

inline U256 mul_u128(unsigned __int128 x, unsigned __int128 y) {
  const std::uint64_t x0 = static_cast<std::uint64_t>(x), x1 = static_cast<std::uint64_t>(x >> 64);
  const std::uint64_t y0 = static_cast<std::uint64_t>(y), y1 = static_cast<std::uint64_t>(y >> 64);
  const unsigned __int128 p00 = static_cast<unsigned __int128>(x0) * y0;
  const unsigned __int128 p01 = static_cast<unsigned __int128>(x0) * y1;
  const unsigned __int128 p10 = static_cast<unsigned __int128>(x1) * y0;
  const unsigned __int128 p11 = static_cast<unsigned __int128>(x1) * y1;
  U256 r;
  r.w[0] = static_cast<std::uint64_t>(p00);
  const unsigned __int128 mid =
      (p00 >> 64) + static_cast<std::uint64_t>(p01) + static_cast<std::uint64_t>(p10);
  r.w[1] = static_cast<std::uint64_t>(mid);
  const unsigned __int128 hi =
      (mid >> 64) + (p01 >> 64) + (p10 >> 64) + static_cast<std::uint64_t>(p11);
  r.w[2] = static_cast<std::uint64_t>(hi);
  r.w[3] = static_cast<std::uint64_t>((hi >> 64) + (p11 >> 64));
  return r;
}

}  // namespace decimal_detail

/// Exact three-way comparison of |a|*|b| against |c|*|d|, no rounding.
/// Threshold checks like |p - p0| <= dev * p0 stay exact at the boundary.
inline int compare_abs_products(Decimal a, Decimal b, Decimal c, Decimal d) {
  auto mag = [](Decimal v) {
    __int128 r = v.raw();
    return r < 0 ? static_cast<unsigned __int128>(-r) : static_cast<unsigned __int128>(r);
  };
  const auto lhs = decimal_detail::mul_u128(mag(a), mag(b));
  const auto rhs = decimal_detail::mul_u128(mag(c), mag(d));
  for (int i = 3; i >= 0; --i) {
    if (lhs.w[i] != rhs.w[i]) return lhs.w[i] < rhs.w[i] ? -1 : 1;
  }
  return 0;
}

}  // namespace washscan
