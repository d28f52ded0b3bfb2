#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace tally {

// Exact arithmetic everywhere. Counts can exceed 64 bits (the model census is
// doubly exponential in the signature) and ratios must never round.
using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Canonical text for a rational: lowest terms, "num/den", bare "num" when the
// denominator is 1. This is the only fraction format the JSON layer emits.
inline std::string to_text(const Rational& value) {
  std::string out = numerator(value).str();
  if (denominator(value) != 1) {
    out += '/';
    out += denominator(value).str();
  }
  return out;
}

inline std::string to_text(const BigInt& value) { return value.str(); }

inline bool in_unit_interval(const Rational& value) {
  return value >= 0 && value <= 1;
}

namespace detail {

inline bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace detail

// Parses a canonical numeral: "0", "17", "4/5", "0.8". A decimal with k
// fractional digits means the exact fraction over 10^k; no floating point is
// involved. Returns nullopt for anything else (signs, exponents, spaces).
inline std::optional<Rational> parse_numeral(std::string_view text) {
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    std::string_view num = text.substr(0, slash);
    std::string_view den = text.substr(slash + 1);
    if (!detail::all_digits(num) || !detail::all_digits(den)) return std::nullopt;
    BigInt d{std::string(den)};
    if (d == 0) return std::nullopt;
    return Rational(BigInt(std::string(num)), d);
  }
  if (auto dot = text.find('.'); dot != std::string_view::npos) {
    std::string_view whole = text.substr(0, dot);
    std::string_view frac = text.substr(dot + 1);
    if (!detail::all_digits(whole) || !detail::all_digits(frac)) return std::nullopt;
    BigInt scale = 1;
    for (size_t i = 0; i < frac.size(); ++i) scale *= 10;
    BigInt top = BigInt(std::string(whole)) * scale + BigInt(std::string(frac));
    return Rational(top, scale);
  }
  if (!detail::all_digits(text)) return std::nullopt;
  return Rational(BigInt(std::string(text)));
}

}  // namespace tally
