#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace amrenorm {

// All scalar values in this library are exact rationals. Boost's cpp_rational
// keeps values reduced with a positive denominator, which is exactly the
// invariant we need everywhere.
using Rat = boost::multiprecision::cpp_rational;
using Int = boost::multiprecision::cpp_int;

inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

/// Parses "a" or "a/b" (optionally signed). Throws std::invalid_argument on
/// malformed input or a zero denominator.
inline Rat parse_rat(std::string_view text) {
  auto trim = [](std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t')) v.remove_suffix(1);
    return v;
  };
  text = trim(text);
  if (text.empty()) throw std::invalid_argument("empty rational literal");

  auto parse_int = [&](std::string_view v) -> Int {
    v = trim(v);
    if (v.empty()) throw std::invalid_argument("malformed rational literal");
    std::size_t i = (v[0] == '+' || v[0] == '-') ? 1 : 0;
    if (i == v.size()) throw std::invalid_argument("malformed rational literal");
    for (; i < v.size(); ++i)
      if (v[i] < '0' || v[i] > '9')
        throw std::invalid_argument("malformed rational literal: " + std::string(v));
    return Int(std::string(v));
  };

  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rat(parse_int(text));
  Int num = parse_int(text.substr(0, slash));
  Int den = parse_int(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in rational literal");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rat(num, den);
}

/// Renders a rational as "a" (integer) or "a/b" with b > 1.
inline std::string rat_str(const Rat& r) {
  std::string out = numerator(r).str();
  if (denominator(r) != 1) {
    out += '/';
    out += denominator(r).str();
  }
  return out;
}

/// Exact integer power, negative exponents included. Base must be nonzero.
inline Rat pow_rat(const Rat& base, long long exp) {
  if (base == 0 && exp <= 0) throw std::domain_error("pow_rat: zero base with nonpositive exponent");
  Rat b = base;
  unsigned long long e;
  if (exp < 0) {
    b = Rat(denominator(base), numerator(base));
    e = static_cast<unsigned long long>(-(exp + 1)) + 1;
  } else {
    e = static_cast<unsigned long long>(exp);
  }
  Rat acc(1);
  while (e > 0) {
    if (e & 1ULL) acc *= b;
    b *= b;
    e >>= 1ULL;
  }
  return acc;
}

}  // namespace amrenorm
