#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <string>
#include <string_view>
#include <type_traits>

#include "orbitflow/error.hpp"

namespace orbitflow {

using Rational = boost::multiprecision::cpp_rational;

template <class T>
inline constexpr bool is_exact_v = std::is_same_v<T, Rational>;

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double x) { return x; }

inline Rational abs_value(const Rational& q) { return q < 0 ? Rational(-q) : q; }
inline double abs_value(double x) { return std::fabs(x); }

/// Parses "3", "-1/2", "+4/6" into a reduced rational.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  // tolerate a unicode minus sign
  if (const auto pos = s.find("\xE2\x88\x92"); pos != std::string::npos) s.replace(pos, 3, "-");
  if (!s.empty() && s.front() == '+') s.erase(0, 1);
  if (s.empty()) throw ParseError("empty rational literal");
  const auto slash = s.find('/');
  auto digits_ok = [](std::string_view part, bool allow_sign) {
    if (part.empty()) return false;
    std::size_t i = 0;
    if (allow_sign && part[0] == '-') i = 1;
    if (i == part.size()) return false;
    for (; i < part.size(); ++i)
      if (part[i] < '0' || part[i] > '9') return false;
    return true;
  };
  try {
    if (slash == std::string::npos) {
      if (!digits_ok(s, true)) throw ParseError("malformed rational literal '" + s + "'");
      return Rational(boost::multiprecision::cpp_int(s));
    }
    const std::string num = s.substr(0, slash);
    const std::string den = s.substr(slash + 1);
    if (!digits_ok(num, true) || !digits_ok(den, false)) throw ParseError("malformed rational literal '" + s + "'");
    const boost::multiprecision::cpp_int d(den);
    if (d == 0) throw ParseError("zero denominator in '" + s + "'");
    return Rational(boost::multiprecision::cpp_int(num), d);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception& e) {
    throw ParseError("malformed rational literal '" + s + "': " + e.what());
  }
}

/// Canonical text form: "p" or "p/q" with q > 0 and gcd(p, q) = 1.
inline std::string format_rational(const Rational& q) {
  const auto num = boost::multiprecision::numerator(q);
  const auto den = boost::multiprecision::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace orbitflow
