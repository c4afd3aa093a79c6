#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "avmac/util.hpp"

namespace avmac {

using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rat& r) { return r.convert_to<double>(); }

// "p/q" or a plain integer string
inline Rat parse_rational(const std::string& text) {
  auto slash = text.find('/');
  try {
    if (slash == std::string::npos) return Rat(BigInt(text));
    BigInt num(text.substr(0, slash));
    BigInt den(text.substr(slash + 1));
    if (den == 0) throw Error(Errc::parse_error, "zero denominator in '" + text + "'");
    return Rat(num, den);
  } catch (const std::runtime_error&) {
    throw Error(Errc::parse_error, "bad rational literal '" + text + "'");
  }
}

inline std::string format_rational(const Rat& r) {
  std::string s = numerator(r).str();
  if (denominator(r) != 1) s += "/" + denominator(r).str();
  return s;
}

}  // namespace avmac
