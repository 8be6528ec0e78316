#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace cobarlab {

// Exact arithmetic substrate. Rat is always in lowest terms with positive
// denominator (cpp_rational maintains this invariant).
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

inline std::string to_string(const Rat& r) { return r.str(); }
inline std::string to_string(const Int& n) { return n.str(); }

inline Int int_abs(const Int& n) { return n < 0 ? Int(-n) : n; }

inline Int int_gcd(Int a, Int b) {
    a = int_abs(a); b = int_abs(b);
    while (b != 0) { Int t = a % b; a = b; b = t; }
    return a;
}

} // namespace cobarlab
