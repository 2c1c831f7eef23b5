#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "carnot/common.hpp"

namespace carnot {

// Exact arithmetic backend. BCH in a 2-step group needs only +, *, 1/2, so
// rationals make the lattice/property-test paths tolerance-free.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double x) { return x; }

template <class S>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static double from_double(double x) { return x; }
  static double abs(double x) { return x < 0 ? -x : x; }
  static double sqrt(double x) {
    require(x >= 0, ErrorCode::InvalidArgument, "sqrt of negative value");
    return std::sqrt(x);
  }
  static double half() { return 0.5; }
  static bool is_zero(double x, double tol = 0.0) { return abs(x) <= tol; }
};

template <>
struct ScalarOps<Rational> {
  static Rational from_double(double x) { return Rational(x); }  // dyadic, exact
  static Rational abs(const Rational& x) { return x < 0 ? Rational(-x) : x; }
  // Exact square root; defined only for perfect squares of rationals.
  static Rational sqrt(const Rational& x) {
    require(x >= 0, ErrorCode::InvalidArgument, "sqrt of negative value");
    BigInt num = boost::multiprecision::numerator(x);
    BigInt den = boost::multiprecision::denominator(x);
    BigInt rn = boost::multiprecision::sqrt(num);
    BigInt rd = boost::multiprecision::sqrt(den);
    require(rn * rn == num && rd * rd == den, ErrorCode::NotRepresentable,
            "rational sqrt is irrational");
    return Rational(rn, rd);
  }
  static Rational half() { return Rational(1, 2); }
  static bool is_zero(const Rational& x, const Rational& = Rational(0)) { return x == 0; }
};

}  // namespace carnot
