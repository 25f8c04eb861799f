#pragma once

// Exact naturals and rationals for bound evaluation, with directed rounding.
//
// Every real-valued subexpression of a rate formula is carried as a Rational
// that is a one-sided bound of the true value; the direction is chosen by the
// caller so that the final natural over-approximates the bound.

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace fprates {

using Nat = mpz_class;
using Rational = mpq_class;

/// Budget for iterated big-int evaluations. Past it, evaluation stops and
/// reports the value reached so far as a lower bound.
struct EvalLimits {
  std::size_t max_bits = std::size_t{1} << 24;
  std::uint64_t max_steps = 200'000'000;
};

/// A natural that is exact unless `saturated`, in which case it is a lower bound.
struct Bounded {
  Nat value;
  bool saturated = false;
};

/// Rational upper bound of e (2.7182818284590456).
const Rational& e_upper();
/// Rational lower bound of e (2.718281828459045).
const Rational& e_lower();

Nat ceil(const Rational& q);
Nat floor(const Rational& q);

/// Truncated subtraction max(0, a - b).
Nat monus(const Nat& a, const Nat& b);

/// Upper bound of exp(k): e_upper()^k, exact rational power.
Rational exp_upper(const Nat& k);

/// ceil(ln x) rounded upward: the least k >= 0 with e_lower()^k >= x.
Nat ceil_ln_upper(const Rational& x);

/// Exact ceil(base^exponent) for a nonnegative rational exponent p/q; the
/// q-th root is taken with integer arithmetic.
Nat ceil_pow(unsigned long base, const Rational& exponent);

Rational pow(const Rational& base, unsigned long exponent);

/// Parses "0.25", "1/3", "2", "1e-3", "-0.5" exactly.
Rational parse_rational(std::string_view text);

/// Exact binary value of a finite double.
Rational to_rational(double value);

double to_double(const Rational& q);

/// Shortest decimal rendering when the denominator is 2^a 5^b, "p/q" otherwise.
std::string to_string(const Rational& q);
std::string to_string(const Nat& n);

std::uint64_t to_u64(const Nat& n);

/// Shortest round-trip decimal for a double.
std::string format_double(double value);
bool fits_u64(const Nat& n);

}  // namespace fprates
