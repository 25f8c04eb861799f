#include "fprates/numeric.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>

#include "fprates/errors.hpp"

namespace fprates {

const Rational& e_upper() {
  static const Rational value{Nat{"27182818284590456"}, Nat{"10000000000000000"}};
  return value;
}

const Rational& e_lower() {
  static const Rational value{Nat{"2718281828459045"}, Nat{"1000000000000000"}};
  return value;
}

Nat ceil(const Rational& q) {
  Nat out;
  mpz_cdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

Nat floor(const Rational& q) {
  Nat out;
  mpz_fdiv_q(out.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return out;
}

Nat monus(const Nat& a, const Nat& b) { return a > b ? Nat{a - b} : Nat{0}; }

Rational pow(const Rational& base, unsigned long exponent) {
  Nat num;
  Nat den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  Rational out{num, den};
  out.canonicalize();
  return out;
}

Rational exp_upper(const Nat& k) {
  if (k < 0) throw DomainError("exp_upper: negative exponent");
  if (!k.fits_ulong_p()) throw DomainError("exp_upper: exponent too large: " + k.get_str());
  return pow(e_upper(), k.get_ui());
}

Nat ceil_ln_upper(const Rational& x) {
  if (x <= 0) throw DomainError("ceil_ln_upper: nonpositive argument");
  if (x <= 1) return 0;
  // Start below the answer using a double estimate, then walk up exactly.
  const double approx = std::log(to_double(x));
  unsigned long k = approx > 3.0 && std::isfinite(approx) ? static_cast<unsigned long>(approx) - 2 : 0;
  Rational p = pow(e_lower(), k);
  while (p < x) {
    p *= e_lower();
    ++k;
  }
  return Nat{k};
}

Nat ceil_pow(unsigned long base, const Rational& exponent) {
  if (exponent < 0) throw DomainError("ceil_pow: negative exponent");
  const Nat& p = exponent.get_num();
  const Nat& q = exponent.get_den();
  if (!p.fits_ulong_p() || !q.fits_ulong_p()) throw DomainError("ceil_pow: exponent too large");
  Nat power;
  mpz_ui_pow_ui(power.get_mpz_t(), base, p.get_ui());
  if (q == 1) return power;
  Nat root;
  const int exact = mpz_root(root.get_mpz_t(), power.get_mpz_t(), q.get_ui());
  if (!exact) root += 1;
  return root;
}

Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw DomainError("not a rational number: '" + std::string(text) + "'");
  };
  if (text.empty()) return fail();
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const Rational num = parse_rational(text.substr(0, slash));
    const Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) return fail();
    Rational out = num / den;
    out.canonicalize();
    return out;
  }
  std::size_t pos = 0;
  bool negative = false;
  if (text[pos] == '+' || text[pos] == '-') {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long scale = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) ++scale;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) return fail();
  long exponent = 0;
  if (pos < text.size()) {
    if (text[pos] != 'e' && text[pos] != 'E') return fail();
    ++pos;
    bool exp_negative = false;
    if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
      exp_negative = text[pos] == '-';
      ++pos;
    }
    if (pos == text.size()) return fail();
    for (; pos < text.size(); ++pos) {
      if (!std::isdigit(static_cast<unsigned char>(text[pos]))) return fail();
      exponent = exponent * 10 + (text[pos] - '0');
      if (exponent > 100000) return fail();
    }
    if (exp_negative) exponent = -exponent;
  }
  Nat num{digits, 10};
  const long shift = exponent - scale;
  Nat ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(shift < 0 ? -shift : shift));
  Rational out = shift >= 0 ? Rational{num * ten_pow} : Rational{num, ten_pow};
  out.canonicalize();
  return negative ? Rational{-out} : out;
}

Rational to_rational(double value) {
  if (!std::isfinite(value)) throw DomainError("to_rational: non-finite value");
  return Rational{value};
}

double to_double(const Rational& q) { return q.get_d(); }

std::string to_string(const Nat& n) { return n.get_str(); }

std::string to_string(const Rational& q) {
  Nat den = q.get_den();
  unsigned long twos = 0;
  unsigned long fives = 0;
  while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
    den /= 2;
    ++twos;
  }
  while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
    den /= 5;
    ++fives;
  }
  if (den != 1) return q.get_str();
  const unsigned long places = twos > fives ? twos : fives;
  Nat ten_pow;
  mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, places);
  Nat scaled = q.get_num() * ten_pow / q.get_den();
  const bool negative = scaled < 0;
  if (negative) scaled = -scaled;
  std::string digits = scaled.get_str();
  if (places > 0) {
    if (digits.size() <= places) digits.insert(0, places - digits.size() + 1, '0');
    digits.insert(digits.size() - places, ".");
  }
  return negative ? "-" + digits : digits;
}

bool fits_u64(const Nat& n) {
  if (n < 0) return false;
  return mpz_sizeinbase(n.get_mpz_t(), 2) <= 64;
}

std::uint64_t to_u64(const Nat& n) {
  if (!fits_u64(n)) throw DomainError("value does not fit in 64 bits: " + n.get_str());
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, n.get_mpz_t());
  return out;
}

std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), end);
}

}  // namespace fprates
