#pragma once

// Moduli of uniform convexity.
//
// Evaluations return exact rationals that never exceed the true modulus, so
// a bound computed from them can only grow. Arguments eps must lie in (0,2].

#include <functional>
#include <optional>
#include <string>

#include "fprates/numeric.hpp"

namespace fprates {

/// eta(r, eps) for W-hyperbolic spaces.
class UcModulus {
 public:
  using Fn = std::function<Rational(const Rational& r, const Rational& eps)>;

  UcModulus(std::string id, Fn lower, bool monotone_in_r, std::optional<Fn> factored = std::nullopt);

  const std::string& id() const { return id_; }
  bool monotone_in_r() const { return monotone_in_r_; }
  bool has_factored() const { return factored_.has_value(); }

  Rational eval(const Rational& r, const Rational& eps) const;
  /// eta~ with eta(r, eps) = eps * eta~(r, eps); DomainError if absent.
  Rational eval_factored(const Rational& r, const Rational& eps) const;
  double eval(double r, double eps) const;

 private:
  std::string id_;
  Fn lower_;
  bool monotone_in_r_;
  std::optional<Fn> factored_;
};

/// eta(eps) for Banach spaces.
class BanachUcModulus {
 public:
  using Fn = std::function<Rational(const Rational& eps)>;

  BanachUcModulus(std::string id, Fn lower, std::optional<Fn> factored = std::nullopt);

  const std::string& id() const { return id_; }
  bool has_factored() const { return factored_.has_value(); }

  Rational eval(const Rational& eps) const;
  Rational eval_factored(const Rational& eps) const;
  double eval(double eps) const;

 private:
  std::string id_;
  Fn lower_;
  std::optional<Fn> factored_;
};

/// eps^2/8, independent of r, factored form eps/8.
UcModulus cat0_modulus();

/// eps^p / (p 2^p), factored eps^(p-1) / (p 2^p). DomainError unless 2 <= p < inf.
/// Integer p is evaluated exactly; other p are rounded down.
BanachUcModulus lp_modulus(double p);

/// lp_modulus(2): eps^2/8.
BanachUcModulus hilbert_modulus();

/// A normed-space modulus used as an r-independent W-hyperbolic modulus (valid by scaling).
UcModulus as_uc_modulus(const BanachUcModulus& modulus);

/// min(eps, 2); the clamp only enlarges the modulus value.
Rational clamp_eps(const Rational& eps);

}  // namespace fprates
