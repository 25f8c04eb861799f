#include "fprates/moduli.hpp"

#include <cmath>
#include <utility>

#include "fprates/errors.hpp"

namespace fprates {

namespace {

void require_eps(const Rational& eps) {
  if (eps <= 0 || eps > 2) throw DomainError("modulus argument eps must lie in (0,2], got " + to_string(eps));
}

// Round a positive double down and convert exactly.
Rational lower_rational(double value) {
  return to_rational(std::nextafter(std::nextafter(value, 0.0), 0.0));
}

}  // namespace

UcModulus::UcModulus(std::string id, Fn lower, bool monotone_in_r, std::optional<Fn> factored)
    : id_(std::move(id)), lower_(std::move(lower)), monotone_in_r_(monotone_in_r), factored_(std::move(factored)) {}

Rational UcModulus::eval(const Rational& r, const Rational& eps) const {
  if (r <= 0) throw DomainError("modulus argument r must be positive");
  require_eps(eps);
  return lower_(r, eps);
}

Rational UcModulus::eval_factored(const Rational& r, const Rational& eps) const {
  if (!factored_) throw DomainError("modulus " + id_ + " has no factored form");
  if (r <= 0) throw DomainError("modulus argument r must be positive");
  require_eps(eps);
  return (*factored_)(r, eps);
}

double UcModulus::eval(double r, double eps) const { return to_double(eval(to_rational(r), to_rational(eps))); }

BanachUcModulus::BanachUcModulus(std::string id, Fn lower, std::optional<Fn> factored)
    : id_(std::move(id)), lower_(std::move(lower)), factored_(std::move(factored)) {}

Rational BanachUcModulus::eval(const Rational& eps) const {
  require_eps(eps);
  return lower_(eps);
}

Rational BanachUcModulus::eval_factored(const Rational& eps) const {
  if (!factored_) throw DomainError("modulus " + id_ + " has no factored form");
  require_eps(eps);
  return (*factored_)(eps);
}

double BanachUcModulus::eval(double eps) const { return to_double(eval(to_rational(eps))); }

UcModulus cat0_modulus() {
  return UcModulus{
      "cat0",
      [](const Rational&, const Rational& eps) { return Rational{eps * eps / 8}; },
      true,
      [](const Rational&, const Rational& eps) { return Rational{eps / 8}; },
  };
}

BanachUcModulus lp_modulus(double p) {
  if (!std::isfinite(p) || p < 2) throw DomainError("lp_modulus needs 2 <= p < inf");
  std::string id = "lp:" + to_string(to_rational(p));
  if (p == std::floor(p) && p < 1e6) {
    const auto k = static_cast<unsigned long>(p);
    Rational scale{Nat{1}, Nat{k} << k};  // 1 / (p 2^p)
    scale.canonicalize();
    return BanachUcModulus{
        std::move(id),
        [k, scale](const Rational& eps) { return Rational{pow(eps, k) * scale}; },
        [k, scale](const Rational& eps) { return Rational{pow(eps, k - 1) * scale}; },
    };
  }
  return BanachUcModulus{
      std::move(id),
      [p](const Rational& eps) {
        return lower_rational(std::pow(to_double(eps), p) / (p * std::pow(2.0, p)));
      },
      [p](const Rational& eps) {
        return lower_rational(std::pow(to_double(eps), p - 1) / (p * std::pow(2.0, p)));
      },
  };
}

BanachUcModulus hilbert_modulus() { return lp_modulus(2.0); }

UcModulus as_uc_modulus(const BanachUcModulus& modulus) {
  std::optional<UcModulus::Fn> factored;
  if (modulus.has_factored()) {
    factored = [modulus](const Rational&, const Rational& eps) { return modulus.eval_factored(eps); };
  }
  return UcModulus{
      modulus.id(),
      [modulus](const Rational&, const Rational& eps) { return modulus.eval(eps); },
      true,
      std::move(factored),
  };
}

Rational clamp_eps(const Rational& eps) { return eps > 2 ? Rational{2} : eps; }

}  // namespace fprates
