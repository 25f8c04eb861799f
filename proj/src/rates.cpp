#include "fprates/rates.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <sstream>

#include "fprates/errors.hpp"

namespace fprates {

namespace {

const std::vector<std::pair<Formula, const char*>>& formula_names() {
  static const std::vector<std::pair<Formula, const char*>> names = {
      {Formula::Brs, "brs"},
      {Formula::BrsConstant, "brs-constant"},
      {Formula::BrsOrbitBounded, "brs-orbit-bounded"},
      {Formula::BrsDirneOrbit, "brs-dirne-orbit"},
      {Formula::BrsDirneConstant, "brs-dirne-constant"},
      {Formula::Groetsch, "groetsch"},
      {Formula::GroetschFactored, "groetsch-factored"},
      {Formula::Cat0General, "cat0-general"},
      {Formula::Cat0Constant, "cat0-constant"},
      {Formula::Halpern, "halpern"},
      {Formula::HalpernOneOverN, "halpern-1overn"},
      {Formula::IshikawaH, "ishikawa-h"},
      {Formula::IshikawaTheorem, "ishikawa-theorem"},
      {Formula::IshikawaTheoremFactored, "ishikawa-theorem-factored"},
      {Formula::IshikawaConstantLambda, "ishikawa-constant-lambda"},
      {Formula::IshikawaConstantLambdaFactored, "ishikawa-constant-lambda-factored"},
      {Formula::IshikawaCat0Constant, "ishikawa-cat0-constant"},
      {Formula::AsneGeneral, "asne-general"},
      {Formula::AsneGeneralFactored, "asne-general-factored"},
      {Formula::AsneAfp, "asne-afp"},
      {Formula::AsneCat0, "asne-cat0"},
      {Formula::GlbWitness, "glb-witness"},
      {Formula::GlbWindow, "glb-window"},
      {Formula::ErgodicGeneral, "ergodic-general"},
      {Formula::ErgodicFactored, "ergodic-factored"},
      {Formula::ErgodicHilbert, "ergodic-hilbert"},
      {Formula::Agt, "agt"},
  };
  return names;
}

class Builder {
 public:
  explicit Builder(Formula f) { bv_.formula = f; }

  Builder& in(const std::string& key, const std::string& value) {
    bv_.inputs.emplace_back(key, value);
    return *this;
  }
  Builder& in(const std::string& key, const Rational& value) { return in(key, to_string(value)); }
  Builder& in(const std::string& key, const Nat& value) { return in(key, value.get_str()); }
  Builder& mid(const std::string& key, const Rational& value) {
    bv_.intermediates.emplace_back(key, to_string(value));
    return *this;
  }
  Builder& mid(const std::string& key, const Nat& value) {
    bv_.intermediates.emplace_back(key, value.get_str());
    return *this;
  }
  Builder& note(std::string text) {
    bv_.notes.push_back(std::move(text));
    return *this;
  }
  Builder& saturate(bool s) {
    bv_.saturated = bv_.saturated || s;
    return *this;
  }
  BoundValue done(Nat value) {
    bv_.value = std::move(value);
    if (bv_.saturated) bv_.notes.push_back("evaluation budget exhausted; value is a lower bound of the formula");
    return bv_;
  }

 private:
  BoundValue bv_;
};

void require_positive(const Rational& q, const char* name) {
  if (q <= 0) throw DomainError(std::string(name) + " must be positive, got " + to_string(q));
}

void require_monotone(const UcModulus& m) {
  if (!m.monotone_in_r()) throw DomainError("modulus " + m.id() + " is not monotone");
}

std::size_t bits(const Nat& n) { return n == 0 ? 0 : mpz_sizeinbase(n.get_mpz_t(), 2); }

/// ceil(factor * e^k), or a lower bound through e > 2 when e_upper^k would
/// not fit the bit budget.
Bounded ceil_exp(const Rational& factor, const Nat& k, const EvalLimits& limits) {
  constexpr unsigned long bits_per_factor = 56;
  if (k.fits_ulong_p() && k.get_ui() <= limits.max_bits / bits_per_factor)
    return {ceil(Rational{factor * exp_upper(k)}), false};
  unsigned long e = k.fits_ulong_p() ? std::min<unsigned long>(k.get_ui(), limits.max_bits) : limits.max_bits;
  Nat two_e = Nat{1} << e;
  return {floor(Rational{factor * two_e}), true};
}

/// h^times(start), for h with h(n) >= n along the orbit. Affine h has a closed form.
Bounded iterate(const NatFn& h, const Nat& start, const Nat& times, const EvalLimits& limits) {
  if (h.affine) {
    const auto& [a, c] = *h.affine;
    if (times == 0) return {start, false};
    if (a == 0) return {c, false};
    if (a == 1) return {Nat{start + times * c}, false};
    const std::size_t per = bits(a);
    Nat t = times;
    bool saturated = false;
    const std::size_t budget = limits.max_bits / std::max<std::size_t>(per, 1);
    if (t > budget) {
      t = budget;
      saturated = true;
    }
    Nat power;
    mpz_pow_ui(power.get_mpz_t(), a.get_mpz_t(), t.get_ui());
    return {Nat{power * start + c * (power - 1) / (a - 1)}, saturated};
  }
  Nat v = start;
  std::uint64_t done = 0;
  for (Nat k = 0; k < times; ++k) {
    if (++done > limits.max_steps || bits(v) > limits.max_bits) return {v, true};
    v = h(v);
  }
  return {v, false};
}

/// max_{i<=n} f(i). Affine f is nondecreasing, so the max is f(n). Past the
/// step budget f(n) alone is returned as a lower bound.
Bounded running_max(const NatFn& f, const Nat& n, const EvalLimits& limits) {
  if (f.affine) return {f(n), false};
  if (n > Nat{static_cast<unsigned long>(std::min<std::uint64_t>(limits.max_steps, 1UL << 40))}) return {f(n), true};
  Nat best = 0;
  for (Nat i = 0; i <= n; ++i) best = std::max(best, f(i));
  return {best, false};
}

Nat times_nat(const NatFn& f, const Nat& n) {
  Nat v = f(n);
  if (v < 0) throw DomainError("function " + f.id + " returned a negative value");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

Nat parse_nat(const std::string& text) {
  Rational q = parse_rational(text);
  if (q < 0 || q.get_den() != 1) throw ConfigError("not a natural number: " + text);
  return q.get_num();
}

}  // namespace

std::string to_string(Formula f) {
  for (const auto& [k, name] : formula_names())
    if (k == f) return name;
  return "?";
}

Formula parse_formula(const std::string& name) {
  for (const auto& [k, n] : formula_names())
    if (name == n) return k;
  throw ConfigError("unknown formula: " + name);
}

const std::vector<Formula>& all_formulas() {
  static const std::vector<Formula> all = [] {
    std::vector<Formula> v;
    for (const auto& [k, n] : formula_names()) v.push_back(k);
    return v;
  }();
  return all;
}

std::string BoundValue::display() const { return (saturated ? ">=" : "") + value.get_str(); }

std::optional<std::string> BoundValue::intermediate(const std::string& key) const {
  for (const auto& [k, v] : intermediates)
    if (k == key) return v;
  return std::nullopt;
}

CounterexampleFunction parse_counterexample(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::vector<std::string> args = colon == std::string::npos ? std::vector<std::string>{}
                                                                   : split(spec.substr(colon + 1), ',');
  auto want = [&](std::size_t n) {
    if (args.size() != n) throw ConfigError("counterexample function '" + spec + "' needs " + std::to_string(n) + " argument(s)");
  };
  NatFn g;
  if (head == "zero") {
    want(0);
    g = NatFn::linear(0, 0);
  } else if (head == "identity") {
    want(0);
    g = NatFn::linear(1, 0);
  } else if (head == "constant") {
    want(1);
    g = NatFn::linear(0, parse_nat(args[0]));
  } else if (head == "linear") {
    want(2);
    g = NatFn::linear(parse_nat(args[0]), parse_nat(args[1]));
  } else if (head == "iterate") {
    // k-fold a n + b = a^k n + b (a^k - 1)/(a - 1)
    want(3);
    Nat a = parse_nat(args[0]), b = parse_nat(args[1]), k = parse_nat(args[2]);
    if (!k.fits_ulong_p() || k > 4096) throw ConfigError("iterate count too large: " + k.get_str());
    Nat ak;
    mpz_pow_ui(ak.get_mpz_t(), a.get_mpz_t(), k.get_ui());
    Nat c = a == 1 ? Nat{b * k} : Nat{b * (ak - 1) / (a - 1)};
    g = NatFn::linear(ak, c);
  } else if (head == "square") {
    want(0);
    g = NatFn{"", [](const Nat& n) { return Nat{n * n}; }, std::nullopt};
  } else {
    throw ConfigError("unknown counterexample function: " + spec);
  }
  g.id = spec;
  return g;
}

WindowFn window_fn(const CounterexampleFunction& g) {
  return [g](std::uint64_t n) -> std::uint64_t {
    Nat v = g(Nat{static_cast<unsigned long>(n)});
    if (fits_u64(v)) return to_u64(v);
    return std::numeric_limits<std::uint64_t>::max();
  };
}

// --- Krasnoselski-Mann, general steps ------------------------------------

namespace {

// Phi = alpha-hat(ceil(c_coeff b exp(K(M+1))) - 1, M), M = ceil((1 + m_coeff b)/eps)
BoundValue brs_common(Formula f, const Rational& eps, const Rational& b, const Nat& K, const Alpha& alpha,
                      int m_coeff, int c_coeff, const EvalLimits& limits) {
  require_positive(eps, "eps");
  require_positive(b, "b");
  if (K < 1) throw DomainError("K must be at least 1");
  Builder out(f);
  out.in("eps", eps).in("b", b).in("K", K).in("alpha", alpha.id);
  const Nat M = ceil(Rational{(1 + m_coeff * b) / eps});
  Bounded c = ceil_exp(Rational{c_coeff * b}, Nat{K * (M + 1)}, limits);
  out.mid("M", M).mid("C", c.value).saturate(c.saturated);
  Bounded phi = alpha_hat(alpha, monus(c.value, 1), M, limits);
  out.saturate(phi.saturated);
  return out.done(phi.value);
}

}  // namespace

BoundValue brs_bound(const Rational& eps, const Rational& b, const Nat& K, const Alpha& alpha,
                     const EvalLimits& limits) {
  return brs_common(Formula::Brs, eps, b, K, alpha, 2, 2, limits);
}

BoundValue brs_orbit_bounded(const Rational& eps, const Rational& b, const Nat& K, const Alpha& alpha,
                             const EvalLimits& limits) {
  return brs_common(Formula::BrsOrbitBounded, eps, b, K, alpha, 6, 12, limits);
}

BoundValue brs_constant(const Rational& eps, const Rational& d_C, const Nat& K, const EvalLimits& limits) {
  require_positive(eps, "eps");
  require_positive(d_C, "d_C");
  if (K < 2) throw DomainError("K must be at least 2");
  Builder out(Formula::BrsConstant);
  out.in("eps", eps).in("d_C", d_C).in("K", K);
  const Nat M = ceil(Rational{(1 + 2 * d_C) / eps});
  Bounded c = ceil_exp(Rational{2 * d_C}, Nat{K * (M + 1)}, limits);
  out.mid("M", M).mid("C", c.value).saturate(c.saturated);
  return out.done(Nat{K * M * c.value});
}

BoundValue brs_dirne_orbit(const Rational& eps, const Rational& b, const Nat& K, const Alpha& alpha,
                           const EvalLimits& limits) {
  require_positive(eps, "eps");
  require_positive(b, "b");
  if (K < 1) throw DomainError("K must be at least 1");
  Builder out(Formula::BrsDirneOrbit);
  out.in("eps", eps).in("b", b).in("K", K).in("alpha", alpha.id);
  const Nat M = ceil(Rational{(1 + 2 * b) / eps});
  const Nat a01 = alpha(0, 1);
  // beta(i, n) = alpha(i + alpha(0,1), n)
  Alpha beta{"shift(" + alpha.id + ")", [alpha, a01](const Nat& i, const Nat& n) { return alpha(Nat{i + a01}, n); },
             nullptr};
  if (alpha.affine_in_i) {
    auto inner = alpha.affine_in_i;
    beta.affine_in_i = [inner, a01](const Nat& n) {
      auto [p, q] = inner(n);
      return std::make_pair(p, Nat{p * a01 + q});
    };
  }
  Bounded c = ceil_exp(Rational{2 * b * a01}, Nat{K * (M + 1)}, limits);
  out.mid("M", M).mid("alpha(0,1)", a01).mid("C", c.value).saturate(c.saturated);
  Bounded phi = alpha_hat(beta, monus(c.value, 1), M, limits);
  out.saturate(phi.saturated);
  return out.done(Nat{a01 + phi.value});
}

BoundValue brs_dirne_constant(const Rational& eps, const Rational& b, const Nat& K, const EvalLimits& limits) {
  require_positive(eps, "eps");
  require_positive(b, "b");
  if (K < 2) throw DomainError("K must be at least 2");
  Builder out(Formula::BrsDirneConstant);
  out.in("eps", eps).in("b", b).in("K", K);
  const Nat M = ceil(Rational{(1 + 2 * b) / eps});
  Bounded c = ceil_exp(Rational{2 * b * K}, Nat{K * (M + 1)}, limits);
  out.mid("M", M).mid("C", c.value).saturate(c.saturated);
  return out.done(Nat{K + K * M * c.value});
}

// --- uniformly convex spaces ---------------------------------------------

BoundValue groetsch_bound(const Rational& eps, const Rational& b, const UcModulus& modulus, const NatFn& theta_prod,
                          bool factored) {
  require_positive(eps, "eps");
  require_positive(b, "b");
  require_monotone(modulus);
  Builder out(factored ? Formula::GroetschFactored : Formula::Groetsch);
  out.in("eps", eps).in("b", b).in("modulus", modulus.id()).in("theta", theta_prod.id);
  if (eps >= 2 * b) return out.note("eps >= 2b").done(0);
  const Rational r = b + 1;
  const Rational u = eps / r;
  Nat arg = factored ? ceil(Rational{r / (2 * eps * modulus.eval_factored(r, u))})
                     : ceil(Rational{r / (eps * modulus.eval(r, u))});
  out.mid("theta_arg", arg);
  return out.done(times_nat(theta_prod, arg));
}

BoundValue cat0_general(const Rational& eps, const Rational& d_C, const NatFn& theta_prod) {
  require_positive(eps, "eps");
  require_positive(d_C, "d_C");
  Builder out(Formula::Cat0General);
  out.in("eps", eps).in("d_C", d_C).in("theta", theta_prod.id);
  if (eps >= 2 * d_C) return out.note("eps >= 2 d_C").done(0);
  Nat arg = ceil(Rational{4 * (d_C + 1) * (d_C + 1) / (eps * eps)});
  out.mid("theta_arg", arg);
  return out.done(times_nat(theta_prod, arg));
}

BoundValue cat0_constant(const Rational& eps, const Rational& d_C, const Rational& lambda) {
  require_positive(eps, "eps");
  require_positive(d_C, "d_C");
  if (!(lambda > 0 && lambda < 1)) throw DomainError("lambda must lie in (0,1)");
  Builder out(Formula::Cat0Constant);
  out.in("eps", eps).in("d_C", d_C).in("lambda", lambda);
  if (eps >= 2 * d_C) return out.note("eps >= 2 d_C").done(0);
  Nat c = ceil(Rational{1 / (lambda * (1 - lambda))});
  Nat q = ceil(Rational{4 * (d_C + 1) * (d_C + 1) / (eps * eps)});
  out.mid("ceil(1/(lambda(1-lambda)))", c).mid("ceil(4(d_C+1)^2/eps^2)", q);
  return out.done(Nat{c * q});
}

// --- Halpern -------------------------------------------------------------

BoundValue halpern_bound(const Rational& eps, const Nat& M, const EpsFn& alpha_conv, const EpsFn& beta_cauchy,
                         const NatFn& theta_sum) {
  if (!(eps > 0 && eps < 2)) throw DomainError("eps must lie in (0,2)");
  if (M < 1) throw DomainError("M must be at least 1");
  Builder out(Formula::Halpern);
  out.in("eps", eps).in("M", M).in("alpha", alpha_conv.id).in("beta", beta_cauchy.id).in("theta", theta_sum.id);
  const Rational eight_m = Rational{8 * M} / eps;
  Nat beta = beta_cauchy(Rational{eps / (8 * M)});
  Nat ln = ceil_ln_upper(eight_m);
  Nat arg = beta + 1 + ln;
  Nat first = times_nat(theta_sum, arg);
  Nat second = alpha_conv(Rational{eps / (4 * M)});
  out.mid("beta(eps/8M)", beta).mid("ceil(ln(8M/eps))", ln).mid("theta_branch", first).mid("alpha_branch", second);
  return out.done(std::max(first, second));
}

BoundValue halpern_one_over_n(const Rational& eps, const Rational& d_C, const EvalLimits& limits) {
  if (!(eps > 0 && eps < 2)) throw DomainError("eps must lie in (0,2)");
  require_positive(d_C, "d_C");
  Builder out(Formula::HalpernOneOverN);
  out.in("eps", eps).in("d_C", d_C);
  // exp(ln 4 (16 d_C/eps + 3)) = 4^(16 d_C/eps + 3)
  Rational exponent = 16 * d_C / eps + 3;
  exponent.canonicalize();
  if (exponent.get_den() > 4096) {
    exponent = Rational{ceil(exponent)};
    out.note("exponent rounded up to an integer");
  }
  out.mid("exponent", exponent);
  const Nat whole = ceil(exponent);
  if (!whole.fits_ulong_p() || 2 * whole.get_ui() > limits.max_bits) {
    out.saturate(true);
    return out.done(Nat{1} << limits.max_bits);
  }
  return out.done(ceil_pow(4, exponent));
}

// --- Ishikawa ------------------------------------------------------------

BoundValue ishikawa_h(const Rational& eps, const Nat& k, const UcModulus& modulus, const Rational& b,
                      const NatFn& theta_prod) {
  require_positive(eps, "eps");
  require_positive(b, "b");
  require_monotone(modulus);
  Builder out(Formula::IshikawaH);
  out.in("eps", eps).in("k", k).in("modulus", modulus.id()).in("b", b).in("theta", theta_prod.id);
  if (eps > 2 * b) return out.note("eps > 2b").done(k);
  Nat q = ceil(Rational{(b + 1) / (eps * modulus.eval(b, Rational{eps / b}))});
  out.mid("theta_arg", Nat{q + k});
  return out.done(times_nat(theta_prod, Nat{q + k}));
}

BoundValue ishikawa_theorem(const Rational& eps, const Rational& b, const UcModulus& modulus, const NatFn& theta_prod,
                            const Nat& L, const Nat& N0, const EpsFn& gamma, bool factored) {
  require_positive(eps, "eps");
  require_positive(b, "b");
  require_monotone(modulus);
  if (L < 1) throw DomainError("L must be at least 1");
  if (N0 < 0) throw DomainError("N0 must be natural");
  Builder out(factored ? Formula::IshikawaTheoremFactored : Formula::IshikawaTheorem);
  out.in("eps", eps).in("b", b).in("modulus", modulus.id()).in("theta", theta_prod.id);
  out.in("L", L).in("N0", N0).in("gamma", gamma.id);
  Nat tail = gamma(Rational{eps / (8 * b)}) + N0 + 1;
  out.mid("gamma(eps/8b)+N0+1", tail);
  if (eps > 4 * L * b) return out.note("eps > 4Lb").done(tail);
  const Rational u = eps / (2 * L * b);
  Nat q = factored ? ceil(Rational{L * (b + 1) / (eps * modulus.eval_factored(b, u))})
                   : ceil(Rational{2 * L * (b + 1) / (eps * modulus.eval(b, u))});
  out.mid("quotient", q);
  return out.done(times_nat(theta_prod, Nat{q + tail}));
}

BoundValue ishikawa_constant_lambda(const Rational& eps, const Rational& d_C, const UcModulus& modulus,
                                    const Rational& lambda, const Nat& L, const Nat& N0, const EpsFn& delta,
                                    bool factored) {
  require_positive(eps, "eps");
  require_positive(d_C, "d_C");
  require_monotone(modulus);
  if (!(lambda > 0 && lambda < 1)) throw DomainError("lambda must lie in (0,1)");
  if (L < 1) throw DomainError("L must be at least 1");
  Builder out(factored ? Formula::IshikawaConstantLambdaFactored : Formula::IshikawaConstantLambda);
  out.in("eps", eps).in("d_C", d_C).in("modulus", modulus.id()).in("lambda", lambda);
  out.in("L", L).in("N0", N0).in("delta", delta.id);
  Nat M = delta(Rational{eps / (8 * d_C * (1 - lambda))}) + N0 + 1;
  out.mid("M", M);
  if (eps > 4 * L * d_C) return out.note("eps > 4 L d_C").done(M);
  const Rational u = eps / (2 * L * d_C);
  const Rational c = 1 / (lambda * (1 - lambda));
  Nat q = factored ? ceil(Rational{c * L * (d_C + 1) / (eps * modulus.eval_factored(d_C, u))})
                   : ceil(Rational{c * 2 * L * (d_C + 1) / (eps * modulus.eval(d_C, u))});
  out.mid("quotient", q);
  return out.done(Nat{q + M});
}

BoundValue ishikawa_cat0_constant(const Rational& eps, const Rational& d_C, const Rational& lambda, const Nat& L,
                                  const Nat& N0, const EpsFn& delta) {
  require_positive(eps, "eps");
  require_positive(d_C, "d_C");
  if (!(lambda > 0 && lambda < 1)) throw DomainError("lambda must lie in (0,1)");
  if (L < 1) throw DomainError("L must be at least 1");
  Builder out(Formula::IshikawaCat0Constant);
  out.in("eps", eps).in("d_C", d_C).in("lambda", lambda).in("L", L).in("N0", N0).in("delta", delta.id);
  Nat M = delta(Rational{eps / (8 * d_C * (1 - lambda))}) + N0 + 1;
  Rational D = 16 * Rational{L * L} * d_C * (d_C + 1) / (lambda * (1 - lambda));
  out.mid("M", M).mid("D", D);
  if (eps > 4 * L * d_C) return out.note("eps > 4 L d_C").done(M);
  return out.done(Nat{ceil(Rational{D / (eps * eps)}) + M});
}

// --- asymptotically nonexpansive -----------------------------------------

namespace {

struct AsneConstants {
  Rational D;      // upper bound of e^K (b + 2)
  Nat f;           // 2(1 + (1+K)^2 (2+K))
  Rational delta;  // lower bound
  Nat M;
};

AsneConstants asne_constants(const Nat& K, const Nat& L, const Rational& b, const UcModulus& modulus,
                             const Rational& eps, bool factored) {
  if (!(eps > 0 && eps <= 1)) throw DomainError("eps must lie in (0,1]");
  if (L < 2) throw DomainError("L must be at least 2");
  if (K < 0) throw DomainError("K must be natural");
  require_positive(b, "b");
  require_monotone(modulus);
  AsneConstants c;
  c.D = exp_upper(K) * (b + 2);
  c.f = 2 * (1 + (1 + K) * (1 + K) * (2 + K));
  const Rational r = (1 + K) * c.D + 1;
  const Rational u = eps / (c.f * r);
  const Rational eta = factored ? modulus.eval_factored(r, u) : modulus.eval(r, u);
  c.delta = eps / (Rational{L * L} * c.f) * eta;
  c.M = ceil(Rational{3 * (5 * K * c.D + c.D + Rational{11, 2}) / c.delta});
  return c;
}

void echo_asne(Builder& out, const Nat& K, const Nat& L, const Rational& b, const std::string& modulus,
               const Rational& eps) {
  out.in("K", K).in("L", L).in("b", b).in("modulus", modulus).in("eps", eps);
}

}  // namespace

BoundValue asne_general(const Nat& K, const Nat& L, const Rational& b, const UcModulus& modulus, const Rational& eps,
                        const CounterexampleFunction& g, bool factored, const EvalLimits& limits) {
  AsneConstants c = asne_constants(K, L, b, modulus, eps, factored);
  Builder out(factored ? Formula::AsneGeneralFactored : Formula::AsneGeneral);
  echo_asne(out, K, L, b, modulus.id(), eps);
  out.in("g", g.id);
  out.mid("D", c.D).mid("f(K)", c.f).mid("delta", c.delta).mid("M", c.M);
  // h(n) = g(n+1) + n + 2
  NatFn h{"h", [g](const Nat& n) { return Nat{g(Nat{n + 1}) + n + 2}; }, std::nullopt};
  if (g.affine) {
    const auto& [a, k] = *g.affine;
    h.affine = std::make_pair(Nat{a + 1}, Nat{a + k + 2});
  }
  Bounded phi = iterate(h, 0, c.M, limits);
  out.saturate(phi.saturated);
  return out.done(phi.value);
}

BoundValue asne_afp(const Nat& K, const Nat& L, const Rational& b, const UcModulus& modulus, const Rational& eps,
                    bool factored) {
  AsneConstants c = asne_constants(K, L, b, modulus, eps, factored);
  Builder out(Formula::AsneAfp);
  echo_asne(out, K, L, b, modulus.id(), eps);
  out.mid("D", c.D).mid("f(K)", c.f).mid("delta", c.delta).mid("M", c.M);
  return out.done(Nat{2 * c.M});
}

BoundValue asne_cat0(const Nat& K, const Nat& L, const Rational& d_C, const Rational& eps) {
  if (!(eps > 0 && eps <= 1)) throw DomainError("eps must lie in (0,1]");
  if (L < 2) throw DomainError("L must be at least 2");
  if (K < 0) throw DomainError("K must be natural");
  require_positive(d_C, "d_C");
  Builder out(Formula::AsneCat0);
  out.in("K", K).in("L", L).in("d_C", d_C).in("eps", eps);
  const Rational D = exp_upper(K) * (d_C + 2);
  const Nat f = 2 * (1 + (1 + K) * (1 + K) * (2 + K));
  const Rational r = (1 + K) * D + 1;
  const Rational body = 24 * Rational{L * L} * (5 * K * D + D + Rational{11, 2}) * Rational{f * f * f} * r * r;
  const Nat M = ceil(Rational{body / (eps * eps)});
  out.mid("D", D).mid("f(K)", f).mid("M", M);
  return out.done(Nat{2 * M});
}

// --- ergodic averages ----------------------------------------------------

BoundValue glb_theta(const Rational& b, const Rational& eps, const CounterexampleFunction& g, bool window,
                     const EvalLimits& limits) {
  require_positive(b, "b");
  require_positive(eps, "eps");
  Builder out(window ? Formula::GlbWindow : Formula::GlbWitness);
  out.in("b", b).in("eps", eps).in("g", g.id);
  const Nat K = ceil(Rational{b / eps});
  out.mid("K", K);
  if (window) {
    // h(n) = max_{i<=n} g(i) is nondecreasing
    auto sat = std::make_shared<bool>(false);
    NatFn h{"h", [g, sat, limits](const Nat& n) {
              Bounded m = running_max(g, n, limits);
              *sat = *sat || m.saturated;
              return m.value;
            },
            g.affine};
    Bounded v = iterate(h, 1, K, limits);
    out.saturate(v.saturated || *sat);
    return out.done(v.value);
  }
  // max_{i<=K} g^i(1)
  if (g.affine) {
    const auto& [a, c] = *g.affine;
    if (a == 0) return out.done(std::max(Nat{1}, c));
    // a >= 1: g(n) >= n, so the orbit is nondecreasing
    Bounded v = iterate(g, 1, K, limits);
    out.saturate(v.saturated);
    return out.done(v.value);
  }
  Nat v = 1, best = 1;
  std::uint64_t steps = 0;
  for (Nat i = 0; i < K; ++i) {
    if (++steps > limits.max_steps || bits(v) > limits.max_bits) {
      out.saturate(true);
      break;
    }
    v = g(v);
    best = std::max(best, v);
  }
  return out.done(best);
}

BoundValue ergodic_bound(ErgodicVariant variant, const Rational& eps, const Rational& b,
                         const BanachUcModulus& modulus, const CounterexampleFunction& g, const EvalLimits& limits) {
  require_positive(eps, "eps");
  require_positive(b, "b");
  Formula f = variant == ErgodicVariant::General    ? Formula::ErgodicGeneral
              : variant == ErgodicVariant::Factored ? Formula::ErgodicFactored
                                                    : Formula::ErgodicHilbert;
  Builder out(f);
  out.in("eps", eps).in("b", b).in("g", g.id);
  if (variant != ErgodicVariant::Hilbert) out.in("modulus", modulus.id());
  const Nat M = ceil(Rational{16 * b / eps});
  Nat K;
  if (variant == ErgodicVariant::Hilbert) {
    K = ceil(Rational{512 * b * b / (eps * eps)});
  } else {
    Rational u = eps / (8 * b);
    if (u > 2) {
      u = clamp_eps(u);
      out.note("modulus argument eps/8b clamped to 2");
    }
    const Rational gamma = variant == ErgodicVariant::General ? Rational{eps / 16 * modulus.eval(u)}
                                                              : Rational{eps / 8 * modulus.eval_factored(u)};
    out.mid("gamma", gamma);
    K = ceil(Rational{b / gamma});
  }
  out.mid("M", M).mid("K", K);
  // h(n) = 2(M n + g(M n)); h~(n) = max_{i<=n} h(i)
  NatFn h{"h", [g, M](const Nat& n) { return Nat{2 * (M * n + g(Nat{M * n}))}; }, std::nullopt};
  if (g.affine) {
    const auto& [a, c] = *g.affine;
    h.affine = std::make_pair(Nat{2 * M * (1 + a)}, Nat{2 * c});
  }
  auto sat = std::make_shared<bool>(false);
  NatFn h_tilde{"h~", [h, sat, limits](const Nat& n) {
                  Bounded m = running_max(h, n, limits);
                  *sat = *sat || m.saturated;
                  return m.value;
                },
                h.affine};
  Bounded v = iterate(h_tilde, 1, K, limits);
  out.saturate(v.saturated || *sat);
  return out.done(Nat{M * v.value});
}

BoundValue agt_bound(const Rational& eps, const Rational& b, const CounterexampleFunction& g,
                     const EvalLimits& limits) {
  require_positive(eps, "eps");
  require_positive(b, "b");
  Builder out(Formula::Agt);
  out.in("eps", eps).in("b", b).in("g", g.id);
  const Nat rho = ceil(Rational{b / eps});
  const Nat K = 512 * rho * rho;
  out.mid("rho", rho).mid("K", K);
  // g~(n) = max_{i<=n} (i + g(i))
  NatFn shifted{"i+g(i)", [g](const Nat& i) { return Nat{i + g(i)}; }, std::nullopt};
  if (g.affine) shifted.affine = std::make_pair(Nat{g.affine->first + 1}, g.affine->second);
  bool saturated = false;
  auto g_tilde = [&](const Nat& n) {
    Bounded m = running_max(shifted, n, limits);
    saturated = saturated || m.saturated;
    return m.value;
  };
  Nat rho2 = rho * rho;
  Nat coeff = Nat{8192} * rho2 * rho2;
  Nat v = 1;
  std::uint64_t steps = 0;
  for (Nat i = 0; i < K; ++i) {
    if (++steps > limits.max_steps || bits(v) > limits.max_bits / 4) {
      saturated = true;
      break;
    }
    Nat inner = g_tilde(Nat{2 * v * rho});
    v = v + coeff * g_tilde(Nat{(v + 1) * inner * rho2});
  }
  out.saturate(saturated);
  return out.done(v);
}

}  // namespace fprates
