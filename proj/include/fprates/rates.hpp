#pragma once

// Explicit rates of asymptotic regularity and metastability bounds.
//
// Every function returns an exact natural that over-approximates the bound:
// all arithmetic is rational, exp(k) uses an upper bound of e and ceil(ln x)
// rounds its index up. Iterated constructions (alpha-hat, h^M) stop at the
// EvalLimits budget; the value is then a lower bound and `saturated` is set.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fprates/maps.hpp"
#include "fprates/moduli.hpp"
#include "fprates/numeric.hpp"
#include "fprates/schedules.hpp"

namespace fprates {

enum class Formula {
  Brs,
  BrsConstant,
  BrsOrbitBounded,
  BrsDirneOrbit,
  BrsDirneConstant,
  Groetsch,
  GroetschFactored,
  Cat0General,
  Cat0Constant,
  Halpern,
  HalpernOneOverN,
  IshikawaH,
  IshikawaTheorem,
  IshikawaTheoremFactored,
  IshikawaConstantLambda,
  IshikawaConstantLambdaFactored,
  IshikawaCat0Constant,
  AsneGeneral,
  AsneGeneralFactored,
  AsneAfp,
  AsneCat0,
  GlbWitness,
  GlbWindow,
  ErgodicGeneral,
  ErgodicFactored,
  ErgodicHilbert,
  Agt,
};

std::string to_string(Formula f);
Formula parse_formula(const std::string& name);
const std::vector<Formula>& all_formulas();

struct BoundValue {
  Formula formula = Formula::Brs;
  Nat value;
  bool saturated = false;  // value is a lower bound of the formula
  std::vector<std::pair<std::string, std::string>> inputs;
  std::vector<std::pair<std::string, std::string>> intermediates;
  std::vector<std::string> notes;

  /// Decimal value, prefixed with ">=" when saturated.
  std::string display() const;
  std::optional<std::string> intermediate(const std::string& key) const;

  bool operator==(const BoundValue& other) const = default;
};

/// g : N -> N. Presets: zero, identity, constant:c, linear:a,b (a n + b),
/// iterate:a,b,k (k-fold a n + b), square.
using CounterexampleFunction = NatFn;
CounterexampleFunction parse_counterexample(const std::string& spec);
/// Machine-word view of g, saturating at 2^64 - 1.
WindowFn window_fn(const CounterexampleFunction& g);

// Krasnoselski-Mann, general steps in [0, 1 - 1/K].
BoundValue brs_bound(const Rational& eps, const Rational& b, const Nat& K, const Alpha& alpha,
                     const EvalLimits& limits = {});
BoundValue brs_constant(const Rational& eps, const Rational& d_C, const Nat& K, const EvalLimits& limits = {});
BoundValue brs_orbit_bounded(const Rational& eps, const Rational& b, const Nat& K, const Alpha& alpha,
                             const EvalLimits& limits = {});
BoundValue brs_dirne_orbit(const Rational& eps, const Rational& b, const Nat& K, const Alpha& alpha,
                           const EvalLimits& limits = {});
BoundValue brs_dirne_constant(const Rational& eps, const Rational& b, const Nat& K, const EvalLimits& limits = {});

// Uniformly convex spaces.
BoundValue groetsch_bound(const Rational& eps, const Rational& b, const UcModulus& modulus, const NatFn& theta_prod,
                          bool factored);
BoundValue cat0_general(const Rational& eps, const Rational& d_C, const NatFn& theta_prod);
BoundValue cat0_constant(const Rational& eps, const Rational& d_C, const Rational& lambda);

// Halpern. eps in (0, 2).
BoundValue halpern_bound(const Rational& eps, const Nat& M, const EpsFn& alpha_conv, const EpsFn& beta_cauchy,
                         const NatFn& theta_sum);
BoundValue halpern_one_over_n(const Rational& eps, const Rational& d_C, const EvalLimits& limits = {});

// Ishikawa.
BoundValue ishikawa_h(const Rational& eps, const Nat& k, const UcModulus& modulus, const Rational& b,
                      const NatFn& theta_prod);
BoundValue ishikawa_theorem(const Rational& eps, const Rational& b, const UcModulus& modulus, const NatFn& theta_prod,
                            const Nat& L, const Nat& N0, const EpsFn& gamma, bool factored);
BoundValue ishikawa_constant_lambda(const Rational& eps, const Rational& d_C, const UcModulus& modulus,
                                    const Rational& lambda, const Nat& L, const Nat& N0, const EpsFn& delta,
                                    bool factored);
BoundValue ishikawa_cat0_constant(const Rational& eps, const Rational& d_C, const Rational& lambda, const Nat& L,
                                  const Nat& N0, const EpsFn& delta);

// Asymptotically nonexpansive maps. eps in (0, 1], L >= 2.
BoundValue asne_general(const Nat& K, const Nat& L, const Rational& b, const UcModulus& modulus, const Rational& eps,
                        const CounterexampleFunction& g, bool factored, const EvalLimits& limits = {});
/// 2M, the g = 0 case.
BoundValue asne_afp(const Nat& K, const Nat& L, const Rational& b, const UcModulus& modulus, const Rational& eps,
                    bool factored);
/// The CAT(0) corollary as stated, with eps^2 in the denominator.
BoundValue asne_cat0(const Nat& K, const Nat& L, const Rational& d_C, const Rational& eps);

// Ergodic averages.
BoundValue glb_theta(const Rational& b, const Rational& eps, const CounterexampleFunction& g, bool window,
                     const EvalLimits& limits = {});
enum class ErgodicVariant { General, Factored, Hilbert };
BoundValue ergodic_bound(ErgodicVariant variant, const Rational& eps, const Rational& b,
                         const BanachUcModulus& modulus, const CounterexampleFunction& g,
                         const EvalLimits& limits = {});
/// The comparison bound of Avigad, Gerhardy and Towsner for Hilbert spaces.
BoundValue agt_bound(const Rational& eps, const Rational& b, const CounterexampleFunction& g,
                     const EvalLimits& limits = {});

}  // namespace fprates
