#pragma once

// Step sequences and the certificates that rate formulas consume.
//
// KM, Ishikawa and BRS-type schemes index steps from 0; Halpern schedules
// start at 1 (lambda_n = 1/n). Cauchy moduli and convergence rates take a
// positive rational and return an index >= 1.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fprates/numeric.hpp"

namespace fprates {

using StepFn = std::function<double(std::uint64_t)>;

struct StepSchedule {
  std::string description;
  StepFn lambda;
  std::optional<StepFn> s;  // Ishikawa inner step
  std::uint64_t first_index = 0;
  std::optional<Rational> constant_lambda;
};

/// n -> N, with optional affine form a*n + c for closed-form evaluation.
struct NatFn {
  std::string id;
  std::function<Nat(const Nat&)> fn;
  std::optional<std::pair<Nat, Nat>> affine;

  Nat operator()(const Nat& n) const { return fn(n); }

  static NatFn linear(const Nat& a, const Nat& c = 0);
};

/// eps -> N (Cauchy moduli, convergence rates).
struct EpsFn {
  std::string id;
  std::function<Nat(const Rational&)> fn;

  Nat operator()(const Rational& eps) const { return fn(eps); }

  static EpsFn constant(const Nat& value);
  /// ceil(1/eps), at least 1.
  static EpsFn reciprocal();
};

/// (i, n) -> N, nondecreasing in i with sum_{s=i}^{i+alpha(i,n)-1} lambda_s >= n.
struct Alpha {
  std::string id;
  std::function<Nat(const Nat& i, const Nat& n)> fn;
  /// When present, alpha(i, n) = p(n) i + q(n) with (p, q) = affine_in_i(n).
  std::function<std::pair<Nat, Nat>(const Nat& n)> affine_in_i;

  Nat operator()(const Nat& i, const Nat& n) const { return fn(i, n); }

  /// alpha(i, n) = k n.
  static Alpha linear(const Nat& k);
};

struct Certificates {
  std::optional<Nat> K;   // lambda_n <= 1 - 1/K
  std::optional<Nat> L;   // s_n <= 1 - 1/L for n >= N0
  std::optional<Nat> N0;
  std::optional<NatFn> theta_sum;   // sum_{s<=theta(n)} lambda_s >= n
  std::optional<NatFn> theta_prod;  // sum_{k<=theta(n)} lambda_k (1 - lambda_k) >= n
  std::optional<Alpha> alpha;
  std::optional<EpsFn> beta_cauchy;   // sum |lambda_{n+1} - lambda_n|
  std::optional<EpsFn> gamma_cauchy;  // sum s_n (1 - lambda_n)
  std::optional<EpsFn> delta_cauchy;  // sum s_n
  std::optional<EpsFn> alpha_conv;    // lambda_n <= eps for n >= alpha_conv(eps)

  // Accessors that throw MissingCertificate naming the certificate.
  const Nat& need_K() const;
  const Nat& need_L() const;
  const Nat& need_N0() const;
  const NatFn& need_theta_sum() const;
  const NatFn& need_theta_prod() const;
  const Alpha& need_alpha() const;
  const EpsFn& need_beta_cauchy() const;
  const EpsFn& need_gamma_cauchy() const;
  const EpsFn& need_delta_cauchy() const;
  const EpsFn& need_alpha_conv() const;
};

struct CertifiedSchedule {
  StepSchedule schedule;
  Certificates certs;
};

/// alpha(i, n) = max_{j<=i} (theta(n + j) + 1 - j), truncated at 0.
Alpha theta_to_alpha(NatFn theta);

/// The iterate alpha^(i, n): alpha^(0, n) = alpha(0, n), alpha^(i+1, n) = a + alpha(a, n)
/// with a = alpha^(i, n). Closed form when alpha is affine in i (in particular
/// (i+1) alpha(0, n) when it does not depend on i); otherwise iterated,
/// saturating at the limits.
Bounded alpha_hat(const Alpha& alpha, const Nat& i, const Nat& n, const EvalLimits& limits = {});

/// lambda_n = lambda in (0,1). K is the least natural with 1/K <= lambda <= 1 - 1/K;
/// alpha(i,n) = K n, theta_prod(n) = n ceil(1/(lambda(1-lambda))), theta_sum(n) = n ceil(1/lambda).
CertifiedSchedule constant_schedule(const Rational& lambda);

/// lambda_n = 1/n for n >= 1, with alpha_conv = beta_cauchy = ceil(1/eps) and
/// theta_sum(n) = ceil(e^n) (e rounded up).
CertifiedSchedule one_over_n_schedule();

/// s_n = 0: L = 1, N0 = 0, gamma = delta = 1.
CertifiedSchedule with_s_zero(CertifiedSchedule base);

/// s_n = s0 q^n with 0 <= s0 < 1, 0 <= q < 1: L = ceil(1/(1 - s0)), N0 = 0,
/// gamma = delta = least N >= 1 with s0 q^(N+1) / (1 - q) < eps.
CertifiedSchedule with_s_geometric(CertifiedSchedule base, const Rational& s0, const Rational& q);

struct CertificateViolation {
  std::string certificate;
  std::string detail;
};

struct ValidationReport {
  std::uint64_t horizon = 0;
  std::vector<std::string> checked;
  std::vector<CertificateViolation> violations;

  bool ok() const { return violations.empty(); }
};

/// {1, 1/2, 1/4, ..., 1/64}.
std::vector<Rational> default_eps_grid();

/// Brute-force check of every present certificate on indices up to `horizon`
/// (partial sums in long double with a 1e-12 relative slack).
ValidationReport validate_certificates(const CertifiedSchedule& cs, std::uint64_t horizon,
                                       const std::vector<Rational>& eps_grid = default_eps_grid());

}  // namespace fprates
