#include "fprates/schedules.hpp"

#include <algorithm>
#include <cmath>

#include "fprates/errors.hpp"

namespace fprates {

NatFn NatFn::linear(const Nat& a, const Nat& c) {
  std::string id = c == 0 ? to_string(a) + "n" : to_string(a) + "n+" + to_string(c);
  return NatFn{std::move(id), [a, c](const Nat& n) { return Nat{a * n + c}; }, std::make_pair(a, c)};
}

EpsFn EpsFn::constant(const Nat& value) {
  return EpsFn{"const:" + to_string(value), [value](const Rational&) { return value; }};
}

EpsFn EpsFn::reciprocal() {
  return EpsFn{"ceil(1/eps)", [](const Rational& eps) {
                 if (eps <= 0) throw DomainError("eps must be positive");
                 Nat v = ceil(Rational{1 / eps});
                 return v < 1 ? Nat{1} : v;
               }};
}

Alpha Alpha::linear(const Nat& k) {
  return Alpha{to_string(k) + "n", [k](const Nat&, const Nat& n) { return Nat{k * n}; },
               [k](const Nat& n) { return std::make_pair(Nat{0}, Nat{k * n}); }};
}

namespace {

template <class T>
const T& need(const std::optional<T>& v, const char* name) {
  if (!v) throw MissingCertificate(std::string("missing schedule certificate: ") + name);
  return *v;
}

}  // namespace

const Nat& Certificates::need_K() const { return need(K, "K"); }
const Nat& Certificates::need_L() const { return need(L, "L"); }
const Nat& Certificates::need_N0() const { return need(N0, "N0"); }
const NatFn& Certificates::need_theta_sum() const { return need(theta_sum, "theta (divergence of sum lambda_n)"); }
const NatFn& Certificates::need_theta_prod() const {
  return need(theta_prod, "theta' (divergence of sum lambda_n(1-lambda_n))");
}
const Alpha& Certificates::need_alpha() const { return need(alpha, "alpha"); }
const EpsFn& Certificates::need_beta_cauchy() const { return need(beta_cauchy, "beta (Cauchy modulus)"); }
const EpsFn& Certificates::need_gamma_cauchy() const { return need(gamma_cauchy, "gamma (Cauchy modulus)"); }
const EpsFn& Certificates::need_delta_cauchy() const { return need(delta_cauchy, "delta (Cauchy modulus)"); }
const EpsFn& Certificates::need_alpha_conv() const { return need(alpha_conv, "alpha (rate of convergence)"); }

Alpha theta_to_alpha(NatFn theta) {
  Alpha a;
  a.id = "from-theta:" + theta.id;
  if (theta.affine) {
    // theta(n+j) + 1 - j = a n + c + 1 + (a - 1) j: the max sits at j = i when a >= 1.
    const Nat sa = theta.affine->first;
    const Nat sc = theta.affine->second;
    if (sa >= 1) {
      a.affine_in_i = [sa, sc](const Nat& n) { return std::make_pair(Nat{sa - 1}, Nat{sa * n + sc + 1}); };
      a.fn = [sa, sc](const Nat& i, const Nat& n) { return Nat{(sa - 1) * i + sa * n + sc + 1}; };
      return a;
    }
  }
  a.fn = [theta](const Nat& i, const Nat& n) {
    Nat best = 0;
    for (Nat j = 0; j <= i; ++j) {
      Nat g = monus(Nat{theta(Nat{n + j}) + 1}, j);
      if (g > best) best = g;
    }
    return best;
  };
  return a;
}

Bounded alpha_hat(const Alpha& alpha, const Nat& i, const Nat& n, const EvalLimits& limits) {
  if (i < 0 || n < 0) throw DomainError("alpha_hat needs natural arguments");
  if (alpha.affine_in_i) {
    // alpha~(v) = A v + q with A = 1 + p; alpha^(i) = q (A^(i+1) - 1) / (A - 1).
    auto [p, q] = alpha.affine_in_i(n);
    if (p == 0) return {Nat{(i + 1) * q}, false};
    const Nat A = p + 1;
    const std::size_t bits_per = mpz_sizeinbase(A.get_mpz_t(), 2);
    Nat steps = i + 1;
    bool saturated = false;
    const std::size_t budget = limits.max_bits / std::max<std::size_t>(bits_per, 1);
    if (steps > budget) {
      steps = budget;
      saturated = true;
    }
    Nat power;
    mpz_pow_ui(power.get_mpz_t(), A.get_mpz_t(), steps.get_ui());
    return {Nat{q * (power - 1) / p}, saturated};
  }
  Nat v = alpha(0, n);
  std::uint64_t done = 0;
  for (Nat k = 0; k < i; ++k) {
    if (++done > limits.max_steps || mpz_sizeinbase(v.get_mpz_t(), 2) > limits.max_bits) return {v, true};
    v += alpha(v, n);
  }
  return {v, false};
}

CertifiedSchedule constant_schedule(const Rational& lambda) {
  if (!(lambda > 0 && lambda < 1)) throw DomainError("constant step must lie in (0,1)");
  const Rational one_minus = 1 - lambda;
  Nat K = std::max(ceil(Rational{1 / lambda}), ceil(Rational{1 / one_minus}));
  const double lam = to_double(lambda);

  CertifiedSchedule cs;
  cs.schedule.description = "const:" + to_string(lambda);
  cs.schedule.lambda = [lam](std::uint64_t) { return lam; };
  cs.schedule.first_index = 0;
  cs.schedule.constant_lambda = lambda;
  cs.certs.K = K;
  cs.certs.alpha = Alpha::linear(K);
  cs.certs.theta_prod = NatFn::linear(ceil(Rational{1 / (lambda * one_minus)}));
  cs.certs.theta_sum = NatFn::linear(ceil(Rational{1 / lambda}));
  return cs;
}

CertifiedSchedule one_over_n_schedule() {
  CertifiedSchedule cs;
  cs.schedule.description = "1/n";
  cs.schedule.lambda = [](std::uint64_t n) { return n == 0 ? 1.0 : 1.0 / static_cast<double>(n); };
  cs.schedule.first_index = 1;
  cs.certs.alpha_conv = EpsFn::reciprocal();
  cs.certs.beta_cauchy = EpsFn::reciprocal();
  // H_m >= ln(m + 1) >= n once m >= e^n - 1.
  cs.certs.theta_sum = NatFn{"ceil(e^n)", [](const Nat& n) { return ceil(exp_upper(n)); }, std::nullopt};
  return cs;
}

CertifiedSchedule with_s_zero(CertifiedSchedule base) {
  base.schedule.s = [](std::uint64_t) { return 0.0; };
  base.schedule.description += ";s=0";
  base.certs.L = Nat{1};
  base.certs.N0 = Nat{0};
  base.certs.gamma_cauchy = EpsFn::constant(1);
  base.certs.delta_cauchy = EpsFn::constant(1);
  return base;
}

CertifiedSchedule with_s_geometric(CertifiedSchedule base, const Rational& s0, const Rational& q) {
  if (!(s0 >= 0 && s0 < 1)) throw DomainError("geometric s needs 0 <= s0 < 1");
  if (!(q >= 0 && q < 1)) throw DomainError("geometric s needs 0 <= q < 1");
  const double ds0 = to_double(s0), dq = to_double(q);
  base.schedule.s = [ds0, dq](std::uint64_t n) { return ds0 * std::pow(dq, static_cast<double>(n)); };
  base.schedule.description += ";s=" + to_string(s0) + "*" + to_string(q) + "^n";
  base.certs.L = ceil(Rational{1 / (1 - s0)});
  base.certs.N0 = Nat{0};
  // sum_{i>N} s_i = s0 q^(N+1) / (1 - q); since 1 - lambda_n <= 1 this also bounds the weighted tail.
  EpsFn tail{"geometric-tail", [s0, q](const Rational& eps) {
               if (eps <= 0) throw DomainError("eps must be positive");
               Nat N = 1;
               Rational t = s0 * q * q / (1 - q);
               while (!(t < eps)) {
                 t *= q;
                 ++N;
               }
               return N;
             }};
  base.certs.gamma_cauchy = tail;
  base.certs.delta_cauchy = tail;
  return base;
}

std::vector<Rational> default_eps_grid() {
  std::vector<Rational> g;
  for (unsigned k = 0; k <= 6; ++k) g.emplace_back(Nat{1}, Nat{1} << k);
  return g;
}

namespace {

constexpr std::size_t kMaxPerCertificate = 5;

struct Recorder {
  ValidationReport& rep;
  std::size_t count = 0;
  std::string name;

  void operator()(std::string detail) {
    if (count++ < kMaxPerCertificate) rep.violations.push_back({name, std::move(detail)});
  }
};

bool at_least(long double sum, long double target) {
  return sum >= target - 1e-12L * std::max<long double>(1, std::fabs(target));
}

std::string idx(std::uint64_t n) { return std::to_string(n); }

// Largest natural that fits the horizon; bigger values are out of range for the check.
std::optional<std::uint64_t> small(const Nat& v, std::uint64_t horizon) {
  if (v < 0 || !fits_u64(v)) return std::nullopt;
  std::uint64_t u = to_u64(v);
  if (u > horizon) return std::nullopt;
  return u;
}

// prefix[k] = sum_{s=first}^{k-1} term(s)
std::vector<long double> prefix(std::uint64_t first, std::uint64_t end, const std::function<long double(std::uint64_t)>& term) {
  std::vector<long double> p(end + 1, 0.0L);
  for (std::uint64_t k = 0; k < end; ++k) p[k + 1] = p[k] + (k >= first ? term(k) : 0.0L);
  return p;
}

void check_cauchy(const EpsFn& mod, const std::vector<long double>& partial, std::uint64_t horizon,
                  const std::vector<Rational>& grid, Recorder& rec) {
  // partial[k + 1] is the partial sum through index k.
  for (const auto& eps : grid) {
    auto g = small(mod(eps), horizon);
    if (!g) continue;
    const long double e = to_double(eps);
    for (std::uint64_t m = *g + 1; m <= horizon; ++m) {
      if (!(std::fabs(partial[m + 1] - partial[*g + 1]) < e)) {
        rec("eps=" + to_string(eps) + ": |a_" + idx(m) + " - a_" + idx(*g) + "| >= eps");
        break;
      }
    }
  }
}

}  // namespace

ValidationReport validate_certificates(const CertifiedSchedule& cs, std::uint64_t horizon,
                                       const std::vector<Rational>& eps_grid) {
  if (horizon < 1) throw DomainError("validation horizon must be >= 1");
  ValidationReport rep;
  rep.horizon = horizon;
  const auto& sch = cs.schedule;
  const auto& c = cs.certs;
  const std::uint64_t first = sch.first_index;
  auto lam = [&](std::uint64_t k) -> long double { return sch.lambda(k); };

  // Partial sums through index horizon + 1 so that differences reach the horizon.
  const auto lam_sum = prefix(first, horizon + 2, lam);
  const auto prod_sum = prefix(first, horizon + 2, [&](std::uint64_t k) { return lam(k) * (1 - lam(k)); });

  if (c.K) {
    rep.checked.push_back("K");
    Recorder rec{rep, 0, "K"};
    const long double cap = 1.0L - 1.0L / to_double(*c.K);
    for (std::uint64_t n = first; n <= horizon; ++n)
      if (lam(n) > cap + 1e-15L) rec("lambda_" + idx(n) + " > 1 - 1/K");
  }
  auto check_theta = [&](const NatFn& th, const std::vector<long double>& sums, const char* name) {
    rep.checked.push_back(name);
    Recorder rec{rep, 0, name};
    for (std::uint64_t n = 0; n <= horizon; ++n) {
      auto t = small(th(Nat{n}), horizon);
      if (!t) break;
      if (!at_least(sums[*t + 1], static_cast<long double>(n)))
        rec("n=" + idx(n) + ": partial sum through " + idx(*t) + " is below n");
    }
  };
  if (c.theta_sum) check_theta(*c.theta_sum, lam_sum, "theta_sum");
  if (c.theta_prod) check_theta(*c.theta_prod, prod_sum, "theta_prod");

  if (c.alpha) {
    rep.checked.push_back("alpha");
    Recorder rec{rep, 0, "alpha"};
    for (std::uint64_t i = first; i <= horizon; ++i) {
      for (std::uint64_t n = 0; n <= horizon; ++n) {
        Nat a = (*c.alpha)(Nat{i}, Nat{n});
        auto end = small(Nat{a + i}, horizon + 1);  // window [i, i + a - 1]
        if (!end) break;
        if (!at_least(lam_sum[*end] - lam_sum[i], static_cast<long double>(n)))
          rec("i=" + idx(i) + ", n=" + idx(n) + ": window sum below n");
        if ((*c.alpha)(Nat{i + 1}, Nat{n}) < a) rec("i=" + idx(i) + ", n=" + idx(n) + ": not monotone in i");
      }
    }
  }
  if (c.alpha_conv) {
    rep.checked.push_back("alpha_conv");
    Recorder rec{rep, 0, "alpha_conv"};
    for (const auto& eps : eps_grid) {
      auto g = small((*c.alpha_conv)(eps), horizon);
      if (!g) continue;
      const long double e = to_double(eps);
      for (std::uint64_t n = std::max(*g, first); n <= horizon; ++n)
        if (lam(n) > e + 1e-15L) {
          rec("eps=" + to_string(eps) + ": lambda_" + idx(n) + " > eps");
          break;
        }
    }
  }
  if (c.beta_cauchy) {
    rep.checked.push_back("beta_cauchy");
    Recorder rec{rep, 0, "beta_cauchy"};
    auto diffs = prefix(first, horizon + 2, [&](std::uint64_t k) { return std::fabs(lam(k + 1) - lam(k)); });
    check_cauchy(*c.beta_cauchy, diffs, horizon, eps_grid, rec);
  }
  if (sch.s) {
    auto s = [&](std::uint64_t k) -> long double { return (*sch.s)(k); };
    if (c.L && c.N0) {
      rep.checked.push_back("L,N0");
      Recorder rec{rep, 0, "L,N0"};
      const long double cap = 1.0L - 1.0L / to_double(*c.L);
      for (std::uint64_t n = std::max(first, to_u64(*c.N0)); n <= horizon; ++n)
        if (s(n) > cap + 1e-15L) rec("s_" + idx(n) + " > 1 - 1/L");
    }
    if (c.gamma_cauchy) {
      rep.checked.push_back("gamma_cauchy");
      Recorder rec{rep, 0, "gamma_cauchy"};
      auto sums = prefix(first, horizon + 2, [&](std::uint64_t k) { return s(k) * (1 - lam(k)); });
      check_cauchy(*c.gamma_cauchy, sums, horizon, eps_grid, rec);
    }
    if (c.delta_cauchy) {
      rep.checked.push_back("delta_cauchy");
      Recorder rec{rep, 0, "delta_cauchy"};
      auto sums = prefix(first, horizon + 2, s);
      check_cauchy(*c.delta_cauchy, sums, horizon, eps_grid, rec);
    }
  }
  return rep;
}

}  // namespace fprates
