#include <doctest.h>

#include <cmath>

#include "fprates/errors.hpp"
#include "fprates/schedules.hpp"

using namespace fprates;

TEST_CASE("theta_to_alpha") {
  // lambda_n = 1 has theta(n) = n; every gamma(j, n) is n + 1.
  auto a = theta_to_alpha(NatFn::linear(1));
  for (int i = 0; i < 20; ++i)
    for (int n = 0; n < 20; ++n) CHECK(a(Nat{i}, Nat{n}) == n + 1);

  // Same theta without the affine shortcut goes through the max loop.
  NatFn opaque{"id", [](const Nat& n) { return n; }, std::nullopt};
  auto b = theta_to_alpha(opaque);
  for (int i = 0; i < 20; ++i)
    for (int n = 0; n < 20; ++n) CHECK(b(Nat{i}, Nat{n}) == n + 1);

  auto c = theta_to_alpha(one_over_n_schedule().certs.need_theta_sum());
  CHECK(c(Nat{0}, Nat{3}) == 22);  // ceil(e^3) + 1
  CHECK(c(Nat{0}, Nat{1}) == 4);
}

TEST_CASE("theta_to_alpha agrees with the max formula for affine theta") {
  for (int sa = 1; sa <= 4; ++sa) {
    for (int sc = 0; sc <= 3; ++sc) {
      auto fast = theta_to_alpha(NatFn::linear(sa, sc));
      NatFn slow_theta{"x", [sa, sc](const Nat& n) { return Nat{sa * n + sc}; }, std::nullopt};
      auto slow = theta_to_alpha(slow_theta);
      for (int i = 0; i < 12; ++i)
        for (int n = 0; n < 12; ++n) CHECK(fast(Nat{i}, Nat{n}) == slow(Nat{i}, Nat{n}));
    }
  }
}

TEST_CASE("alpha_hat") {
  auto two_n = Alpha::linear(2);
  for (int i = 0; i < 30; ++i)
    for (int n = 0; n < 10; ++n) CHECK(alpha_hat(two_n, Nat{i}, Nat{n}).value == 2 * n * (i + 1));

  // alpha(i,n) = n + 1 through theta(n) = n
  auto a = theta_to_alpha(NatFn::linear(1));
  for (int i = 0; i < 30; ++i)
    for (int n = 0; n < 10; ++n) CHECK(alpha_hat(a, Nat{i}, Nat{n}).value == (n + 1) * (i + 1));

  // base case equals alpha(0, n)
  CHECK(alpha_hat(two_n, Nat{0}, Nat{7}).value == two_n(Nat{0}, Nat{7}));
}

TEST_CASE("alpha_hat closed form agrees with direct iteration") {
  auto fast = theta_to_alpha(NatFn::linear(3, 1));
  Alpha slow{"slow", fast.fn, nullptr};
  for (int i = 0; i < 15; ++i)
    for (int n = 1; n < 6; ++n) {
      auto f = alpha_hat(fast, Nat{i}, Nat{n});
      auto s = alpha_hat(slow, Nat{i}, Nat{n});
      CHECK_FALSE(f.saturated);
      CHECK(f.value == s.value);
    }
}

TEST_CASE("alpha_hat is strictly increasing in i") {
  auto a = theta_to_alpha(NatFn::linear(2, 1));
  for (int n = 1; n < 5; ++n) {
    Nat prev = -1;
    for (int i = 0; i < 40; ++i) {
      Nat v = alpha_hat(a, Nat{i}, Nat{n}).value;
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("alpha_hat saturates instead of running away") {
  EvalLimits tight;
  tight.max_bits = 64;
  tight.max_steps = 1000;
  auto a = theta_to_alpha(NatFn::linear(2));
  auto r = alpha_hat(a, Nat{"1000000"}, Nat{1}, tight);
  CHECK(r.saturated);
  CHECK(r.value > 0);
  Alpha opaque{"x", a.fn, nullptr};
  auto r2 = alpha_hat(opaque, Nat{"1000000"}, Nat{1}, tight);
  CHECK(r2.saturated);
}

TEST_CASE("constant schedule") {
  auto half = constant_schedule(Rational{1, 2});
  CHECK(half.certs.need_K() == 2);
  CHECK(half.certs.need_alpha()(Nat{5}, Nat{3}) == 6);
  CHECK(half.certs.need_theta_prod()(Nat{3}) == 12);
  for (int i = 0; i < 20; ++i) CHECK(alpha_hat(half.certs.need_alpha(), Nat{i}, Nat{4}).value == 8 * (i + 1));

  auto quarter = constant_schedule(Rational{1, 4});
  CHECK(quarter.certs.need_K() == 4);
  CHECK(quarter.certs.need_theta_prod()(Nat{1}) == 6);  // ceil(16/3)

  auto third = constant_schedule(Rational{2, 3});
  CHECK(third.certs.need_K() == 3);

  CHECK_THROWS_AS(constant_schedule(Rational{0}), DomainError);
  CHECK_THROWS_AS(constant_schedule(Rational{1}), DomainError);
}

TEST_CASE("one over n schedule") {
  auto s = one_over_n_schedule();
  CHECK(s.certs.need_alpha_conv()(Rational{1, 10}) == 10);
  CHECK(s.certs.need_beta_cauchy()(Rational{1, 16}) == 16);
  CHECK(s.certs.need_theta_sum()(Nat{3}) == 21);
  double h = 0;
  for (int k = 1; k <= 21; ++k) h += 1.0 / k;
  CHECK(h >= 3);
  CHECK_THROWS_AS(s.certs.need_K(), MissingCertificate);
  CHECK_THROWS_AS(s.certs.need_alpha(), MissingCertificate);
}

TEST_CASE("validation accepts correct certificates") {
  CHECK(validate_certificates(constant_schedule(Rational{1, 2}), 1000).ok());
  CHECK(validate_certificates(constant_schedule(Rational{1, 4}), 1000).ok());
  CHECK(validate_certificates(constant_schedule(Rational{9, 10}), 500).ok());
  auto r = validate_certificates(one_over_n_schedule(), 1000);
  CHECK(r.ok());
  CHECK(r.checked.size() == 3);
  CHECK(validate_certificates(with_s_zero(constant_schedule(Rational{1, 2})), 500).ok());
  CHECK(validate_certificates(with_s_geometric(constant_schedule(Rational{1, 2}), Rational{1, 2}, Rational{1, 2}), 500)
            .ok());

  CertifiedSchedule derived = constant_schedule(Rational{1, 3});
  derived.certs.alpha = theta_to_alpha(derived.certs.need_theta_sum());
  CHECK(validate_certificates(derived, 300).ok());
}

TEST_CASE("validation detects broken certificates") {
  auto cs = constant_schedule(Rational{1, 2});
  auto good = cs.certs.need_alpha();
  cs.certs.alpha = Alpha{"2n-1", [good](const Nat& i, const Nat& n) { return monus(good(i, n), Nat{1}); }, nullptr};
  auto r = validate_certificates(cs, 1000);
  CHECK_FALSE(r.ok());
  CHECK(r.violations.front().certificate == "alpha");

  auto k = constant_schedule(Rational{1, 2});
  k.certs.K = Nat{1};
  CHECK_FALSE(validate_certificates(k, 100).ok());

  auto th = constant_schedule(Rational{1, 4});
  th.certs.theta_prod = NatFn::linear(5);  // ceil(16/3) = 6 is needed
  CHECK_FALSE(validate_certificates(th, 1000).ok());

  auto b = one_over_n_schedule();
  b.certs.beta_cauchy = EpsFn{"half", [](const Rational& e) { return ceil(Rational{1 / (2 * e)}); }};
  CHECK_FALSE(validate_certificates(b, 1000).ok());

  auto conv = one_over_n_schedule();
  conv.certs.alpha_conv = EpsFn::constant(2);
  CHECK_FALSE(validate_certificates(conv, 100).ok());

  auto geo = with_s_geometric(constant_schedule(Rational{1, 2}), Rational{1, 2}, Rational{1, 2});
  geo.certs.delta_cauchy = EpsFn::constant(1);
  CHECK_FALSE(validate_certificates(geo, 200).ok());
}

TEST_CASE("geometric s certificates") {
  auto g = with_s_geometric(constant_schedule(Rational{1, 2}), Rational{3, 4}, Rational{1, 2});
  CHECK(g.certs.need_L() == 4);
  // tail s0 q^(N+1)/(1-q) = 1.5 / 2^(N+1) < 0.1 first at N = 3
  CHECK(g.certs.need_delta_cauchy()(Rational{1, 10}) == 3);
  CHECK_THROWS_AS(with_s_geometric(constant_schedule(Rational{1, 2}), Rational{1}, Rational{1, 2}), DomainError);
}
