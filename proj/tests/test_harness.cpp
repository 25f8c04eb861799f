#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "fprates/errors.hpp"
#include "fprates/harness.hpp"

using namespace fprates;

namespace {

const Point kE1 = Point::vec({1, 0});

// Quarter turn with lambda = 1/2: residual sqrt(2) 2^(-n/2), so residual < eps
// iff 2^(1-n) < eps^2. Exact in rationals.
std::uint64_t quarter_turn_first_hit(const Rational& eps) {
  Rational r = 2;
  std::uint64_t n = 0;
  while (r >= eps * eps) {
    r /= 2;
    ++n;
  }
  return n;
}

CertifyOptions opts(std::uint64_t cap, std::uint64_t seed = 7) {
  CertifyOptions o;
  o.cap = cap;
  o.seed = seed;
  o.samples = 500;
  return o;
}

const Hypothesis* find(const CertificationReport& r, const std::string& name) {
  for (const auto& h : r.hypotheses)
    if (h.name == name) return &h;
  return nullptr;
}

bool any_violated(const CertificationReport& r) {
  for (const auto& h : r.hypotheses)
    if (h.status == HypothesisStatus::Violated) return true;
  return false;
}

// Fabricated bound with the inputs of cat0_constant(eps, 2, 1/2) but an arbitrary value.
BoundValue fake_cat0(const Rational& eps, unsigned long value, bool saturated = false) {
  BoundValue b = cat0_constant(eps, 2, Rational{1, 2});
  b.value = value;
  b.saturated = saturated;
  return b;
}

}  // namespace

TEST_CASE("quarter turn KM certification") {
  auto rot = rotation_map(std::numbers::pi / 2);
  auto sched = constant_schedule(Rational{1, 2});
  for (const Rational& eps : {Rational{1}, Rational{1, 2}, Rational{1, 10}}) {
    CAPTURE(to_string(eps));
    auto bound = cat0_constant(eps, 2, Rational{1, 2});
    auto r = certify_asymptotic_regularity(rot, Scheme::KM, sched, kE1, eps, bound, opts(1000));
    REQUIRE(r.witness);
    CHECK(*r.witness == quarter_turn_first_hit(eps));
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.hypotheses_hold());
    CHECK(r.trace.monotone);
  }
  CHECK(quarter_turn_first_hit(Rational{1, 10}) == 8);
  CHECK(cat0_constant(Rational{1, 10}, 2, Rational{1, 2}).value == 14400);

  // first hit 21 lies past the cap
  Rational small{1, 1000};
  CHECK(quarter_turn_first_hit(small) == 21);
  auto r = certify_asymptotic_regularity(rot, Scheme::KM, sched, kE1, small, cat0_constant(small, 2, Rational{1, 2}),
                                         opts(5));
  CHECK_FALSE(r.witness);
  CHECK(r.verdict == Verdict::Inconclusive);
  CHECK(r.trace.steps == 6);
}

TEST_CASE("translation violates the hypotheses") {
  auto tr = translation_map(1.0);
  auto sched = constant_schedule(Rational{1, 2});
  Rational eps{1, 2};
  // 256 <= cap, monotone residuals: only the hypotheses keep this from a fail
  auto r = certify_asymptotic_regularity(tr, Scheme::KM, sched, Point::real(0), eps,
                                         cat0_constant(eps, 1, Rational{1, 2}), opts(1000));
  CHECK(r.verdict == Verdict::Inconclusive);
  CHECK_FALSE(r.witness);
  CHECK(r.trace.min == 1.0);
  CHECK(r.trace.last == 1.0);
  CHECK(any_violated(r));
  REQUIRE(find(r, "approximate-fixed-points"));
  CHECK(find(r, "approximate-fixed-points")->status == HypothesisStatus::Violated);
  CHECK(find(r, "bound-parameters")->status == HypothesisStatus::Violated);
}

TEST_CASE("verdict rules") {
  auto rot = rotation_map(std::numbers::pi / 2);
  auto sched = constant_schedule(Rational{1, 2});
  Rational eps{1, 10};

  // a bound below the first hit (8) on a monotone scheme is refuted
  auto r = certify_asymptotic_regularity(rot, Scheme::KM, sched, kE1, eps, fake_cat0(eps, 3), opts(1000));
  CHECK(r.verdict == Verdict::Fail);
  CHECK_FALSE(r.witness);
  CHECK(r.trace.steps == 4);
  CHECK(r.trace.last >= 0.1);

  // not when the bound is only a lower bound
  auto s = certify_asymptotic_regularity(rot, Scheme::KM, sched, kE1, eps, fake_cat0(eps, 3, true), opts(1000));
  CHECK(s.verdict == Verdict::Inconclusive);

  // not when the bound exceeds the cap
  auto c = certify_asymptotic_regularity(rot, Scheme::KM, sched, kE1, eps, fake_cat0(eps, 3), opts(2));
  CHECK(c.verdict == Verdict::Inconclusive);

  // Halpern: never fail, even with a bound far too small
  auto h = one_over_n_schedule();
  auto hb = halpern_one_over_n(1, 2);
  hb.value = 1;
  auto hr = certify_asymptotic_regularity(rot, Scheme::Halpern, h, kE1, 1, hb, opts(1000));
  CHECK(hr.verdict == Verdict::Inconclusive);
  CHECK(hr.witness);
}

TEST_CASE("non-monotone schemes pass on built-in examples") {
  auto rot = rotation_map(std::numbers::pi / 2);
  auto h = one_over_n_schedule();
  auto r = certify_asymptotic_regularity(rot, Scheme::Halpern, h, kE1, 1, halpern_one_over_n(1, 2), opts(2000));
  CHECK(r.verdict == Verdict::Pass);
  // the witness starts a run of residuals below eps that lasts to the cap
  auto tr = iterate_halpern(rot, h.schedule, kE1, 2000);
  REQUIRE(r.witness);
  for (std::uint64_t n = *r.witness; n <= 2000; ++n) CHECK(tr.residuals[n] < 1.0);
  CHECK(tr.residuals[*r.witness - 1] >= 1.0);

  auto ish = with_s_geometric(constant_schedule(Rational{1, 2}), Rational{1, 2}, Rational{1, 2});
  const auto& c = ish.certs;
  for (const Rational& eps : {Rational{1}, Rational{1, 2}}) {
    auto b = ishikawa_cat0_constant(eps, 2, Rational{1, 2}, c.need_L(), c.need_N0(), c.need_delta_cauchy());
    auto ir = certify_asymptotic_regularity(rot, Scheme::Ishikawa, ish, kE1, eps, b, opts(1000));
    CHECK(ir.verdict == Verdict::Pass);
    CHECK(ir.hypotheses_hold());
  }
}

TEST_CASE("KM passes on every bounded built-in example") {
  auto sched = constant_schedule(Rational{1, 2});
  auto disk = make_euclidean(2, ConvexRegion::ball(Point::vec({0, 0}), 1.0));
  struct Case {
    MapHandle map;
    Point x0;
  };
  std::vector<Case> cases = {
      {rotation_map(std::numbers::pi / 2), kE1},
      {rotation_map(std::numbers::pi), Point::vec({0.6, 0.8})},
      {projection_map(), Point::vec({0.6, 0.8})},
      {reflection_map(), Point::real(0)},
      {contraction_map(disk, Point::vec({0.2, 0.1}), 0.5), Point::vec({-0.6, 0.0})},
  };
  for (const auto& cs : cases)
    for (const Rational& eps : {Rational{1}, Rational{1, 2}, Rational{1, 10}}) {
      CAPTURE(cs.map.name);
      CAPTURE(to_string(eps));
      Rational dc = to_rational(cs.map.space->diameter());
      auto bound = cat0_constant(eps, dc, Rational{1, 2});
      auto r = certify_asymptotic_regularity(cs.map, Scheme::KM, sched, cs.x0, eps, bound, opts(100000));
      CHECK(r.verdict == Verdict::Pass);
      CHECK(r.hypotheses_hold());
      REQUIRE(r.witness);
      CHECK(Nat{static_cast<unsigned long>(*r.witness)} <= bound.value);
    }

  // Kirk's map is only directionally nonexpansive: use the matching bound
  auto kirk = kirk_map();
  for (const Rational& eps : {Rational{1}, Rational{1, 2}, Rational{1, 10}}) {
    auto r = certify_asymptotic_regularity(kirk, Scheme::KM, sched, Point::vec({0.5, 0.5}), eps,
                                           brs_dirne_constant(eps, 1, 2), opts(1000));
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.hypotheses_hold());
  }
  // and the sampled nonexpansive check flags it under a plain bound
  auto r = certify_asymptotic_regularity(kirk, Scheme::KM, sched, Point::vec({0.5, 0.5}), 1, brs_constant(1, 1, 2),
                                         opts(1000));
  CHECK(find(r, "lipschitz")->status == HypothesisStatus::Violated);
}

TEST_CASE("mismatched inputs") {
  auto rot = rotation_map(std::numbers::pi / 2);
  auto sched = constant_schedule(Rational{1, 2});
  Rational eps{1, 2};
  CHECK_THROWS_AS(certify_asymptotic_regularity(rot, Scheme::KM, sched, kE1, eps, halpern_one_over_n(eps, 2)),
                  ConfigError);
  CHECK_THROWS_AS(certify_asymptotic_regularity(rot, Scheme::KM, sched, kE1, eps, cat0_constant(1, 2, Rational{1, 2})),
                  ConfigError);
  CHECK_THROWS_AS(
      certify_asymptotic_regularity(rot, Scheme::KM, sched, kE1, eps, cat0_constant(eps, 2, Rational{1, 3})),
      ConfigError);
  CHECK_THROWS_AS(certify_asymptotic_regularity(rot, Scheme::Halpern, sched, kE1, 1, halpern_one_over_n(1, 2)),
                  ConfigError);
  CHECK_THROWS_AS(certify_asymptotic_regularity(rot, Scheme::AsneKM, sched, kE1, eps, cat0_constant(eps, 2, Rational{1, 2})),
                  ConfigError);
  CHECK_THROWS_AS(
      certify_asymptotic_regularity(rot, Scheme::KM, sched, kE1, eps, cat0_constant(eps, 2, Rational{1, 2}), opts(0)),
      ConfigError);

  CertifiedSchedule bare{sched.schedule, {}};
  CHECK_THROWS_AS(certify_asymptotic_regularity(rot, Scheme::KM, bare, kE1, eps, brs_constant(eps, 2, 2)),
                  MissingCertificate);
  CHECK_THROWS_AS(
      certify_asymptotic_regularity(rot, Scheme::KM, bare, kE1, eps, brs_bound(eps, 2, 2, Alpha::linear(2))),
      MissingCertificate);
  // a bound for a larger K is fine, a smaller one is flagged
  auto loose = certify_asymptotic_regularity(rot, Scheme::KM, sched, kE1, eps, brs_constant(eps, 2, 3), opts(100));
  CHECK(loose.hypotheses_hold());
  auto tight = constant_schedule(Rational{9, 10});
  auto bad = certify_asymptotic_regularity(rot, Scheme::KM, tight, kE1, eps, brs_constant(eps, 2, 2), opts(100));
  CHECK(find(bad, "bound-parameters")->status == HypothesisStatus::Violated);
}

TEST_CASE("metastability certification") {
  auto asne = as_asne(rotation_map(std::numbers::pi / 2), 0);
  auto sched = constant_schedule(Rational{1, 2});
  const double eps = 1.0;
  auto trace = iterate_asne_km(asne, sched.schedule, kE1, 200);

  for (const char* gname : {"zero", "identity"}) {
    CAPTURE(gname);
    auto g = parse_counterexample(gname);
    auto bound = asne_general(0, 2, 1, cat0_modulus(), 1, g, false);
    auto r = certify_metastability(asne, sched, kE1, 1, g, bound, opts(1000));
    CHECK(r.verdict == Verdict::Pass);
    REQUIRE(r.witness);
    CHECK(Nat{static_cast<unsigned long>(*r.witness)} <= bound.value);
    CHECK(r.hypotheses_hold());

    // brute force over the explicit trace
    std::uint64_t oracle = 0;
    for (;; ++oracle) {
      std::uint64_t w = to_u64(g(Nat{static_cast<unsigned long>(oracle)}));
      bool ok = true;
      for (std::uint64_t i = oracle; i <= oracle + w; ++i) ok = ok && trace.residuals[i] < eps;
      if (ok) break;
    }
    CHECK(*r.witness == oracle);
  }
  CHECK(asne_general(0, 2, 1, cat0_modulus(), 1, parse_counterexample("zero"), false).value == 5640192);

  auto zero = parse_counterexample("zero");
  auto id = as_asne(identity_map(make_euclidean(2, ConvexRegion::ball(Point::vec({0, 0}), 1.0))), 0);
  for (const char* gname : {"zero", "identity", "linear:3,2"}) {
    auto g = parse_counterexample(gname);
    auto r = certify_metastability(id, sched, kE1, 1, g, asne_general(0, 2, 1, cat0_modulus(), 1, g, false), opts(100));
    CHECK(r.verdict == Verdict::Pass);
    CHECK(r.witness == 0u);
  }

  auto tr = as_asne(translation_map(1.0), 0);
  Rational half{1, 2};
  auto r = certify_metastability(tr, sched, Point::real(0), half, zero, asne_general(0, 2, 1, cat0_modulus(), half, zero, false),
                                 opts(1000));
  CHECK(r.verdict == Verdict::Inconclusive);
  CHECK(find(r, "approximate-fixed-points")->status == HypothesisStatus::Violated);

  CHECK_THROWS_AS(certify_metastability(rotation_map(1.0), sched, kE1, 1, zero,
                                        asne_general(0, 2, 1, cat0_modulus(), 1, zero, false)),
                  ConfigError);
  CHECK_THROWS_AS(certify_metastability(asne, sched, kE1, 1, parse_counterexample("identity"),
                                        asne_general(0, 2, 1, cat0_modulus(), 1, zero, false)),
                  ConfigError);
}

TEST_CASE("ergodic certification") {
  auto half = rotation_map(std::numbers::pi);
  auto g = parse_counterexample("identity");
  Rational eps{1, 2};
  auto bound = ergodic_bound(ErgodicVariant::Hilbert, eps, 1, hilbert_modulus(), g);
  auto r = certify_ergodic(half, kE1, eps, g, bound, opts(1000));

  // means of (-1)^i x0: x_n = x0/n for odd n, 0 for even n
  auto mean = [](std::uint64_t n) { return n % 2 ? 1.0 / static_cast<double>(n) : 0.0; };
  std::uint64_t oracle = 1;
  for (;; ++oracle) {
    bool ok = true;
    for (std::uint64_t i = oracle; i <= 2 * oracle; ++i)
      for (std::uint64_t j = i; j <= 2 * oracle; ++j) ok = ok && std::abs(mean(i) - mean(j)) < 0.5;
    if (ok) break;
  }
  CHECK(oracle == 2);
  REQUIRE(r.witness);
  CHECK(*r.witness == oracle);
  CHECK(r.verdict == Verdict::Pass);
  CHECK(r.hypotheses_hold());
  REQUIRE(r.comparison);
  CHECK(r.comparison->formula == Formula::Agt);
  CHECK_FALSE(r.comparison->display().empty());

  auto ident = identity_map(make_euclidean(2, ConvexRegion::ball(Point::vec({0, 0}), 1.0)));
  auto ri = certify_ergodic(ident, kE1, eps, g, bound, opts(1000));
  CHECK(ri.witness == 1u);
  CHECK(ri.verdict == Verdict::Pass);

  // agt as the primary bound carries the Hilbert bound as comparison
  auto ra = certify_ergodic(half, kE1, eps, g, agt_bound(eps, 1, g), opts(1000));
  CHECK(ra.witness == 2u);
  REQUIRE(ra.comparison);
  CHECK(ra.comparison->formula == Formula::ErgodicHilbert);

  CHECK_THROWS_AS(certify_ergodic(reflection_map(), Point::real(0), eps, g, bound), ConfigError);
  CHECK_THROWS_AS(certify_ergodic(half, kE1, eps, g, cat0_constant(eps, 2, Rational{1, 2})), ConfigError);
}

TEST_CASE("minimal displacement") {
  auto tr = translation_map(1.0);
  auto box = make_real_line(ConvexRegion::box({-10}, {10}));
  auto est = minimal_displacement_estimate(tr, *box, 1000, 3);
  CHECK(est.value == 1.0);
  CHECK(est.samples == 1000);

  auto rot = rotation_map(std::numbers::pi / 2);
  auto d = minimal_displacement_estimate(rot, *rot.space, 5000, 3);
  CHECK(d.value >= 0.0);
  CHECK(d.value < 0.1);

  auto kirk = kirk_map();
  auto k = minimal_displacement_estimate(kirk, *kirk.space, 200, 3);
  CHECK(k.value >= 0.0);
  // an upper bound: it never drops below the displacement at any sampled point
  Rng rng(3);
  double direct = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 200; ++i) {
    Point x = kirk.space->sample(rng);
    direct = std::min(direct, kirk.space->dist(x, kirk(x)));
  }
  CHECK(k.value == direct);

  CHECK_THROWS_AS(minimal_displacement_estimate(tr, *box, 0, 3), DomainError);
}

TEST_CASE("consistency suite") {
  auto rep = consistency_suite();
  CHECK(rep.ok());
  REQUIRE(rep.checks.size() == 4);
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CHECK(c.points >= 20);
    CHECK(c.mismatches == 0);
  }
}

TEST_CASE("export") {
  auto rot = rotation_map(std::numbers::pi / 2);
  auto sched = constant_schedule(Rational{1, 2});
  Rational eps{1, 10};
  auto r = certify_asymptotic_regularity(rot, Scheme::KM, sched, kE1, eps, cat0_constant(eps, 2, Rational{1, 2}),
                                         opts(1000, 11));

  auto csv = to_csv({make_row(r)});
  std::istringstream lines(csv);
  std::string header, row, extra;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "formula_id,epsilon,b_or_dC,K,L,N0,lambda_desc,bound_decimal,witness,verdict,seed");
  CHECK(row == "cat0-constant,0.1,2,,,,const:0.5,14400,8,pass,11");
  CHECK_FALSE(std::getline(lines, extra));
  CHECK(to_csv({}) == header + "\n");

  auto big = halpern_one_over_n(1, 1);
  CHECK(make_row(big, "1/n", 0).bound_decimal == "274877906944");

  // JSON round trip, including a report with a comparison bound and a g
  auto e = certify_ergodic(rotation_map(std::numbers::pi), kE1, Rational{1, 2}, parse_counterexample("identity"),
                           ergodic_bound(ErgodicVariant::Hilbert, Rational{1, 2}, 1, hilbert_modulus(),
                                         parse_counterexample("identity")),
                           opts(100));
  std::vector<CertificationReport> reports = {r, e};
  auto text = to_json(reports);
  CHECK(reports_from_json(text) == reports);
  CHECK(text.find("\"bound_decimal\": \"14400\"") != std::string::npos);

  auto dir = std::filesystem::temp_directory_path() / "fprates_export_test";
  std::filesystem::create_directories(dir);
  export_reports(reports, ExportFormat::Json, (dir / "r.json").string());
  export_reports({r}, ExportFormat::Csv, (dir / "r.csv").string());
  std::ifstream jin(dir / "r.json");
  std::stringstream jbuf;
  jbuf << jin.rdbuf();
  CHECK(reports_from_json(jbuf.str()) == reports);
  std::ifstream cin(dir / "r.csv");
  std::stringstream cbuf;
  cbuf << cin.rdbuf();
  CHECK(cbuf.str() == csv);
  std::filesystem::remove_all(dir);

  CHECK_THROWS_AS(reports_from_json("[{\"kind\": 1}]"), ConfigError);
  CHECK_THROWS_AS(parse_export_format("xml"), ConfigError);
}

TEST_CASE("certification is replayable") {
  auto asne = as_asne(rotation_map(std::numbers::pi / 2), 0);
  auto sched = constant_schedule(Rational{1, 2});
  auto g = parse_counterexample("identity");
  auto bound = asne_general(0, 2, 1, cat0_modulus(), 1, g, false);
  auto a = certify_metastability(asne, sched, kE1, 1, g, bound, opts(1000, 42));
  auto b = certify_metastability(asne, sched, kE1, 1, g, bound, opts(1000, 42));
  CHECK(a == b);
  CHECK(to_json({a}) == to_json({b}));
}

TEST_CASE("verdict names and exit codes") {
  for (auto v : {Verdict::Pass, Verdict::Inconclusive, Verdict::Fail}) CHECK(parse_verdict(to_string(v)) == v);
  CHECK(exit_code(Verdict::Pass) == 0);
  CHECK(exit_code(Verdict::Inconclusive) == 2);
  CHECK(exit_code(Verdict::Fail) == 3);
  CHECK_THROWS_AS(parse_verdict("maybe"), ConfigError);
}
