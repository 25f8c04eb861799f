#include "fprates/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fprates/errors.hpp"

namespace fprates {

using json = nlohmann::ordered_json;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Fail: return "fail";
  }
  return "?";
}

std::string to_string(Certification c) {
  switch (c) {
    case Certification::AsymptoticRegularity: return "asymptotic-regularity";
    case Certification::Metastability: return "metastability";
    case Certification::Ergodic: return "ergodic";
  }
  return "?";
}

std::string to_string(HypothesisStatus s) {
  switch (s) {
    case HypothesisStatus::Holds: return "holds";
    case HypothesisStatus::Violated: return "violated";
    case HypothesisStatus::Unverified: return "unverified";
  }
  return "?";
}

namespace {

template <typename E, std::size_t N>
E parse_enum(const std::string& name, const E (&all)[N], const char* what) {
  for (E e : all)
    if (to_string(e) == name) return e;
  throw ConfigError(std::string("unknown ") + what + " '" + name + "'");
}

}  // namespace

Verdict parse_verdict(const std::string& name) {
  static constexpr Verdict all[] = {Verdict::Pass, Verdict::Inconclusive, Verdict::Fail};
  return parse_enum(name, all, "verdict");
}

Certification parse_certification(const std::string& name) {
  static constexpr Certification all[] = {Certification::AsymptoticRegularity, Certification::Metastability,
                                          Certification::Ergodic};
  return parse_enum(name, all, "certification");
}

HypothesisStatus parse_hypothesis_status(const std::string& name) {
  static constexpr HypothesisStatus all[] = {HypothesisStatus::Holds, HypothesisStatus::Violated,
                                             HypothesisStatus::Unverified};
  return parse_enum(name, all, "hypothesis status");
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Pass: return 0;
    case Verdict::Inconclusive: return 2;
    case Verdict::Fail: return 3;
  }
  return 2;
}

std::string abbreviate(const std::string& decimal, std::size_t keep) {
  std::size_t start = decimal.find_first_of("0123456789");
  if (start == std::string::npos) return decimal;
  std::size_t digits = decimal.size() - start;
  if (digits <= keep) return decimal;
  return decimal.substr(0, start + keep / 2) + "..." + decimal.substr(decimal.size() - keep / 2) + " (" +
         std::to_string(digits) + " digits)";
}

bool CertificationReport::hypotheses_hold() const {
  return std::all_of(hypotheses.begin(), hypotheses.end(),
                     [](const Hypothesis& h) { return h.status == HypothesisStatus::Holds; });
}

namespace {

constexpr double kMonotoneTol = 1e-12;
constexpr std::uint64_t kWindowLimit = 1'000'000;

std::optional<std::string> input(const BoundValue& b, const std::string& key) {
  for (const auto& [k, v] : b.inputs)
    if (k == key) return v;
  return std::nullopt;
}

enum class Family { KM, Halpern, Ishikawa, Asne, Ergodic, Other };

Family family(Formula f) {
  switch (f) {
    case Formula::Brs:
    case Formula::BrsConstant:
    case Formula::BrsOrbitBounded:
    case Formula::BrsDirneOrbit:
    case Formula::BrsDirneConstant:
    case Formula::Groetsch:
    case Formula::GroetschFactored:
    case Formula::Cat0General:
    case Formula::Cat0Constant: return Family::KM;
    case Formula::Halpern:
    case Formula::HalpernOneOverN: return Family::Halpern;
    case Formula::IshikawaH:
    case Formula::IshikawaTheorem:
    case Formula::IshikawaTheoremFactored:
    case Formula::IshikawaConstantLambda:
    case Formula::IshikawaConstantLambdaFactored:
    case Formula::IshikawaCat0Constant: return Family::Ishikawa;
    case Formula::AsneGeneral:
    case Formula::AsneGeneralFactored:
    case Formula::AsneAfp:
    case Formula::AsneCat0: return Family::Asne;
    case Formula::ErgodicGeneral:
    case Formula::ErgodicFactored:
    case Formula::ErgodicHilbert:
    case Formula::Agt: return Family::Ergodic;
    default: return Family::Other;
  }
}

bool is_dirne_formula(Formula f) { return f == Formula::BrsDirneOrbit || f == Formula::BrsDirneConstant; }

bool needs_cat0(Formula f) {
  return f == Formula::Cat0General || f == Formula::Cat0Constant || f == Formula::IshikawaCat0Constant ||
         f == Formula::AsneCat0;
}

std::optional<std::uint64_t> bound_u64(const BoundValue& b) {
  if (!fits_u64(b.value)) return std::nullopt;
  return to_u64(b.value);
}

std::uint64_t search_limit(const BoundValue& b, std::uint64_t cap) {
  auto v = bound_u64(b);
  return v ? std::min(*v, cap) : cap;
}

TraceSummary summarize(const std::vector<double>& r) {
  TraceSummary t;
  t.steps = r.size();
  if (r.empty()) return t;
  t.first = r.front();
  t.last = r.back();
  t.min = *std::min_element(r.begin(), r.end());
  for (std::size_t i = 1; i < r.size(); ++i)
    if (r[i] > r[i - 1] + kMonotoneTol) t.monotone = false;
  return t;
}

void require_eps(const BoundValue& bound, const Rational& eps) {
  auto e = input(bound, "eps");
  if (e && *e != to_string(eps))
    throw ConfigError("bound was evaluated at eps=" + *e + ", certification asks for eps=" + to_string(eps));
}

// Records one empirical or exact check toward a combined hypothesis.
class ParamChecks {
 public:
  void holds(std::string what) { add(HypothesisStatus::Holds, std::move(what)); }
  void violated(std::string what) { add(HypothesisStatus::Violated, std::move(what)); }
  void unverified(std::string what) { add(HypothesisStatus::Unverified, std::move(what)); }

  Hypothesis finish(std::string name) const {
    Hypothesis h{std::move(name), status_, {}};
    for (std::size_t i = 0; i < parts_.size(); ++i) h.detail += (i ? "; " : "") + parts_[i];
    if (parts_.empty()) h.detail = "nothing to check";
    return h;
  }

 private:
  HypothesisStatus status_ = HypothesisStatus::Holds;
  std::vector<std::string> parts_;

  void add(HypothesisStatus s, std::string what) {
    if (s == HypothesisStatus::Violated || (s == HypothesisStatus::Unverified && status_ == HypothesisStatus::Holds))
      status_ = s;
    parts_.push_back(std::move(what) + (s == HypothesisStatus::Holds ? "" : " (" + to_string(s) + ")"));
  }
};

void check_distance_inputs(ParamChecks& pc, const MapHandle& map, const Point& x0, const BoundValue& bound) {
  const Space& sp = *map.space;
  if (auto d = input(bound, "d_C")) {
    double diam = sp.diameter();
    double dc = to_double(parse_rational(*d));
    std::string what = "diameter " + format_double(diam) + " <= d_C " + *d;
    if (diam <= dc * (1 + 1e-12)) pc.holds(what);
    else pc.violated(what);
  }
  if (auto b = input(bound, "b")) {
    if (!map.fixed_point) {
      pc.unverified("b " + *b + " has no fixed point to measure against");
    } else {
      double r = sp.dist(x0, *map.fixed_point);
      std::string what = "d(x0, p) " + format_double(r) + " <= b " + *b;
      if (r <= to_double(parse_rational(*b)) * (1 + 1e-12)) pc.holds(what);
      else pc.violated(what);
    }
  }
  if (needs_cat0(bound.formula)) {
    if (sp.capabilities().cat0) pc.holds("space is CAT(0)");
    else pc.violated("space " + sp.name() + " is not CAT(0)");
  }
}

// lambda_n in [lo, hi] for n below the horizon.
bool steps_within(const StepFn& f, std::uint64_t first, std::uint64_t horizon, double lo, double hi) {
  for (std::uint64_t n = first; n < first + horizon; ++n) {
    double v = f(n);
    if (v < lo - 1e-15 || v > hi + 1e-15) return false;
  }
  return true;
}

void require_constant_lambda(const CertifiedSchedule& cs, const BoundValue& bound) {
  auto l = input(bound, "lambda");
  if (!l) return;
  if (!cs.schedule.constant_lambda || to_string(*cs.schedule.constant_lambda) != *l)
    throw ConfigError("bound assumes constant lambda " + *l + ", schedule is '" + cs.schedule.description + "'");
}

void require_id(const std::string& what, const std::optional<std::string>& in_bound, const std::string& in_schedule) {
  if (in_bound && *in_bound != in_schedule)
    throw ConfigError("bound uses " + what + " '" + *in_bound + "', schedule certifies '" + in_schedule + "'");
}

// Checks formula/scheme agreement, pulls the certificates the formula is built
// from (MissingCertificate if absent) and validates step-size parameters.
void check_schedule(ParamChecks& pc, Scheme scheme, const CertifiedSchedule& cs, const BoundValue& bound,
                    std::uint64_t horizon) {
  const Formula f = bound.formula;
  const Family fam = family(f);
  const auto& c = cs.certs;
  const auto& s = cs.schedule;
  auto mismatch = [&] {
    return ConfigError("formula " + to_string(f) + " does not apply to scheme " + to_string(scheme));
  };

  switch (scheme) {
    case Scheme::KM: {
      if (fam != Family::KM) throw mismatch();
      if (f == Formula::Brs || f == Formula::BrsOrbitBounded || f == Formula::BrsDirneOrbit)
        require_id("alpha", input(bound, "alpha"), c.need_alpha().id);
      if (f == Formula::Groetsch || f == Formula::GroetschFactored || f == Formula::Cat0General)
        require_id("theta", input(bound, "theta"), c.need_theta_prod().id);
      require_constant_lambda(cs, bound);
      if (auto k = input(bound, "K")) {
        c.need_K();
        double K = to_double(parse_rational(*k));
        std::string what = "lambda_n <= 1 - 1/" + *k + " below the horizon";
        if (steps_within(s.lambda, s.first_index, horizon, 0.0, 1.0 - 1.0 / K)) pc.holds(what);
        else pc.violated(what);
      }
      break;
    }
    case Scheme::Halpern: {
      if (fam != Family::Halpern) throw mismatch();
      if (f == Formula::HalpernOneOverN) {
        bool ok = s.first_index == 1;
        for (std::uint64_t n = 1; n <= 16 && ok; ++n) ok = s.lambda(n) == 1.0 / static_cast<double>(n);
        if (!ok) throw ConfigError("halpern-1overn needs lambda_n = 1/n, schedule is '" + s.description + "'");
      } else {
        require_id("alpha", input(bound, "alpha"), c.need_alpha_conv().id);
        require_id("beta", input(bound, "beta"), c.need_beta_cauchy().id);
        require_id("theta", input(bound, "theta"), c.need_theta_sum().id);
      }
      break;
    }
    case Scheme::Ishikawa: {
      if (fam != Family::Ishikawa) throw mismatch();
      require_constant_lambda(cs, bound);
      if (auto t = input(bound, "theta")) require_id("theta", t, c.need_theta_prod().id);
      if (auto g = input(bound, "gamma")) require_id("gamma", g, c.need_gamma_cauchy().id);
      if (auto d = input(bound, "delta")) require_id("delta", d, c.need_delta_cauchy().id);
      if (auto l = input(bound, "L")) {
        c.need_L();
        std::uint64_t n0 = c.need_N0().fits_ulong_p() ? c.need_N0().get_ui() : 0;
        double L = to_double(parse_rational(*l));
        std::string what = "s_n <= 1 - 1/" + *l + " from N0 below the horizon";
        bool ok = !s.s || steps_within(*s.s, s.first_index + n0, horizon, 0.0, 1.0 - 1.0 / L);
        if (ok) pc.holds(what);
        else pc.violated(what);
      }
      break;
    }
    case Scheme::AsneKM: {
      if (fam != Family::Asne) throw mismatch();
      if (auto l = input(bound, "L")) {
        double L = to_double(parse_rational(*l));
        std::string what = "lambda_n in [1/" + *l + ", 1 - 1/" + *l + "] below the horizon";
        if (steps_within(s.lambda, s.first_index, horizon, 1.0 / L, 1.0 - 1.0 / L)) pc.holds(what);
        else pc.violated(what);
      }
      break;
    }
    default: throw ConfigError("scheme " + to_string(scheme) + " cannot be certified here");
  }
}

Hypothesis nonexpansive_hypothesis(const MapHandle& map, const BoundValue& bound, const CertifyOptions& o) {
  const Sampler sampler = default_sampler(*map.space);
  const double tol = 1e-9;
  LipschitzReport rep;
  std::string kind;
  if (family(bound.formula) == Family::Asne) {
    rep = check_asne(map, 16, sampler, o.samples, tol, o.seed);
    kind = "asymptotically nonexpansive (16 powers)";
  } else if (is_dirne_formula(bound.formula)) {
    rep = check_dirne(map, sampler, o.samples, tol, o.seed);
    kind = "directionally nonexpansive";
  } else {
    rep = check_nonexpansive(map, sampler, o.samples, tol, o.seed);
    kind = "nonexpansive";
  }
  Hypothesis h{"lipschitz", rep.passes(tol) ? HypothesisStatus::Holds : HypothesisStatus::Violated, {}};
  h.detail = kind + " on " + std::to_string(rep.samples) + " samples, worst excess " + format_double(rep.worst_excess);
  if (!rep.sums_ok) h.detail += ", partial sums of k_n exceed K";
  return h;
}

Hypothesis fixed_point_hypothesis(const MapHandle& map, const Rational& eps, const CertifyOptions& o) {
  if (map.fixed_point) return {"approximate-fixed-points", HypothesisStatus::Holds, "fixed point known"};
  auto est = minimal_displacement_estimate(map, *map.space, o.samples, o.seed);
  std::string detail = "min d(x,Tx) over " + std::to_string(est.samples) + " samples = " + format_double(est.value);
  if (est.value < to_double(eps)) return {"approximate-fixed-points", HypothesisStatus::Holds, detail};
  return {"approximate-fixed-points", HypothesisStatus::Violated, detail + " >= eps"};
}

Hypothesis certificate_hypothesis(const CertifiedSchedule& cs, std::uint64_t horizon) {
  auto rep = validate_certificates(cs, horizon);
  Hypothesis h{"schedule-certificates", rep.ok() ? HypothesisStatus::Holds : HypothesisStatus::Violated, {}};
  h.detail = std::to_string(rep.checked.size()) + " checked to " + std::to_string(horizon);
  for (const auto& v : rep.violations) h.detail += "; " + v.certificate + ": " + v.detail;
  return h;
}

CertificationReport start_report(Certification kind, const MapHandle& map, const std::string& scheme,
                                 const std::string& schedule, const Point& x0, const Rational& eps,
                                 const BoundValue& bound, const CertifyOptions& o) {
  if (o.cap < 1) throw ConfigError("cap must be >= 1");
  if (eps <= 0) throw DomainError("eps must be positive");
  require_eps(bound, eps);
  CertificationReport r;
  r.kind = kind;
  r.map = map.name;
  r.space = map.space->name();
  r.scheme = scheme;
  r.schedule = schedule;
  r.x0 = map.space->format(x0);
  r.eps = eps;
  r.bound = bound;
  r.cap = o.cap;
  r.seed = o.seed;
  if (bound.saturated) r.notes.push_back("bound is a lower bound of the formula; pass stays sound, fail is disabled");
  return r;
}

void note_cap(CertificationReport& r, std::uint64_t limit) {
  auto v = bound_u64(r.bound);
  if (!v || *v > r.cap)
    r.notes.push_back("bound " + abbreviate(r.bound.display()) + " exceeds cap; witness search limited to " +
                      std::to_string(limit));
}

}  // namespace

CertificationReport certify_asymptotic_regularity(const MapHandle& map, Scheme scheme,
                                                  const CertifiedSchedule& schedule, const Point& x0,
                                                  const Rational& eps, const BoundValue& bound,
                                                  const CertifyOptions& options) {
  if (scheme == Scheme::AsneKM || scheme == Scheme::Cesaro || scheme == Scheme::Picard)
    throw ConfigError("asymptotic regularity is certified for km, halpern and ishikawa only");
  auto r = start_report(Certification::AsymptoticRegularity, map, to_string(scheme), schedule.schedule.description,
                        x0, eps, bound, options);
  const std::uint64_t horizon = std::min<std::uint64_t>(options.horizon, std::max<std::uint64_t>(options.cap, 1));

  ParamChecks pc;
  check_schedule(pc, scheme, schedule, bound, horizon);
  check_distance_inputs(pc, map, x0, bound);
  r.hypotheses.push_back(nonexpansive_hypothesis(map, bound, options));
  r.hypotheses.push_back(certificate_hypothesis(schedule, horizon));
  r.hypotheses.push_back(pc.finish("bound-parameters"));
  r.hypotheses.push_back(fixed_point_hypothesis(map, eps, options));

  const bool monotone = has_monotone_residuals(scheme, schedule.schedule, map);
  const double e = to_double(eps);
  // Monotone schemes: the first hit is the witness and scanning past the bound
  // adds nothing. Otherwise the witness is the start of the last run of
  // residuals below eps, scanned to the cap.
  const std::uint64_t scan_end = monotone ? search_limit(bound, options.cap) : options.cap;
  note_cap(r, scan_end);

  std::vector<double> residuals;
  std::optional<std::uint64_t> last_bad;
  bool escaped = false;
  try {
    Stepper st(map, scheme, schedule.schedule, x0);
    for (std::uint64_t n = 0; n <= scan_end; ++n) {
      if (n > 0) st.advance();
      residuals.push_back(st.residual());
      if (st.residual() >= e) last_bad = n;
      else if (monotone) break;
    }
  } catch (const RegionError& err) {
    escaped = true;
    r.notes.push_back(std::string("iterate left the region: ") + err.what());
  }
  r.trace = summarize(residuals);

  const std::uint64_t scanned = residuals.empty() ? 0 : residuals.size() - 1;
  if (!residuals.empty() && residuals.back() < e) r.witness = last_bad ? *last_bad + 1 : 0;
  if (r.witness && !monotone)
    r.notes.push_back("residual < eps on [" + std::to_string(*r.witness) + ", " + std::to_string(scanned) + "]");
  if (!monotone) r.notes.push_back("residuals not provably monotone for this scheme; fail is never reported");

  if (r.witness && Nat{static_cast<unsigned long>(*r.witness)} <= bound.value) {
    r.verdict = Verdict::Pass;
  } else if (monotone && !escaped && !bound.saturated && !r.witness && r.hypotheses_hold() &&
             bound.value <= Nat{static_cast<unsigned long>(options.cap)} &&
             scanned == to_u64(bound.value)) {
    r.verdict = Verdict::Fail;
    r.notes.push_back("residual at index " + bound.value.get_str() + " is >= eps");
  } else {
    r.verdict = Verdict::Inconclusive;
  }
  if (!r.hypotheses_hold()) r.notes.push_back("some hypotheses of the bound are not established");
  return r;
}

CertificationReport certify_metastability(const MapHandle& map, const CertifiedSchedule& schedule, const Point& x0,
                                          const Rational& eps, const CounterexampleFunction& g,
                                          const BoundValue& bound, const CertifyOptions& options) {
  auto r = start_report(Certification::Metastability, map, to_string(Scheme::AsneKM),
                        schedule.schedule.description, x0, eps, bound, options);
  r.g = g.id;
  if (auto bg = input(bound, "g"); bg && *bg != g.id)
    throw ConfigError("bound was evaluated for g=" + *bg + ", certification uses g=" + g.id);
  if (!map.asne) throw ConfigError("map " + map.name + " carries no asymptotically nonexpansive certificate");
  if (auto k = input(bound, "K"); k && Nat{*k} < map.asne->K_sum)
    throw ConfigError("bound uses K=" + *k + " below the map's K=" + map.asne->K_sum.get_str());

  const std::uint64_t horizon = std::min<std::uint64_t>(options.horizon, options.cap);
  ParamChecks pc;
  check_schedule(pc, Scheme::AsneKM, schedule, bound, horizon);
  check_distance_inputs(pc, map, x0, bound);
  r.hypotheses.push_back(nonexpansive_hypothesis(map, bound, options));
  r.hypotheses.push_back(pc.finish("bound-parameters"));
  r.hypotheses.push_back(fixed_point_hypothesis(map, eps, options));

  const std::uint64_t limit = search_limit(bound, options.cap);
  note_cap(r, limit);
  auto seq = ResidualSequence::of(map, Scheme::AsneKM, schedule.schedule, x0);
  try {
    r.witness = metastability_witness(seq, to_double(eps), window_fn(g), limit, kWindowLimit);
  } catch (const RegionError& err) {
    r.notes.push_back(std::string("iterate left the region: ") + err.what());
  }
  r.trace = summarize(seq.seen());
  r.verdict = r.witness ? Verdict::Pass : Verdict::Inconclusive;
  if (!r.hypotheses_hold()) r.notes.push_back("some hypotheses of the bound are not established");
  return r;
}

CertificationReport certify_ergodic(const MapHandle& map, const Point& x0, const Rational& eps,
                                    const CounterexampleFunction& g, const BoundValue& bound,
                                    const CertifyOptions& options) {
  if (family(bound.formula) != Family::Ergodic)
    throw ConfigError("formula " + to_string(bound.formula) + " is not an ergodic bound");
  if (map.cls != MapClass::LinearNonexpansive) throw ConfigError("ergodic certification needs a linear map");
  auto r = start_report(Certification::Ergodic, map, to_string(Scheme::Cesaro), "cesaro", x0, eps, bound, options);
  r.g = g.id;
  if (auto bg = input(bound, "g"); bg && *bg != g.id)
    throw ConfigError("bound was evaluated for g=" + *bg + ", certification uses g=" + g.id);
  auto b_text = input(bound, "b");
  if (!b_text) throw ConfigError("ergodic bound carries no b");
  const Rational b = parse_rational(*b_text);

  ParamChecks pc;
  check_distance_inputs(pc, map, x0, bound);
  const SpaceKind kind = map.space->kind();
  const bool inner_product = kind == SpaceKind::Euclidean || kind == SpaceKind::RealLine;
  if (bound.formula == Formula::ErgodicHilbert || bound.formula == Formula::Agt) {
    if (inner_product) pc.holds("Hilbert space");
    else pc.violated("space " + map.space->name() + " is not a Hilbert space");
  } else if (inner_product) {
    pc.holds("Hilbert space, any l_p modulus with p >= 2 is valid");
  } else {
    pc.unverified("modulus not matched against space " + map.space->name());
  }
  r.hypotheses.push_back(nonexpansive_hypothesis(map, bound, options));
  r.hypotheses.push_back(pc.finish("bound-parameters"));

  r.comparison = bound.formula == Formula::Agt
                     ? ergodic_bound(ErgodicVariant::Hilbert, eps, b, hilbert_modulus(), g, options.comparison_limits)
                     : agt_bound(eps, b, g, options.comparison_limits);

  const std::uint64_t limit = std::max<std::uint64_t>(search_limit(bound, options.cap), 1);
  note_cap(r, limit);
  const WindowFn w = window_fn(g);
  std::uint64_t widest = 0;
  for (std::uint64_t n = 1; n <= limit && widest < kWindowLimit; ++n) widest = std::max(widest, w(n));
  if (widest >= kWindowLimit) {
    widest = kWindowLimit;
    r.notes.push_back("windows truncated at " + std::to_string(kWindowLimit) + " means");
  }
  auto means = cesaro_means(map, x0, limit + widest + 1);
  r.witness = cauchy_window_witness(*map.space, means, 1, to_double(eps), w, limit);

  std::vector<double> steps;
  steps.reserve(means.size());
  for (std::size_t i = 0; i + 1 < means.size(); ++i) steps.push_back(map.space->dist(means[i], means[i + 1]));
  r.trace = summarize(steps);
  r.notes.push_back("trace holds distances between consecutive means");
  r.verdict = r.witness ? Verdict::Pass : Verdict::Inconclusive;
  return r;
}

MinimalDisplacementEstimate minimal_displacement_estimate(const MapHandle& map, const Space& domain,
                                                          std::size_t samples, std::uint64_t seed) {
  if (samples == 0) throw DomainError("minimal displacement needs at least one sample");
  Rng rng(seed);
  MinimalDisplacementEstimate est;
  est.value = std::numeric_limits<double>::infinity();
  for (; est.samples < samples; ++est.samples) {
    Point x = domain.sample(rng);
    est.value = std::min(est.value, map.space->dist(x, map(x)));
  }
  return est;
}

bool ConsistencyReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const IdentityCheck& c) { return c.mismatches == 0; });
}

ConsistencyReport consistency_suite() {
  const std::vector<Rational> eps = {Rational{4},    Rational{2},    Rational{3, 2}, Rational{1},
                                     Rational{1, 2}, Rational{1, 3}, Rational{1, 4}};
  const std::vector<Rational> bs = {Rational{1, 2}, Rational{1}, Rational{2}};
  ConsistencyReport rep;

  auto run = [&](std::string name, auto&& compare) {
    IdentityCheck c{std::move(name), 0, 0, {}};
    for (const auto& e : eps)
      for (const auto& b : bs)
        for (int K : {2, 3}) {
          ++c.points;
          auto [lhs, rhs] = compare(e, b, K);
          if (lhs != rhs) {
            if (c.mismatches++ == 0)
              c.first_mismatch = "eps=" + to_string(e) + " b=" + to_string(b) + " K=" + std::to_string(K) + ": " +
                                 lhs + " != " + rhs;
          }
        }
    rep.checks.push_back(std::move(c));
  };
  using Pair = std::pair<std::string, std::string>;

  run("brs(alpha=Kn) == brs-constant", [](const Rational& e, const Rational& b, int K) -> Pair {
    return {brs_bound(e, b, K, Alpha::linear(K)).value.get_str(), brs_constant(e, b, K).value.get_str()};
  });
  run("brs-dirne-orbit(alpha=Kn) == brs-dirne-constant", [](const Rational& e, const Rational& b, int K) -> Pair {
    return {brs_dirne_orbit(e, b, K, Alpha::linear(K)).value.get_str(), brs_dirne_constant(e, b, K).value.get_str()};
  });
  // K only varies theta here: theta(n) = 2K n
  run("cat0-general == groetsch-factored(cat0)", [](const Rational& e, const Rational& b, int K) -> Pair {
    auto theta = NatFn::linear(2 * K);
    return {cat0_general(e, b, theta).value.get_str(),
            groetsch_bound(e, b, cat0_modulus(), theta, true).value.get_str()};
  });
  // K only varies g: g(n) = K n
  run("ergodic-hilbert K == ergodic-factored K", [](const Rational& e, const Rational& b, int K) -> Pair {
    auto g = NatFn::linear(K);
    auto h = ergodic_bound(ErgodicVariant::Hilbert, e, b, hilbert_modulus(), g);
    auto f = ergodic_bound(ErgodicVariant::Factored, e, b, hilbert_modulus(), g);
    return {h.intermediate("K").value_or("?"), f.intermediate("K").value_or("?")};
  });
  return rep;
}

// ---- export ----

CsvRow make_row(const BoundValue& bound, const std::string& lambda_desc, std::uint64_t seed) {
  CsvRow row;
  row.formula_id = to_string(bound.formula);
  row.epsilon = input(bound, "eps").value_or("");
  row.b_or_dC = input(bound, "b").value_or(input(bound, "d_C").value_or(""));
  row.K = input(bound, "K").value_or("");
  row.L = input(bound, "L").value_or("");
  row.N0 = input(bound, "N0").value_or("");
  row.lambda_desc = lambda_desc;
  row.bound_decimal = bound.display();
  row.seed = std::to_string(seed);
  return row;
}

CsvRow make_row(const CertificationReport& report) {
  CsvRow row = make_row(report.bound, report.schedule, report.seed);
  row.epsilon = to_string(report.eps);
  row.witness = report.witness ? std::to_string(*report.witness) : "";
  row.verdict = to_string(report.verdict);
  return row;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json bound_json(const BoundValue& b) {
  json j;
  j["formula"] = to_string(b.formula);
  j["value"] = b.value.get_str();
  j["saturated"] = b.saturated;
  j["intermediates"] = json::object();
  for (const auto& [k, v] : b.intermediates) j["intermediates"][k] = v;
  j["notes"] = b.notes;
  return j;
}

std::vector<std::pair<std::string, std::string>> pairs(const json& obj) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : obj.items()) out.emplace_back(k, v.get<std::string>());
  return out;
}

BoundValue bound_from_json(const json& j, const json& inputs) {
  BoundValue b;
  b.formula = parse_formula(j.at("formula").get<std::string>());
  b.value = Nat{j.at("value").get<std::string>()};
  b.saturated = j.at("saturated").get<bool>();
  b.inputs = pairs(inputs);
  b.intermediates = pairs(j.at("intermediates"));
  b.notes = j.at("notes").get<std::vector<std::string>>();
  return b;
}

json inputs_json(const BoundValue& b) {
  json j = json::object();
  for (const auto& [k, v] : b.inputs) j[k] = v;
  return j;
}

}  // namespace

std::string to_csv(const std::vector<CsvRow>& rows) {
  std::ostringstream out;
  out << "formula_id,epsilon,b_or_dC,K,L,N0,lambda_desc,bound_decimal,witness,verdict,seed\n";
  for (const auto& r : rows) {
    const std::string* f[] = {&r.formula_id, &r.epsilon,       &r.b_or_dC, &r.K,       &r.L,   &r.N0,
                              &r.lambda_desc, &r.bound_decimal, &r.witness, &r.verdict, &r.seed};
    for (std::size_t i = 0; i < std::size(f); ++i) out << (i ? "," : "") << csv_field(*f[i]);
    out << '\n';
  }
  return out.str();
}

std::string to_json(const std::vector<CertificationReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) {
    CsvRow row = make_row(r);
    json j;
    j["formula_id"] = row.formula_id;
    j["epsilon"] = row.epsilon;
    j["b_or_dC"] = row.b_or_dC;
    j["K"] = row.K;
    j["L"] = row.L;
    j["N0"] = row.N0;
    j["lambda_desc"] = row.lambda_desc;
    j["bound_decimal"] = row.bound_decimal;
    j["witness"] = r.witness ? json(std::to_string(*r.witness)) : json(nullptr);
    j["verdict"] = row.verdict;
    j["seed"] = r.seed;
    j["inputs"] = inputs_json(r.bound);
    j["kind"] = to_string(r.kind);
    j["map"] = r.map;
    j["space"] = r.space;
    j["scheme"] = r.scheme;
    j["x0"] = r.x0;
    j["g"] = r.g ? json(*r.g) : json(nullptr);
    j["cap"] = r.cap;
    j["bound"] = bound_json(r.bound);
    if (r.comparison) {
      j["comparison"] = bound_json(*r.comparison);
      j["comparison"]["inputs"] = inputs_json(*r.comparison);
    } else {
      j["comparison"] = nullptr;
    }
    j["trace"] = {{"steps", r.trace.steps},
                  {"first", r.trace.first},
                  {"last", r.trace.last},
                  {"min", r.trace.min},
                  {"monotone", r.trace.monotone}};
    j["hypotheses"] = json::array();
    for (const auto& h : r.hypotheses)
      j["hypotheses"].push_back({{"name", h.name}, {"status", to_string(h.status)}, {"detail", h.detail}});
    j["notes"] = r.notes;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<CertificationReport> reports_from_json(const std::string& text) {
  std::vector<CertificationReport> out;
  try {
    json arr = json::parse(text);
    for (const auto& j : arr) {
      CertificationReport r;
      r.kind = parse_certification(j.at("kind").get<std::string>());
      r.map = j.at("map").get<std::string>();
      r.space = j.at("space").get<std::string>();
      r.scheme = j.at("scheme").get<std::string>();
      r.schedule = j.at("lambda_desc").get<std::string>();
      r.x0 = j.at("x0").get<std::string>();
      r.eps = parse_rational(j.at("epsilon").get<std::string>());
      if (!j.at("g").is_null()) r.g = j.at("g").get<std::string>();
      r.bound = bound_from_json(j.at("bound"), j.at("inputs"));
      if (!j.at("comparison").is_null())
        r.comparison = bound_from_json(j.at("comparison"), j.at("comparison").at("inputs"));
      if (!j.at("witness").is_null()) r.witness = std::stoull(j.at("witness").get<std::string>());
      r.verdict = parse_verdict(j.at("verdict").get<std::string>());
      r.cap = j.at("cap").get<std::uint64_t>();
      const auto& t = j.at("trace");
      r.trace = {t.at("steps").get<std::uint64_t>(), t.at("first").get<double>(), t.at("last").get<double>(),
                 t.at("min").get<double>(), t.at("monotone").get<bool>()};
      for (const auto& h : j.at("hypotheses"))
        r.hypotheses.push_back({h.at("name").get<std::string>(),
                                parse_hypothesis_status(h.at("status").get<std::string>()),
                                h.at("detail").get<std::string>()});
      r.notes = j.at("notes").get<std::vector<std::string>>();
      r.seed = j.at("seed").get<std::uint64_t>();
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed report JSON: ") + e.what());
  }
  return out;
}

ExportFormat parse_export_format(const std::string& name) {
  if (name == "csv") return ExportFormat::Csv;
  if (name == "json") return ExportFormat::Json;
  throw ConfigError("unknown export format '" + name + "' (csv, json)");
}

void export_reports(const std::vector<CertificationReport>& reports, ExportFormat format, const std::string& path) {
  std::string text;
  if (format == ExportFormat::Csv) {
    std::vector<CsvRow> rows;
    for (const auto& r : reports) rows.push_back(make_row(r));
    text = to_csv(rows);
  } else {
    text = to_json(reports);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << text;
  if (!out) throw ConfigError("write failed for " + path);
}

}  // namespace fprates
