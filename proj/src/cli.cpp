#include "fprates/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "fprates/errors.hpp"

namespace fprates {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  if (s.back() == sep) out.emplace_back();
  return out;
}

bool starts_with(const std::string& s, const std::string& prefix) { return s.rfind(prefix, 0) == 0; }

double number(const std::string& text, const std::string& what) {
  try {
    return to_double(parse_rational(text));
  } catch (const Error&) {
    throw ConfigError("bad " + what + " '" + text + "'");
  }
}

Rational rational(const std::string& text, const std::string& what) {
  try {
    return parse_rational(text);
  } catch (const Error&) {
    throw ConfigError("bad " + what + " '" + text + "'");
  }
}

std::size_t dimension(const std::string& text) {
  double d = number(text, "dimension");
  if (d < 1 || d > 64 || d != std::floor(d)) throw ConfigError("bad dimension '" + text + "'");
  return static_cast<std::size_t>(d);
}

}  // namespace

SpacePtr parse_space_preset(const std::string& spec) {
  if (spec == "real") return make_real_line();
  if (spec == "disk") return make_poincare_disk();
  if (starts_with(spec, "euclidean")) return make_euclidean(dimension(spec.substr(9)));
  if (starts_with(spec, "maxnorm")) return make_maxnorm(dimension(spec.substr(7)));
  if (starts_with(spec, "lp:")) {
    auto parts = split(spec.substr(3), ',');
    if (parts.size() != 2) throw ConfigError("lp preset is lp:<dim>,<p>");
    double p = number(parts[1], "p");
    if (!(p >= 2)) throw ConfigError("lp preset needs p >= 2");
    return make_lp(dimension(parts[0]), p);
  }
  if (starts_with(spec, "tree:")) {
    std::string file = spec.substr(5);
    try {
      return make_metric_tree(file == "demo" ? WeightedTree::demo() : WeightedTree::load(file));
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  if (starts_with(spec, "product:")) {
    auto plus = spec.find('+');
    if (plus == std::string::npos) throw ConfigError("product preset is product:<a>+<b>");
    return product_space(parse_space_preset(spec.substr(8, plus - 8)), parse_space_preset(spec.substr(plus + 1)));
  }
  throw ConfigError("unknown space preset '" + spec + "'");
}

double parse_angle(const std::string& text) {
  auto at = text.find("pi");
  if (at == std::string::npos) return number(text, "angle");
  std::string head = text.substr(0, at);
  std::string tail = text.substr(at + 2);
  double factor = 1.0;
  if (head == "-") factor = -1.0;
  else if (!head.empty()) {
    if (head.back() == '*') head.pop_back();
    factor = number(head, "angle");
  }
  double denom = 1.0;
  if (!tail.empty()) {
    if (tail[0] != '/') throw ConfigError("bad angle '" + text + "'");
    denom = number(tail.substr(1), "angle");
    if (denom == 0) throw ConfigError("bad angle '" + text + "'");
  }
  return factor * std::numbers::pi / denom;
}

MapHandle parse_map_preset(const std::string& spec) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto need_arg = [&] {
    if (arg.empty()) throw ConfigError("map preset " + name + " needs a parameter, e.g. " + name + ":1");
  };
  auto no_arg = [&] {
    if (!arg.empty()) throw ConfigError("map preset " + name + " takes no parameter");
  };
  if (name == "rotation") return need_arg(), rotation_map(parse_angle(arg));
  if (name == "disk-rotation") return need_arg(), disk_rotation_map(parse_angle(arg));
  if (name == "translation") return need_arg(), translation_map(number(arg, "translation"));
  if (name == "reflection") return no_arg(), reflection_map();
  if (name == "projection") return no_arg(), projection_map();
  if (name == "kirk") return no_arg(), kirk_map();
  if (name == "identity")
    return no_arg(), identity_map(make_euclidean(2, ConvexRegion::ball(Point::vec({0, 0}), 1.0)));
  if (name == "contraction") {
    need_arg();
    double t = number(arg, "contraction factor");
    if (!(t >= 0 && t <= 1)) throw ConfigError("contraction factor must lie in [0,1]");
    return contraction_map(make_euclidean(2, ConvexRegion::ball(Point::vec({0, 0}), 1.0)), Point::vec({0, 0}), t);
  }
  throw ConfigError("unknown map preset '" + spec + "'");
}

Point default_start(const MapHandle& map) {
  switch (map.space->kind()) {
    case SpaceKind::RealLine: return Point::real(0);
    case SpaceKind::PoincareDisk: return Point::disk({0.5, 0});
    case SpaceKind::MaxNorm: return Point::vec({0.5, 0.5});
    default: return Point::vec({1, 0});
  }
}

Point parse_point(const MapHandle& map, const std::string& text) {
  auto parts = split(text, ',');
  std::vector<double> c;
  for (const auto& p : parts) c.push_back(number(p, "coordinate"));
  Point pt = map.space->kind() == SpaceKind::PoincareDisk && c.size() == 2 ? Point::disk({c[0], c[1]}) : Point::vec(c);
  if (!map.space->contains(pt)) throw ConfigError("start point " + text + " is not in the domain of " + map.name);
  return pt;
}

CertifiedSchedule parse_schedule_preset(const std::string& lambda, const std::string& s) {
  CertifiedSchedule cs;
  if (lambda == "1/n") {
    cs = one_over_n_schedule();
  } else if (starts_with(lambda, "const:")) {
    Rational q = rational(lambda.substr(6), "lambda");
    if (q <= 0 || q >= 1) throw ConfigError("constant lambda must lie in (0,1)");
    cs = constant_schedule(q);
  } else {
    throw ConfigError("unknown schedule preset '" + lambda + "' (const:<q>, 1/n)");
  }
  if (s.empty() || s == "none") return cs;
  if (s == "zero") return with_s_zero(std::move(cs));
  if (starts_with(s, "geometric:")) {
    auto parts = split(s.substr(10), ',');
    if (parts.size() != 2) throw ConfigError("s preset is geometric:<s0>,<q>");
    Rational s0 = rational(parts[0], "s0"), q = rational(parts[1], "q");
    if (s0 < 0 || s0 >= 1 || q < 0 || q >= 1) throw ConfigError("geometric s needs s0, q in [0,1)");
    return with_s_geometric(std::move(cs), s0, q);
  }
  throw ConfigError("unknown s preset '" + s + "' (none, zero, geometric:<s0>,<q>)");
}

namespace {

// Raw option text; converted once the formula is known.
struct BoundArgs {
  std::string formula;
  std::string eps;
  std::string b, dc;
  std::string K, L, N0, k, M;
  std::string lambda = "0.5";
  std::string schedule;  // defaults per formula
  std::string s;
  std::string g = "zero";
  std::string modulus;
};

void add_bound_options(CLI::App& app, BoundArgs& a, bool eps_required) {
  app.add_option("--formula", a.formula, "Bound formula id")->required();
  auto* e = app.add_option("--eps", a.eps, "Error epsilon (rational or decimal)");
  if (eps_required) e->required();
  app.add_option("--b", a.b, "Orbit/anchor bound b");
  app.add_option("--dc", a.dc, "Diameter d_C of the region");
  app.add_option("--K", a.K, "K (step bound, or sum of k_n for asymptotically nonexpansive maps)");
  app.add_option("--L", a.L, "L");
  app.add_option("--N0", a.N0, "N0");
  app.add_option("--k", a.k, "k (Ishikawa h function)");
  app.add_option("--M", a.M, "M (Halpern)");
  app.add_option("--lambda", a.lambda, "Constant step size");
  app.add_option("--schedule", a.schedule, "Step schedule preset: const:<q> or 1/n");
  app.add_option("--s", a.s, "Ishikawa inner steps: none, zero, geometric:<s0>,<q>");
  app.add_option("--g", a.g, "Counterexample function preset");
  app.add_option("--modulus", a.modulus, "Modulus: cat0, hilbert, lp:<p>");
}

Nat natural(const std::string& text, const std::string& what) {
  Rational q = rational(text, what);
  if (q < 0 || q.get_den() != 1) throw ConfigError(what + " must be a natural number");
  return q.get_num();
}

bool is_halpern(Formula f) { return f == Formula::Halpern || f == Formula::HalpernOneOverN; }
bool is_ishikawa(Formula f) {
  return f == Formula::IshikawaH || f == Formula::IshikawaTheorem || f == Formula::IshikawaTheoremFactored ||
         f == Formula::IshikawaConstantLambda || f == Formula::IshikawaConstantLambdaFactored ||
         f == Formula::IshikawaCat0Constant;
}
bool is_asne(Formula f) {
  return f == Formula::AsneGeneral || f == Formula::AsneGeneralFactored || f == Formula::AsneAfp ||
         f == Formula::AsneCat0;
}
bool is_ergodic(Formula f) {
  return f == Formula::ErgodicGeneral || f == Formula::ErgodicFactored || f == Formula::ErgodicHilbert ||
         f == Formula::Agt;
}

struct Resolved {
  Formula formula;
  Rational eps;
  CertifiedSchedule schedule;
  BoundValue bound;
  CounterexampleFunction g;
  Nat asne_K;
};

// Evaluates the bound. `b_default` and `dc_default` fill in missing --b/--dc
// (the certify command derives them from the map).
Resolved resolve(const BoundArgs& a, const Rational& eps, const std::optional<Rational>& b_default,
                 const std::optional<Rational>& dc_default) {
  Resolved r{parse_formula(a.formula), eps, {}, {}, parse_counterexample(a.g), 0};
  const Formula f = r.formula;

  std::string sched = a.schedule;
  if (sched.empty()) sched = is_halpern(f) ? "1/n" : "const:" + a.lambda;
  std::string s = a.s;
  if (s.empty() && is_ishikawa(f)) s = "zero";
  r.schedule = parse_schedule_preset(sched, s);
  const Certificates& c = r.schedule.certs;

  std::optional<Rational> b, dc;
  if (!a.b.empty()) b = rational(a.b, "b");
  if (!a.dc.empty()) dc = rational(a.dc, "d_C");
  if (!b) b = dc ? dc : b_default;
  if (!dc) dc = a.b.empty() ? dc_default : b;
  if (!dc) dc = b;
  auto need_b = [&]() -> const Rational& {
    if (!b) throw ConfigError(a.formula + " needs --b (or --dc)");
    return *b;
  };
  auto need_dc = [&]() -> const Rational& {
    if (!dc) throw ConfigError(a.formula + " needs --dc (or --b)");
    return *dc;
  };

  Rational lambda = r.schedule.schedule.constant_lambda.value_or(rational(a.lambda, "lambda"));
  auto nat_or = [&](const std::string& text, const char* what, auto fallback) -> Nat {
    return text.empty() ? Nat{fallback()} : natural(text, what);
  };
  auto K = [&] { return nat_or(a.K, "K", [&] { return c.need_K(); }); };
  auto L = [&] { return nat_or(a.L, "L", [&] { return is_asne(f) ? Nat{2} : c.need_L(); }); };
  auto N0 = [&] { return nat_or(a.N0, "N0", [&] { return c.need_N0(); }); };

  auto uc = [&]() -> UcModulus {
    std::string m = a.modulus.empty() ? "cat0" : a.modulus;
    if (m == "cat0") return cat0_modulus();
    if (m == "hilbert") return as_uc_modulus(hilbert_modulus());
    if (starts_with(m, "lp:")) return as_uc_modulus(lp_modulus(number(m.substr(3), "p")));
    throw ConfigError("unknown modulus '" + m + "' (cat0, hilbert, lp:<p>)");
  };
  auto banach = [&]() -> BanachUcModulus {
    std::string m = a.modulus.empty() ? "hilbert" : a.modulus;
    if (m == "hilbert") return hilbert_modulus();
    if (starts_with(m, "lp:")) return lp_modulus(number(m.substr(3), "p"));
    throw ConfigError("unknown modulus '" + m + "' for a normed space (hilbert, lp:<p>)");
  };
  const EvalLimits limits;

  switch (f) {
    case Formula::Brs: r.bound = brs_bound(eps, need_b(), K(), c.need_alpha(), limits); break;
    case Formula::BrsConstant: r.bound = brs_constant(eps, need_dc(), K(), limits); break;
    case Formula::BrsOrbitBounded: r.bound = brs_orbit_bounded(eps, need_b(), K(), c.need_alpha(), limits); break;
    case Formula::BrsDirneOrbit: r.bound = brs_dirne_orbit(eps, need_b(), K(), c.need_alpha(), limits); break;
    case Formula::BrsDirneConstant: r.bound = brs_dirne_constant(eps, need_b(), K(), limits); break;
    case Formula::Groetsch:
    case Formula::GroetschFactored:
      r.bound = groetsch_bound(eps, need_b(), uc(), c.need_theta_prod(), f == Formula::GroetschFactored);
      break;
    case Formula::Cat0General: r.bound = cat0_general(eps, need_dc(), c.need_theta_prod()); break;
    case Formula::Cat0Constant: r.bound = cat0_constant(eps, need_dc(), lambda); break;
    case Formula::Halpern:
      r.bound = halpern_bound(eps, a.M.empty() ? Nat{1} : natural(a.M, "M"), c.need_alpha_conv(),
                              c.need_beta_cauchy(), c.need_theta_sum());
      break;
    case Formula::HalpernOneOverN: r.bound = halpern_one_over_n(eps, need_dc(), limits); break;
    case Formula::IshikawaH:
      r.bound = ishikawa_h(eps, a.k.empty() ? Nat{0} : natural(a.k, "k"), uc(), need_b(), c.need_theta_prod());
      break;
    case Formula::IshikawaTheorem:
    case Formula::IshikawaTheoremFactored:
      r.bound = ishikawa_theorem(eps, need_b(), uc(), c.need_theta_prod(), L(), N0(), c.need_gamma_cauchy(),
                                 f == Formula::IshikawaTheoremFactored);
      break;
    case Formula::IshikawaConstantLambda:
    case Formula::IshikawaConstantLambdaFactored:
      r.bound = ishikawa_constant_lambda(eps, need_dc(), uc(), lambda, L(), N0(), c.need_delta_cauchy(),
                                         f == Formula::IshikawaConstantLambdaFactored);
      break;
    case Formula::IshikawaCat0Constant:
      r.bound = ishikawa_cat0_constant(eps, need_dc(), lambda, L(), N0(), c.need_delta_cauchy());
      break;
    case Formula::AsneGeneral:
    case Formula::AsneGeneralFactored:
    case Formula::AsneAfp:
    case Formula::AsneCat0: {
      r.asne_K = a.K.empty() ? Nat{0} : natural(a.K, "K");
      if (f == Formula::AsneCat0) r.bound = asne_cat0(r.asne_K, L(), need_dc(), eps);
      else if (f == Formula::AsneAfp) r.bound = asne_afp(r.asne_K, L(), need_b(), uc(), eps, false);
      else r.bound = asne_general(r.asne_K, L(), need_b(), uc(), eps, r.g, f == Formula::AsneGeneralFactored, limits);
      break;
    }
    case Formula::GlbWitness:
    case Formula::GlbWindow: r.bound = glb_theta(need_b(), eps, r.g, f == Formula::GlbWindow, limits); break;
    case Formula::ErgodicGeneral: r.bound = ergodic_bound(ErgodicVariant::General, eps, need_b(), banach(), r.g, limits); break;
    case Formula::ErgodicFactored: r.bound = ergodic_bound(ErgodicVariant::Factored, eps, need_b(), banach(), r.g, limits); break;
    case Formula::ErgodicHilbert: r.bound = ergodic_bound(ErgodicVariant::Hilbert, eps, need_b(), banach(), r.g, limits); break;
    case Formula::Agt: r.bound = agt_bound(eps, need_b(), r.g, limits); break;
  }
  return r;
}

void print_bound(std::ostream& out, const BoundValue& b) {
  out << "formula " << to_string(b.formula) << '\n';
  for (const auto& [k, v] : b.inputs) out << "  input " << k << " = " << v << '\n';
  for (const auto& [k, v] : b.intermediates) out << "  " << k << " = " << v << '\n';
  for (const auto& n : b.notes) out << "  note: " << n << '\n';
  out << "bound " << b.display() << '\n';
}

void print_report(std::ostream& out, const CertificationReport& r) {
  out << "certification " << to_string(r.kind) << '\n';
  out << "map " << r.map << " on " << r.space << '\n';
  out << "scheme " << r.scheme << ", schedule " << r.schedule << ", x0 " << r.x0 << '\n';
  out << "eps " << to_string(r.eps);
  if (r.g) out << ", g " << *r.g;
  out << ", cap " << r.cap << ", seed " << r.seed << '\n';
  out << "bound " << to_string(r.bound.formula) << " = " << abbreviate(r.bound.display()) << '\n';
  if (r.comparison) out << "comparison " << to_string(r.comparison->formula) << " = " << abbreviate(r.comparison->display()) << '\n';
  out << "witness " << (r.witness ? std::to_string(*r.witness) : "none") << '\n';
  out << "trace steps " << r.trace.steps << ", first " << format_double(r.trace.first) << ", last "
      << format_double(r.trace.last) << ", min " << format_double(r.trace.min) << ", monotone "
      << (r.trace.monotone ? "yes" : "no") << '\n';
  for (const auto& h : r.hypotheses) out << "hypothesis " << h.name << ": " << to_string(h.status) << " (" << h.detail << ")\n";
  for (const auto& n : r.notes) out << "note: " << n << '\n';
  out << "verdict " << to_string(r.verdict) << '\n';
}

std::uint64_t resolve_seed(const std::string& flag) {
  std::string text = flag;
  if (text.empty())
    if (const char* env = std::getenv("FPRATES_SEED")) text = env;
  if (text.empty()) return 0;
  try {
    std::size_t used = 0;
    unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("bad seed '" + text + "'");
  }
}

ExportFormat output_format(const std::string& flag, const std::string& path) {
  if (!flag.empty()) return parse_export_format(flag);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return ExportFormat::Json;
  return ExportFormat::Csv;
}

// ---- commands ----

struct AxiomsArgs {
  std::string space = "euclidean2";
  std::size_t samples = 10000;
  std::string check = "all";
  double tol = 1e-9;
  std::string seed;
};

int cmd_axioms(const AxiomsArgs& a, std::ostream& out) {
  SpacePtr sp = parse_space_preset(a.space);
  const std::uint64_t seed = resolve_seed(a.seed);
  const std::string& c = a.check;
  if (c != "all" && c != "w" && c != "cn" && c != "delta" && c != "uc")
    throw ConfigError("unknown check '" + c + "' (all, w, cn, delta, uc)");
  auto want = [&](const char* name) { return c == "all" || c == name; };

  out << "space " << sp->name() << '\n' << "samples " << a.samples << ", seed " << seed << ", tol "
      << format_double(a.tol) << '\n';
  int status = 0;
  if (want("w")) {
    auto rep = check_w_axioms(*sp, a.samples, seed);
    const std::pair<const char*, double> rows[] = {
        {"W1", rep.w1}, {"W2", rep.w2}, {"W3", rep.w3}, {"W4", rep.w4}, {"convex-combination", rep.xylambda}};
    for (const auto& [name, v] : rows)
      out << name << " worst excess " << format_double(v) << (v <= a.tol ? " pass" : " FAIL") << '\n';
    if (!rep.passes(a.tol)) status = 3;
  }
  if (want("cn")) {
    auto v = check_cn(*sp, a.samples, a.tol, seed);
    if (!v) {
      out << "CN no violation\n";
    } else {
      out << "CN violation x=" << sp->format(v->x) << " y=" << sp->format(v->y) << " z=" << sp->format(v->z)
          << " lhs=" << format_double(v->value.lhs) << " rhs=" << format_double(v->value.rhs) << '\n';
    }
  }
  if (want("delta")) {
    out << "gromov delta estimate " << format_double(gromov_delta_estimate(*sp, a.samples, seed)) << '\n';
  }
  if (want("uc")) {
    const auto& mod = sp->capabilities().uc_modulus;
    if (!mod) {
      out << "UC no modulus for this space\n";
    } else {
      auto rep = check_uc(*sp, *mod, a.samples, a.tol, seed);
      out << "UC modulus " << mod->id() << " worst margin " << format_double(rep.worst_margin)
          << (rep.violation ? " FAIL" : " pass") << '\n';
      if (rep.violation) status = 3;
    }
  }
  return status;
}

int cmd_bounds(const BoundArgs& a, std::ostream& out) {
  auto r = resolve(a, rational(a.eps, "eps"), std::nullopt, std::nullopt);
  print_bound(out, r.bound);
  return 0;
}

struct CertifyArgs {
  BoundArgs bound;
  std::string scheme;
  std::string map = "rotation:pi/2";
  std::string x0;
  std::uint64_t cap = 1'000'000;
  std::string seed;
  std::size_t samples = 2000;
  std::string out;
  std::string format;
};

struct Prepared {
  MapHandle map;
  Point x0;
  std::optional<Rational> b_default, dc_default;
};

Prepared prepare(const CertifyArgs& a) {
  Prepared p{parse_map_preset(a.map), {}, {}, {}};
  p.x0 = a.x0.empty() ? default_start(p.map) : parse_point(p.map, a.x0);
  double diam = p.map.space->diameter();
  if (std::isfinite(diam)) p.dc_default = to_rational(diam);
  if (p.map.fixed_point) p.b_default = to_rational(p.map.space->dist(p.x0, *p.map.fixed_point));
  return p;
}

CertificationReport certify_one(const CertifyArgs& a, const Prepared& p, const Rational& eps) {
  CertifyOptions o;
  o.cap = a.cap;
  o.seed = resolve_seed(a.seed);
  o.samples = a.samples;
  auto r = resolve(a.bound, eps, p.b_default, p.dc_default);
  const Formula f = r.formula;
  if (is_ergodic(f)) return certify_ergodic(p.map, p.x0, eps, r.g, r.bound, o);
  if (is_asne(f)) {
    MapHandle m = p.map.asne ? p.map : as_asne(p.map, r.asne_K);
    return certify_metastability(m, r.schedule, p.x0, eps, r.g, r.bound, o);
  }
  Scheme scheme = Scheme::KM;
  if (!a.scheme.empty()) scheme = parse_scheme(a.scheme);
  else if (is_halpern(f)) scheme = Scheme::Halpern;
  else if (is_ishikawa(f)) scheme = Scheme::Ishikawa;
  return certify_asymptotic_regularity(p.map, scheme, r.schedule, p.x0, eps, r.bound, o);
}

int cmd_certify(const CertifyArgs& a, std::ostream& out) {
  auto p = prepare(a);
  auto r = certify_one(a, p, rational(a.bound.eps, "eps"));
  print_report(out, r);
  if (!a.out.empty()) export_reports({r}, output_format(a.format, a.out), a.out);
  return exit_code(r.verdict);
}

struct SweepArgs {
  CertifyArgs base;
  std::string grid;
  bool certify = false;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out) {
  std::vector<Rational> grid;
  for (const auto& t : split(a.grid, ',')) grid.push_back(rational(t, "eps"));
  std::stable_sort(grid.begin(), grid.end(), [](const Rational& x, const Rational& y) { return x > y; });
  const std::uint64_t seed = resolve_seed(a.base.seed);

  std::vector<CsvRow> rows;
  std::vector<CertificationReport> reports;
  std::optional<Prepared> p;
  if (a.certify) p = prepare(a.base);
  for (const auto& eps : grid) {
    if (p) {
      reports.push_back(certify_one(a.base, *p, eps));
      rows.push_back(make_row(reports.back()));
    } else {
      auto r = resolve(a.base.bound, eps, std::nullopt, std::nullopt);
      rows.push_back(make_row(r.bound, r.schedule.schedule.description, seed));
    }
  }
  std::string csv = to_csv(rows);
  if (a.base.out.empty()) {
    out << csv;
  } else if (p && output_format(a.base.format, a.base.out) == ExportFormat::Json) {
    export_reports(reports, ExportFormat::Json, a.base.out);
  } else {
    std::ofstream f(a.base.out, std::ios::binary);
    if (!(f << csv)) throw ConfigError("cannot write " + a.base.out);
  }
  return 0;
}

int cmd_consistency(std::ostream& out) {
  auto rep = consistency_suite();
  for (const auto& c : rep.checks) {
    out << c.name << ": " << c.points << " points, " << c.mismatches << " mismatches";
    if (c.mismatches) out << " (first: " << c.first_mismatch << ")";
    out << '\n';
  }
  return rep.ok() ? 0 : 3;
}

void add_run_options(CLI::App& app, CertifyArgs& a) {
  add_bound_options(app, a.bound, false);
  app.add_option("--scheme", a.scheme, "km, halpern or ishikawa (default follows the formula)");
  app.add_option("--map", a.map, "Map preset")->capture_default_str();
  app.add_option("--x0", a.x0, "Start point, e.g. 1,0");
  app.add_option("--cap", a.cap, "Witness search cap")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--seed", a.seed, "Seed (falls back to FPRATES_SEED, then 0)");
  app.add_option("--samples", a.samples, "Samples for hypothesis checks")->capture_default_str();
  app.add_option("--out", a.out, "Write the report to this file");
  app.add_option("--format", a.format, "csv or json (default from the file extension)");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Explicit rates for fixed point iterations: evaluate bounds and certify them on examples", "fprates"};
  app.require_subcommand(1);

  AxiomsArgs ax;
  auto* axioms = app.add_subcommand("axioms", "Check the geometric axioms of a space preset on random samples");
  axioms->add_option("--space", ax.space, "Space preset")->capture_default_str();
  axioms->add_option("--samples", ax.samples, "Number of samples")->capture_default_str();
  axioms->add_option("--check", ax.check, "all, w, cn, delta or uc")->capture_default_str();
  axioms->add_option("--tol", ax.tol, "Tolerance")->capture_default_str();
  axioms->add_option("--seed", ax.seed, "Seed (falls back to FPRATES_SEED, then 0)");

  BoundArgs bd;
  auto* bounds = app.add_subcommand("bounds", "Evaluate a bound formula exactly");
  add_bound_options(*bounds, bd, true);

  CertifyArgs ce;
  auto* certify = app.add_subcommand("certify", "Compare a bound with a simulated witness");
  add_run_options(*certify, ce);
  certify->get_option("--eps")->required();

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Evaluate (and optionally certify) a bound over an epsilon grid");
  add_run_options(*sweep, sw.base);
  sweep->add_option("--eps-grid", sw.grid, "Comma-separated epsilons")->required();
  sweep->add_flag("--certify", sw.certify, "Also run the certification for each epsilon");

  auto* consistency = app.add_subcommand("consistency", "Check exact identities between bound formulas");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*axioms) return cmd_axioms(ax, out);
    if (*bounds) return cmd_bounds(bd, out);
    if (*certify) return cmd_certify(ce, out);
    if (*sweep) return cmd_sweep(sw, out);
    if (*consistency) return cmd_consistency(out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace fprates
