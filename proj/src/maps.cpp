#include "fprates/maps.hpp"

#include <algorithm>
#include <cmath>

#include "fprates/errors.hpp"

namespace fprates {

namespace {

double snap(double v) {
  for (double target : {-1.0, 0.0, 1.0})
    if (std::fabs(v - target) < 1e-15) return target;
  return v;
}

SpacePtr unit_disk() { return make_euclidean(2, ConvexRegion::ball(Point::vec({0, 0}), 1.0)); }

void check_region(const Space& space, const Point& p, std::uint64_t index) {
  if (!space.contains(p))
    throw RegionError("iterate " + std::to_string(index) + " left the region: " + space.format(p));
}

}  // namespace

std::string to_string(MapClass c) {
  switch (c) {
    case MapClass::Nonexpansive: return "nonexpansive";
    case MapClass::DirectionallyNonexpansive: return "directionally-nonexpansive";
    case MapClass::AsymptoticallyNonexpansive: return "asymptotically-nonexpansive";
    case MapClass::LinearNonexpansive: return "linear-nonexpansive";
  }
  return "?";
}

Point MapHandle::power(const Point& p, std::uint64_t n) const {
  Point q = p;
  for (std::uint64_t k = 0; k < n; ++k) q = apply(q);
  return q;
}

MapHandle identity_map(SpacePtr space) {
  MapHandle m{"identity", std::move(space), [](const Point& p) { return p; }, MapClass::LinearNonexpansive, {}, {}};
  return m;
}

MapHandle rotation_map(double angle) {
  double c = snap(std::cos(angle)), s = snap(std::sin(angle));
  MapHandle m{"rotation:" + format_double(angle), unit_disk(),
              [c, s](const Point& p) {
                const auto& v = p.coords();
                return Point::vec({c * v[0] - s * v[1], s * v[0] + c * v[1]});
              },
              MapClass::LinearNonexpansive, {}, Point::vec({0, 0})};
  return m;
}

MapHandle disk_rotation_map(double angle) {
  std::complex<double> w{snap(std::cos(angle)), snap(std::sin(angle))};
  MapHandle m{"disk-rotation:" + format_double(angle), make_poincare_disk(),
              [w](const Point& p) { return Point::disk(w * p.complex()); }, MapClass::Nonexpansive, {},
              Point::disk(0)};
  return m;
}

MapHandle reflection_map() {
  MapHandle m{"reflection", make_real_line(ConvexRegion::box({0}, {1})),
              [](const Point& p) { return Point::real(1.0 - p.coords()[0]); }, MapClass::Nonexpansive, {},
              Point::real(0.5)};
  return m;
}

MapHandle translation_map(double t) {
  MapHandle m{"translation:" + format_double(t), make_real_line(),
              [t](const Point& p) { return Point::real(p.coords()[0] + t); }, MapClass::Nonexpansive, {}, {}};
  return m;
}

MapHandle constant_map(SpacePtr space, Point c) {
  space->validate(c);
  std::string name = "constant:" + space->format(c);
  MapHandle m{name, std::move(space), [c](const Point&) { return c; }, MapClass::Nonexpansive, {}, c};
  return m;
}

MapHandle projection_map() {
  MapHandle m{"projection", unit_disk(), [](const Point& p) { return Point::vec({p.coords()[0], 0.0}); },
              MapClass::LinearNonexpansive, {}, Point::vec({0, 0})};
  return m;
}

MapHandle kirk_map() {
  MapHandle m{"kirk", make_maxnorm(2, ConvexRegion::box({0, 0}, {1, 1})),
              [](const Point& p) {
                double y = p.coords()[1];
                return Point::vec({y > 0 ? 1.0 : 0.0, y});
              },
              MapClass::DirectionallyNonexpansive, {}, Point::vec({0, 0})};
  return m;
}

MapHandle contraction_map(SpacePtr space, Point anchor, double t) {
  if (!(t >= 0 && t <= 1)) throw DomainError("contraction factor must lie in [0,1]");
  space->validate(anchor);
  std::string name = "contraction:" + format_double(t);
  auto s = space;
  MapHandle m{name, std::move(space), [s, anchor, t](const Point& p) { return s->combine(anchor, p, t); },
              MapClass::Nonexpansive, {}, anchor};
  return m;
}

MapHandle as_asne(MapHandle map, const Nat& K) {
  if (K < 0) throw DomainError("K must be nonnegative");
  double k = to_double(Rational{K});
  map.asne = AsneCertificate{"K/2^(n+1) with K = " + K.get_str(),
                             [k](std::uint64_t n) { return n >= 1100 ? 0.0 : std::ldexp(k, -int(n) - 1); }, K};
  map.cls = MapClass::AsymptoticallyNonexpansive;
  return map;
}

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::Picard: return "picard";
    case Scheme::KM: return "km";
    case Scheme::Halpern: return "halpern";
    case Scheme::Ishikawa: return "ishikawa";
    case Scheme::AsneKM: return "asne-km";
    case Scheme::Cesaro: return "cesaro";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  for (Scheme s : {Scheme::Picard, Scheme::KM, Scheme::Halpern, Scheme::Ishikawa, Scheme::AsneKM, Scheme::Cesaro})
    if (to_string(s) == name) return s;
  throw ConfigError("unknown scheme: " + name);
}

bool has_monotone_residuals(Scheme scheme, const StepSchedule& schedule, const MapHandle& map) {
  if (map.cls == MapClass::AsymptoticallyNonexpansive) return false;
  switch (scheme) {
    case Scheme::Picard:
    case Scheme::KM: return true;
    case Scheme::Ishikawa: return !schedule.s.has_value();
    default: return false;
  }
}

Stepper::Stepper(MapHandle map, Scheme scheme, StepSchedule schedule, Point x0)
    : map_(std::move(map)), scheme_(scheme), schedule_(std::move(schedule)), anchor_(x0), x_(x0), tx_(x0) {
  map_.space->validate(x0);
  if (!map_.space->contains(x0)) throw DomainError("starting point outside the region: " + map_.space->format(x0));
  if (scheme_ == Scheme::AsneKM && !map_.asne)
    throw DomainError("map " + map_.name + " has no asymptotic nonexpansiveness certificate");
  if (scheme_ == Scheme::Cesaro) {
    if (map_.cls != MapClass::LinearNonexpansive) throw DomainError("Cesaro means need a linear map");
    n_ = 1;
  }
  refresh();
}

void Stepper::refresh() {
  tx_ = map_.apply(x_);
  residual_ = map_.space->dist(x_, tx_);
  y_.reset();
}

void Stepper::advance() {
  const Space& sp = *map_.space;
  std::uint64_t idx = schedule_.first_index + n_;
  switch (scheme_) {
    case Scheme::Picard: x_ = tx_; break;
    case Scheme::KM: x_ = sp.combine(x_, tx_, schedule_.lambda(idx)); break;
    case Scheme::Halpern: x_ = sp.combine(anchor_, tx_, 1.0 - schedule_.lambda(idx)); break;
    case Scheme::Ishikawa: {
      double s = schedule_.s ? (*schedule_.s)(idx) : 0.0;
      Point y = sp.combine(x_, tx_, s);
      x_ = sp.combine(x_, map_.apply(y), schedule_.lambda(idx));
      ++n_;
      check_region(sp, x_, n_);
      refresh();
      y_ = std::move(y);
      return;
    }
    case Scheme::AsneKM: x_ = sp.combine(x_, map_.power(x_, n_), schedule_.lambda(idx)); break;
    case Scheme::Cesaro: {
      // anchor_ tracks T^n x; x_ is the mean of x, ..., T^(n-1) x
      anchor_ = map_.apply(anchor_);
      x_ = sp.combine(x_, anchor_, 1.0 / double(n_ + 1));
      break;
    }
  }
  ++n_;
  check_region(sp, x_, n_);
  refresh();
}

IterationTrace iterate(const MapHandle& map, Scheme scheme, const StepSchedule& schedule, const Point& x0,
                       std::uint64_t n) {
  Stepper st(map, scheme, schedule, x0);
  IterationTrace tr;
  tr.scheme = scheme;
  tr.points.reserve(n + 1);
  tr.residuals.reserve(n + 1);
  tr.points.push_back(st.point());
  tr.residuals.push_back(st.residual());
  for (std::uint64_t k = 0; k < n; ++k) {
    st.advance();
    if (st.inner()) tr.inner.push_back(*st.inner());
    tr.points.push_back(st.point());
    tr.residuals.push_back(st.residual());
  }
  return tr;
}

IterationTrace iterate_km(const MapHandle& map, const StepSchedule& schedule, const Point& x0, std::uint64_t n) {
  return iterate(map, Scheme::KM, schedule, x0, n);
}

IterationTrace iterate_halpern(const MapHandle& map, const StepSchedule& schedule, const Point& x0,
                               std::uint64_t n) {
  return iterate(map, Scheme::Halpern, schedule, x0, n);
}

IterationTrace iterate_ishikawa(const MapHandle& map, const StepSchedule& schedule, const Point& x0,
                                std::uint64_t n) {
  return iterate(map, Scheme::Ishikawa, schedule, x0, n);
}

IterationTrace iterate_asne_km(const MapHandle& map, const StepSchedule& schedule, const Point& x0,
                               std::uint64_t n) {
  return iterate(map, Scheme::AsneKM, schedule, x0, n);
}

IterationTrace iterate_picard(const MapHandle& map, const Point& x0, std::uint64_t n) {
  StepSchedule unused{"picard", [](std::uint64_t) { return 1.0; }, {}, 0, {}};
  return iterate(map, Scheme::Picard, unused, x0, n);
}

std::vector<Point> cesaro_means(const MapHandle& map, const Point& x0, std::uint64_t n) {
  if (n == 0) return {};
  StepSchedule unused{"cesaro", [](std::uint64_t) { return 0.0; }, {}, 0, {}};
  return iterate(map, Scheme::Cesaro, unused, x0, n - 1).points;
}

ResidualSequence ResidualSequence::of(std::vector<double> values) {
  auto pos = std::make_shared<std::size_t>(0);
  auto vals = std::make_shared<std::vector<double>>(std::move(values));
  return ResidualSequence([pos, vals]() -> std::optional<double> {
    if (*pos >= vals->size()) return std::nullopt;
    return (*vals)[(*pos)++];
  });
}

ResidualSequence ResidualSequence::of(MapHandle map, Scheme scheme, StepSchedule schedule, Point x0) {
  auto st = std::make_shared<Stepper>(std::move(map), scheme, std::move(schedule), std::move(x0));
  auto started = std::make_shared<bool>(false);
  return ResidualSequence([st, started]() -> std::optional<double> {
    if (*started) st->advance();
    *started = true;
    return st->residual();
  });
}

std::optional<double> ResidualSequence::at(std::uint64_t n) {
  while (!exhausted_ && seen_.size() <= n) {
    auto v = next_();
    if (!v) {
      exhausted_ = true;
      break;
    }
    seen_.push_back(*v);
  }
  if (n < seen_.size()) return seen_[n];
  return std::nullopt;
}

std::optional<std::uint64_t> first_hit(ResidualSequence& seq, double eps, std::uint64_t cap) {
  for (std::uint64_t n = 0; n <= cap; ++n) {
    auto r = seq.at(n);
    if (!r) return std::nullopt;
    if (*r < eps) return n;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> metastability_witness(ResidualSequence& seq, double eps, const WindowFn& g,
                                                   std::uint64_t cap, std::uint64_t window_limit) {
  std::uint64_t limit = cap + window_limit;
  std::uint64_t n = 0;
  while (n <= cap) {
    auto r = seq.at(n);
    if (!r) return std::nullopt;
    if (*r >= eps) {
      ++n;
      continue;
    }
    std::uint64_t w = g(n);
    if (w > limit - n) {
      ++n;
      continue;
    }
    std::optional<std::uint64_t> bad;
    for (std::uint64_t i = n + 1; i <= n + w; ++i) {
      auto ri = seq.at(i);
      if (!ri) return std::nullopt;
      if (*ri >= eps) {
        bad = i;
        break;
      }
    }
    if (!bad) return n;
    ++n;
  }
  return std::nullopt;
}

std::optional<std::uint64_t> cauchy_window_witness(const Space& space, const std::vector<Point>& points,
                                                   std::uint64_t first_index, double eps, const WindowFn& g,
                                                   std::uint64_t cap) {
  std::uint64_t last = first_index + points.size();  // one past the last index
  for (std::uint64_t n = first_index; n <= cap && n < last; ++n) {
    std::uint64_t w = g(n);
    if (w >= last - n) return std::nullopt;
    bool ok = true;
    for (std::uint64_t i = n; i <= n + w && ok; ++i)
      for (std::uint64_t j = i + 1; j <= n + w; ++j)
        if (space.dist(points[i - first_index], points[j - first_index]) >= eps) {
          ok = false;
          break;
        }
    if (ok) return n;
  }
  return std::nullopt;
}

namespace {

void record(LipschitzReport& rep, double excess, const Point& x, const Point& y, double tol) {
  ++rep.samples;
  if (excess > rep.worst_excess) {
    rep.worst_excess = excess;
    if (excess > tol) rep.witness = std::make_pair(x, y);
  }
}

}  // namespace

LipschitzReport check_nonexpansive(const MapHandle& map, const Point& x, const Point& y, double tol) {
  LipschitzReport rep;
  const Space& sp = *map.space;
  record(rep, sp.dist(map(x), map(y)) - sp.dist(x, y), x, y, tol);
  return rep;
}

LipschitzReport check_nonexpansive(const MapHandle& map, const Sampler& sampler, std::size_t n, double tol,
                                   std::uint64_t seed) {
  LipschitzReport rep;
  Rng rng(seed);
  const Space& sp = *map.space;
  for (std::size_t i = 0; i < n; ++i) {
    Point x = sampler(rng), y = sampler(rng);
    record(rep, sp.dist(map(x), map(y)) - sp.dist(x, y), x, y, tol);
  }
  return rep;
}

LipschitzReport check_dirne(const MapHandle& map, const Sampler& sampler, std::size_t n, double tol,
                            std::uint64_t seed) {
  LipschitzReport rep;
  Rng rng(seed);
  const Space& sp = *map.space;
  for (std::size_t i = 0; i < n; ++i) {
    Point x = sampler(rng);
    Point tx = map(x);
    double t = rng.index(8) == 0 ? 1.0 : rng.uniform();
    Point y = sp.combine(x, tx, t);
    record(rep, sp.dist(tx, map(y)) - sp.dist(x, y), x, y, tol);
  }
  return rep;
}

LipschitzReport check_asne(const MapHandle& map, std::uint64_t horizon, const Sampler& sampler, std::size_t n,
                           double tol, std::uint64_t seed) {
  if (!map.asne) throw DomainError("map " + map.name + " has no asymptotic nonexpansiveness certificate");
  LipschitzReport rep;
  const auto& cert = *map.asne;
  double bound = to_double(Rational{cert.K_sum});
  double sum = 0.0;
  for (std::uint64_t k = 0; k <= horizon; ++k) {
    double kk = cert.k(k);
    if (kk < 0) rep.sums_ok = false;
    sum += kk;
    if (sum > bound * (1 + 1e-12) + 1e-300) rep.sums_ok = false;
  }
  Rng rng(seed);
  const Space& sp = *map.space;
  for (std::size_t i = 0; i < n; ++i) {
    Point x = sampler(rng), y = sampler(rng);
    double d = sp.dist(x, y);
    Point px = x, py = y;
    for (std::uint64_t k = 0; k <= horizon; ++k) {
      if (k > 0) {
        px = map(px);
        py = map(py);
      }
      record(rep, sp.dist(px, py) - (1 + cert.k(k)) * d, x, y, tol);
    }
  }
  return rep;
}

}  // namespace fprates
