#pragma once

// Mappings, the iteration schemes built on them, and brute-force oracles.
//
// Index conventions: KM, Ishikawa, asymptotically nonexpansive KM and Picard
// start at x_0 = x and step n uses lambda at schedule.first_index + n.
// Halpern uses x_{n+1} = lambda x + (1 - lambda) T x_n with the same lambda
// index (so lambda_{n+1} for a schedule starting at 1) and anchor x = x_0. Cesaro means are numbered from 1 (x_1 = x).

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "fprates/geometry.hpp"
#include "fprates/numeric.hpp"
#include "fprates/schedules.hpp"

namespace fprates {

enum class MapClass { Nonexpansive, DirectionallyNonexpansive, AsymptoticallyNonexpansive, LinearNonexpansive };

std::string to_string(MapClass c);

/// d(T^n x, T^n y) <= (1 + k_n) d(x, y) with sum k_n <= K_sum.
struct AsneCertificate {
  std::string description;
  std::function<double(std::uint64_t)> k;
  Nat K_sum;
};

struct MapHandle {
  std::string name;
  SpacePtr space;
  std::function<Point(const Point&)> apply;
  MapClass cls = MapClass::Nonexpansive;
  std::optional<AsneCertificate> asne;
  std::optional<Point> fixed_point;  // a known fixed point, when one is available

  Point operator()(const Point& p) const { return apply(p); }
  /// T^n p by repeated application.
  Point power(const Point& p, std::uint64_t n) const;
};

MapHandle identity_map(SpacePtr space);
/// Rotation of the closed Euclidean unit disk. Cosine and sine within 1e-15 of
/// 0 or +-1 are snapped, so quarter and half turns are exact.
MapHandle rotation_map(double angle);
/// Rotation of the Poincare disk about 0 (an isometry).
MapHandle disk_rotation_map(double angle);
/// x -> 1 - x on [0, 1].
MapHandle reflection_map();
/// x -> x + t on the real line; no fixed point, minimal displacement |t|.
MapHandle translation_map(double t);
MapHandle constant_map(SpacePtr space, Point c);
/// Orthogonal projection onto the first axis of the Euclidean unit disk.
MapHandle projection_map();
/// ([0,1]^2, max norm): T(x,y) = (1,y) if y > 0, (0,y) if y = 0.
/// Directionally nonexpansive but not continuous.
MapHandle kirk_map();
/// x -> (1 - t) anchor + t x; nonexpansive in any W-hyperbolic space, fixed point anchor.
MapHandle contraction_map(SpacePtr space, Point anchor, double t);
/// Tags a nonexpansive map as asymptotically nonexpansive with k_n = K / 2^(n+1)
/// (k_n = 0 when K = 0). Sound because Lip(T^n) <= 1 <= 1 + k_n.
MapHandle as_asne(MapHandle map, const Nat& K);

enum class Scheme { Picard, KM, Halpern, Ishikawa, AsneKM, Cesaro };

std::string to_string(Scheme s);
Scheme parse_scheme(const std::string& name);
/// Schemes whose residual d(x_n, T x_n) is provably nonincreasing for
/// nonexpansive maps (Picard, KM and Ishikawa with s = 0).
bool has_monotone_residuals(Scheme scheme, const StepSchedule& schedule, const MapHandle& map);

/// One step at a time; nothing is stored beyond the current state.
class Stepper {
 public:
  Stepper(MapHandle map, Scheme scheme, StepSchedule schedule, Point x0);

  std::uint64_t index() const { return n_; }
  const Point& point() const { return x_; }
  /// y_n for Ishikawa (the point T is applied to), otherwise absent.
  const std::optional<Point>& inner() const { return y_; }
  /// d(x_n, T x_n).
  double residual() const { return residual_; }
  void advance();

 private:
  MapHandle map_;
  Scheme scheme_;
  StepSchedule schedule_;
  Point anchor_;
  Point x_;
  Point tx_;
  std::optional<Point> y_;
  double residual_ = 0.0;
  std::uint64_t n_ = 0;

  void refresh();
};

struct IterationTrace {
  Scheme scheme = Scheme::KM;
  std::vector<Point> points;                 // x_0 .. x_n
  std::vector<Point> inner;                  // y_0 .. y_{n-1} (Ishikawa)
  std::vector<double> residuals;             // d(x_k, T x_k)
};

IterationTrace iterate(const MapHandle& map, Scheme scheme, const StepSchedule& schedule, const Point& x0,
                       std::uint64_t n);
IterationTrace iterate_km(const MapHandle& map, const StepSchedule& schedule, const Point& x0, std::uint64_t n);
IterationTrace iterate_halpern(const MapHandle& map, const StepSchedule& schedule, const Point& x0, std::uint64_t n);
IterationTrace iterate_ishikawa(const MapHandle& map, const StepSchedule& schedule, const Point& x0,
                                std::uint64_t n);
/// DomainError unless the map carries an asymptotically nonexpansive certificate.
IterationTrace iterate_asne_km(const MapHandle& map, const StepSchedule& schedule, const Point& x0,
                               std::uint64_t n);
IterationTrace iterate_picard(const MapHandle& map, const Point& x0, std::uint64_t n);

/// Means x_1 .. x_n (element k holds x_{k+1}), x_{n+1} = (n x_n + T^n x)/(n+1).
/// DomainError unless the map is linear.
std::vector<Point> cesaro_means(const MapHandle& map, const Point& x0, std::uint64_t n);

/// Lazily evaluated, memoized residual sequence.
class ResidualSequence {
 public:
  using Next = std::function<std::optional<double>()>;

  explicit ResidualSequence(Next next) : next_(std::move(next)) {}
  static ResidualSequence of(std::vector<double> values);
  static ResidualSequence of(MapHandle map, Scheme scheme, StepSchedule schedule, Point x0);

  /// Residual at index n, or absent if the sequence ends before n.
  std::optional<double> at(std::uint64_t n);
  const std::vector<double>& seen() const { return seen_; }

 private:
  Next next_;
  std::vector<double> seen_;
  bool exhausted_ = false;
};

using WindowFn = std::function<std::uint64_t(std::uint64_t)>;

/// Least n <= cap with residual_n < eps.
std::optional<std::uint64_t> first_hit(ResidualSequence& seq, double eps, std::uint64_t cap);
/// Least N <= cap with residual_i < eps for all i in [N, N + g(N)]. Windows
/// reaching past cap + window_limit are not evaluated.
std::optional<std::uint64_t> metastability_witness(ResidualSequence& seq, double eps, const WindowFn& g,
                                                   std::uint64_t cap, std::uint64_t window_limit = 1'000'000);
/// For a sequence whose element k has index first_index + k: least N <= cap
/// with dist(x_i, x_j) < eps for all i, j in [N, N + g(N)]; windows must fit
/// inside the sequence.
std::optional<std::uint64_t> cauchy_window_witness(const Space& space, const std::vector<Point>& points,
                                                   std::uint64_t first_index, double eps, const WindowFn& g,
                                                   std::uint64_t cap);

struct LipschitzReport {
  std::size_t samples = 0;
  double worst_excess = -std::numeric_limits<double>::infinity();  // max of lhs - rhs
  std::optional<std::pair<Point, Point>> witness;                  // worst pair beyond tol
  bool sums_ok = true;  // asne only: partial sums of k_n stay below K_sum

  bool passes(double tol) const { return worst_excess <= tol && sums_ok; }
};

LipschitzReport check_nonexpansive(const MapHandle& map, const Sampler& sampler, std::size_t n, double tol,
                                   std::uint64_t seed);
LipschitzReport check_nonexpansive(const MapHandle& map, const Point& x, const Point& y, double tol);
/// Samples y on the segment [x, Tx] only.
LipschitzReport check_dirne(const MapHandle& map, const Sampler& sampler, std::size_t n, double tol,
                            std::uint64_t seed);
LipschitzReport check_asne(const MapHandle& map, std::uint64_t horizon, const Sampler& sampler, std::size_t n,
                           double tol, std::uint64_t seed);

}  // namespace fprates
