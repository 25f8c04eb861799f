#pragma once

// Concrete W-hyperbolic spaces and sampled checkers for their axioms.
//
// combine(x, y, t) is the convexity mapping W(x, y, t), written (1-t)x + t y:
// it lies on the geodesic from x (t = 0) to y (t = 1) at distance t d(x, y)
// from x.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "fprates/moduli.hpp"

namespace fprates {

/// Deterministic generator; the uniform draw is computed from raw 64-bit
/// output so sample streams do not depend on the standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

/// A point on the tree edge (parent(edge), edge), `offset` away from the parent end.
struct TreeLocus {
  std::size_t edge = 0;
  double offset = 0.0;
};

struct Point;

struct ProductPoint {
  std::vector<Point> parts;  // exactly two
};

struct Point {
  std::variant<std::vector<double>, std::complex<double>, TreeLocus, ProductPoint> value;

  static Point vec(std::vector<double> coords) { return Point{std::move(coords)}; }
  static Point real(double x) { return Point{std::vector<double>{x}}; }
  static Point disk(std::complex<double> z) { return Point{z}; }
  static Point tree(std::size_t edge, double offset) { return Point{TreeLocus{edge, offset}}; }
  static Point pair(Point first, Point second);

  const std::vector<double>& coords() const;
  std::complex<double> complex() const;
  const TreeLocus& locus() const;
  const ProductPoint& product() const;
};

enum class SpaceKind { RealLine, Euclidean, Lp, MaxNorm, PoincareDisk, MetricTree, Product };

std::string to_string(SpaceKind kind);

struct Capabilities {
  bool w_hyperbolic = true;
  bool cat0 = false;
  std::optional<UcModulus> uc_modulus;
  bool r_tree = false;
};

struct ConvexRegion {
  enum class Shape { Whole, Box, Ball };

  Shape shape = Shape::Whole;
  std::vector<double> lo, hi;  // Box
  std::optional<Point> center;  // Ball
  double radius = 0.0;          // Ball

  static ConvexRegion whole() { return {}; }
  static ConvexRegion box(std::vector<double> lo, std::vector<double> hi);
  static ConvexRegion ball(Point center, double radius);
};

/// Finite tree with positive edge weights. Node 0..n-1; labels are the ids
/// used in the edge-list file.
class WeightedTree {
 public:
  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

  /// Lines `parent child weight`; '#' starts a comment. DomainError on malformed input.
  static WeightedTree parse(std::istream& in);
  static WeightedTree load(const std::string& path);
  /// A seven-node tree with mixed weights, used by CLI presets and tests.
  static WeightedTree demo();

  std::size_t size() const { return parent_.size(); }
  std::size_t root() const { return root_; }
  std::size_t parent(std::size_t v) const { return parent_[v]; }
  double weight(std::size_t v) const { return weight_[v]; }
  double depth(std::size_t v) const { return depth_[v]; }
  long label(std::size_t v) const { return label_[v]; }
  std::size_t node(long label) const;
  std::size_t lca(std::size_t u, std::size_t v) const;
  bool is_ancestor(std::size_t a, std::size_t v) const;
  /// Non-root nodes, i.e. edge ids.
  const std::vector<std::size_t>& edges() const { return edges_; }
  double total_length() const;

 private:
  std::vector<std::size_t> parent_;
  std::vector<double> weight_;
  std::vector<double> depth_;
  std::vector<std::size_t> level_;
  std::vector<long> label_;
  std::vector<std::size_t> edges_;
  std::size_t root_ = 0;

  void finalize();
};

class Space {
 public:
  virtual ~Space() = default;

  SpaceKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Capabilities& capabilities() const { return caps_; }
  const ConvexRegion& region() const { return region_; }

  /// DomainError if `p` is not a valid encoding for this space.
  virtual void validate(const Point& p) const = 0;
  virtual double dist(const Point& x, const Point& y) const = 0;
  virtual Point combine(const Point& x, const Point& y, double t) const = 0;
  /// Deterministic draw from the region, or from a bounded default window
  /// when the region is the whole space.
  virtual Point sample(Rng& rng) const = 0;
  virtual std::string format(const Point& p) const = 0;

  /// Upper bound on the region diameter (infinite for the whole space).
  virtual double diameter() const;
  virtual bool contains(const Point& p, double tol = 1e-9) const;

 protected:
  Space(SpaceKind kind, std::string name, Capabilities caps, ConvexRegion region);
  void check_lambda(double t) const;

  SpaceKind kind_;
  std::string name_;
  Capabilities caps_;
  ConvexRegion region_;
};

using SpacePtr = std::shared_ptr<const Space>;

SpacePtr make_real_line(ConvexRegion region = ConvexRegion::whole());
SpacePtr make_euclidean(std::size_t dim, ConvexRegion region = ConvexRegion::whole());
/// p in [2, inf]; p = inf behaves as the max norm.
SpacePtr make_lp(std::size_t dim, double p, ConvexRegion region = ConvexRegion::whole());
SpacePtr make_maxnorm(std::size_t dim, ConvexRegion region = ConvexRegion::whole());
/// Points are clamped to |z| <= 1 - 1e-12.
SpacePtr make_poincare_disk(ConvexRegion region = ConvexRegion::whole());
SpacePtr make_metric_tree(WeightedTree tree);
/// d((x,u),(y,v)) = max(d1(x,y), d2(u,v)), combine componentwise.
SpacePtr product_space(SpacePtr first, SpacePtr second);

inline constexpr double kDiskClamp = 1.0 - 1e-12;

// ---- checkers ----

using Sampler = std::function<Point(Rng&)>;
Sampler default_sampler(const Space& space);

/// Maximum signed violation per axiom; <= 0 means the axiom held on every sample.
struct AxiomReport {
  std::size_t samples = 0;
  double w1 = -std::numeric_limits<double>::infinity();
  double w2 = -std::numeric_limits<double>::infinity();
  double w3 = -std::numeric_limits<double>::infinity();
  double w4 = -std::numeric_limits<double>::infinity();
  double xylambda = -std::numeric_limits<double>::infinity();

  double worst() const;
  bool passes(double tol) const { return worst() <= tol; }
};

AxiomReport check_w_axioms(const Space& space, const Sampler& sampler, std::size_t n, std::uint64_t seed);
AxiomReport check_w_axioms(const Space& space, std::size_t n, std::uint64_t seed);

struct CnEvaluation {
  double lhs = 0.0;  // d(z, mid)^2
  double rhs = 0.0;  // d(z,x)^2/2 + d(z,y)^2/2 - d(x,y)^2/4
};

struct CnViolation {
  Point x, y, z;
  CnEvaluation value;
};

CnEvaluation evaluate_cn(const Space& space, const Point& x, const Point& y, const Point& z);
std::optional<CnViolation> check_cn(const Space& space, const Sampler& sampler, std::size_t n, double tol,
                                    std::uint64_t seed);
std::optional<CnViolation> check_cn(const Space& space, std::size_t n, double tol, std::uint64_t seed);
/// Checks one explicit triple.
std::optional<CnViolation> check_cn(const Space& space, const Point& x, const Point& y, const Point& z, double tol);

/// Smallest delta for which the four-point condition holds on this quadruple
/// (all three pairings), clipped at 0.
double four_point_defect(const Space& space, const Point& x, const Point& y, const Point& z, const Point& w);
double gromov_delta_estimate(const Space& space, const Sampler& sampler, std::size_t n, std::uint64_t seed);
double gromov_delta_estimate(const Space& space, std::size_t n, std::uint64_t seed);

struct UcConfiguration {
  Point a, x, y;
  double r = 0.0;
  double eps = 0.0;
  double lhs = 0.0;  // d(mid, a)
  double rhs = 0.0;  // (1 - eta(r, eps)) r
};

struct UcReport {
  std::size_t samples = 0;
  /// Smallest rhs - lhs seen; negative beyond tol means a violation.
  double worst_margin = std::numeric_limits<double>::infinity();
  std::optional<UcConfiguration> violation;
};

/// Evaluates the uniform convexity implication on one configuration. The
/// hypotheses d(x,a) <= r, d(y,a) <= r, d(x,y) >= eps r are checked with tolerance.
UcConfiguration evaluate_uc(const Space& space, const UcModulus& modulus, const Point& a, const Point& x,
                            const Point& y, double r, double eps);
UcReport check_uc(const Space& space, const UcModulus& modulus, std::size_t n, double tol, std::uint64_t seed);

}  // namespace fprates
