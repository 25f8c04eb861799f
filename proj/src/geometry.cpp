#include "fprates/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "fprates/errors.hpp"

namespace fprates {

// ---- Point ----

Point Point::pair(Point first, Point second) {
  ProductPoint pp;
  pp.parts.reserve(2);
  pp.parts.push_back(std::move(first));
  pp.parts.push_back(std::move(second));
  return Point{std::move(pp)};
}

const std::vector<double>& Point::coords() const {
  if (auto* v = std::get_if<std::vector<double>>(&value)) return *v;
  throw DomainError("point is not a coordinate vector");
}

std::complex<double> Point::complex() const {
  if (auto* z = std::get_if<std::complex<double>>(&value)) return *z;
  throw DomainError("point is not a disk point");
}

const TreeLocus& Point::locus() const {
  if (auto* t = std::get_if<TreeLocus>(&value)) return *t;
  throw DomainError("point is not a tree locus");
}

const ProductPoint& Point::product() const {
  if (auto* p = std::get_if<ProductPoint>(&value)) return *p;
  throw DomainError("point is not a product point");
}

std::string to_string(SpaceKind kind) {
  switch (kind) {
    case SpaceKind::RealLine: return "real-line";
    case SpaceKind::Euclidean: return "euclidean";
    case SpaceKind::Lp: return "lp";
    case SpaceKind::MaxNorm: return "maxnorm";
    case SpaceKind::PoincareDisk: return "poincare-disk";
    case SpaceKind::MetricTree: return "metric-tree";
    case SpaceKind::Product: return "product";
  }
  return "unknown";
}

ConvexRegion ConvexRegion::box(std::vector<double> lo, std::vector<double> hi) {
  if (lo.size() != hi.size() || lo.empty()) throw DomainError("box corners must have equal, positive dimension");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] <= hi[i])) throw DomainError("box lower corner exceeds upper corner");
  ConvexRegion r;
  r.shape = Shape::Box;
  r.lo = std::move(lo);
  r.hi = std::move(hi);
  return r;
}

ConvexRegion ConvexRegion::ball(Point center, double radius) {
  if (!(radius > 0) || !std::isfinite(radius)) throw DomainError("ball radius must be positive and finite");
  ConvexRegion r;
  r.shape = Shape::Ball;
  r.center = std::move(center);
  r.radius = radius;
  return r;
}

// ---- WeightedTree ----

WeightedTree WeightedTree::parse(std::istream& in) {
  struct Edge {
    long parent, child;
    double weight;
  };
  std::vector<Edge> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    Edge e{};
    if (!(ls >> e.parent)) {
      std::string rest;
      std::istringstream probe(line);
      if (probe >> rest) throw DomainError("tree line " + std::to_string(lineno) + ": expected 'parent child weight'");
      continue;
    }
    std::string extra;
    if (!(ls >> e.child >> e.weight) || (ls >> extra))
      throw DomainError("tree line " + std::to_string(lineno) + ": expected 'parent child weight'");
    if (!(e.weight > 0) || !std::isfinite(e.weight))
      throw DomainError("tree line " + std::to_string(lineno) + ": weight must be positive");
    if (e.parent == e.child) throw DomainError("tree line " + std::to_string(lineno) + ": self loop");
    edges.push_back(e);
  }
  if (edges.empty()) throw DomainError("tree has no edges");

  WeightedTree t;
  std::map<long, std::size_t> index;
  auto intern = [&](long label) {
    auto [it, fresh] = index.emplace(label, t.label_.size());
    if (fresh) {
      t.label_.push_back(label);
      t.parent_.push_back(npos);
      t.weight_.push_back(0.0);
    }
    return it->second;
  };
  for (const auto& e : edges) {
    std::size_t p = intern(e.parent);
    std::size_t c = intern(e.child);
    if (t.parent_[c] != npos) throw DomainError("tree node " + std::to_string(e.child) + " has two parents");
    t.parent_[c] = p;
    t.weight_[c] = e.weight;
  }
  std::size_t roots = 0;
  for (std::size_t v = 0; v < t.parent_.size(); ++v)
    if (t.parent_[v] == npos) {
      t.root_ = v;
      ++roots;
    }
  if (roots != 1) throw DomainError("tree must have exactly one root, found " + std::to_string(roots));
  t.finalize();
  return t;
}

WeightedTree WeightedTree::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open tree file: " + path);
  return parse(in);
}

WeightedTree WeightedTree::demo() {
  std::istringstream in(
      "0 1 1\n"
      "0 2 2\n"
      "1 3 0.5\n"
      "1 4 1.5\n"
      "2 5 1\n"
      "2 6 0.75\n");
  return parse(in);
}

void WeightedTree::finalize() {
  const std::size_t n = parent_.size();
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t v = 0; v < n; ++v)
    if (v != root_) children[parent_[v]].push_back(v);

  depth_.assign(n, 0.0);
  level_.assign(n, 0);
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{root_};
  seen[root_] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t c : children[v]) {
      if (seen[c]) throw DomainError("tree contains a cycle");
      seen[c] = true;
      ++reached;
      depth_[c] = depth_[v] + weight_[c];
      level_[c] = level_[v] + 1;
      stack.push_back(c);
    }
  }
  if (reached != n) throw DomainError("tree contains a cycle or is disconnected");

  edges_.clear();
  for (std::size_t v = 0; v < n; ++v)
    if (v != root_) edges_.push_back(v);
}

std::size_t WeightedTree::node(long label) const {
  for (std::size_t v = 0; v < label_.size(); ++v)
    if (label_[v] == label) return v;
  throw DomainError("unknown tree node " + std::to_string(label));
}

std::size_t WeightedTree::lca(std::size_t u, std::size_t v) const {
  while (level_[u] > level_[v]) u = parent_[u];
  while (level_[v] > level_[u]) v = parent_[v];
  while (u != v) {
    u = parent_[u];
    v = parent_[v];
  }
  return u;
}

bool WeightedTree::is_ancestor(std::size_t a, std::size_t v) const {
  while (level_[v] > level_[a]) v = parent_[v];
  return v == a;
}

double WeightedTree::total_length() const {
  double s = 0.0;
  for (std::size_t e : edges_) s += weight_[e];
  return s;
}

// ---- Space base ----

Space::Space(SpaceKind kind, std::string name, Capabilities caps, ConvexRegion region)
    : kind_(kind), name_(std::move(name)), caps_(std::move(caps)), region_(std::move(region)) {}

void Space::check_lambda(double t) const {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("combine parameter must lie in [0,1]");
}

double Space::diameter() const {
  switch (region_.shape) {
    case ConvexRegion::Shape::Whole: return std::numeric_limits<double>::infinity();
    case ConvexRegion::Shape::Box: return dist(Point::vec(region_.lo), Point::vec(region_.hi));
    case ConvexRegion::Shape::Ball: return 2.0 * region_.radius;
  }
  return std::numeric_limits<double>::infinity();
}

bool Space::contains(const Point& p, double tol) const {
  try {
    validate(p);
  } catch (const DomainError&) {
    return false;
  }
  switch (region_.shape) {
    case ConvexRegion::Shape::Whole: return true;
    case ConvexRegion::Shape::Box: {
      const auto& c = p.coords();
      for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] < region_.lo[i] - tol || c[i] > region_.hi[i] + tol) return false;
      return true;
    }
    case ConvexRegion::Shape::Ball: return dist(*region_.center, p) <= region_.radius + tol;
  }
  return false;
}

namespace {

std::string format_vec(const std::vector<double>& v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_double(v[i]);
  }
  return s + ")";
}

// ---- normed spaces: R^d with the l2, lp or max norm, linear W ----

class VectorSpace final : public Space {
 public:
  VectorSpace(SpaceKind kind, std::string name, Capabilities caps, ConvexRegion region, std::size_t dim, double p)
      : Space(kind, std::move(name), std::move(caps), std::move(region)), dim_(dim), p_(p) {
    if (region_.shape == ConvexRegion::Shape::Box && region_.lo.size() != dim_)
      throw DomainError("box dimension does not match space");
    if (region_.shape == ConvexRegion::Shape::Ball) validate(*region_.center);
  }

  void validate(const Point& pt) const override {
    const auto* v = std::get_if<std::vector<double>>(&pt.value);
    if (!v || v->size() != dim_) throw DomainError(name_ + ": expected a vector of dimension " + std::to_string(dim_));
    for (double c : *v)
      if (!std::isfinite(c)) throw DomainError(name_ + ": non-finite coordinate");
  }

  double norm(const std::vector<double>& d) const {
    double m = 0.0;
    for (double c : d) m = std::max(m, std::fabs(c));
    if (std::isinf(p_) || m == 0.0) return m;
    if (p_ == 2.0) {
      double s = 0.0;
      for (double c : d) s += (c / m) * (c / m);
      return m * std::sqrt(s);
    }
    double s = 0.0;
    for (double c : d) s += std::pow(std::fabs(c) / m, p_);
    return m * std::pow(s, 1.0 / p_);
  }

  double dist(const Point& x, const Point& y) const override {
    validate(x);
    validate(y);
    const auto& a = x.coords();
    const auto& b = y.coords();
    std::vector<double> d(dim_);
    for (std::size_t i = 0; i < dim_; ++i) d[i] = a[i] - b[i];
    return norm(d);
  }

  Point combine(const Point& x, const Point& y, double t) const override {
    check_lambda(t);
    validate(x);
    validate(y);
    if (t == 0.0) return x;
    if (t == 1.0) return y;
    const auto& a = x.coords();
    const auto& b = y.coords();
    std::vector<double> out(dim_);
    for (std::size_t i = 0; i < dim_; ++i) out[i] = (1.0 - t) * a[i] + t * b[i];
    return Point::vec(std::move(out));
  }

  Point sample(Rng& rng) const override {
    std::vector<double> v(dim_);
    switch (region_.shape) {
      case ConvexRegion::Shape::Box:
        for (std::size_t i = 0; i < dim_; ++i) {
          double u = rng.uniform();
          if (u < 1.0 / 32) v[i] = region_.lo[i];
          else if (u < 2.0 / 32) v[i] = region_.hi[i];
          else v[i] = rng.uniform(region_.lo[i], region_.hi[i]);
        }
        return Point::vec(std::move(v));
      case ConvexRegion::Shape::Ball: {
        for (auto& c : v) c = rng.uniform(-1.0, 1.0);
        double n = norm(v);
        double scale = region_.radius * (n > 1.0 ? 1.0 / n : 1.0);
        const auto& c = region_.center->coords();
        for (std::size_t i = 0; i < dim_; ++i) v[i] = c[i] + scale * v[i];
        return Point::vec(std::move(v));
      }
      case ConvexRegion::Shape::Whole:
        for (auto& c : v) c = rng.uniform(-1.0, 1.0);
        return Point::vec(std::move(v));
    }
    return Point::vec(std::move(v));
  }

  std::string format(const Point& p) const override { return format_vec(p.coords()); }

 private:
  std::size_t dim_;
  double p_;
};

// ---- Poincare disk ----

std::complex<double> clamp_disk(std::complex<double> z) {
  double r = std::abs(z);
  if (r > kDiskClamp) z *= kDiskClamp / r;
  return z;
}

// Mobius translation taking x to 0, and its inverse.
std::complex<double> mobius_to_origin(std::complex<double> x, std::complex<double> w) {
  return (w - x) / (1.0 - std::conj(x) * w);
}
std::complex<double> mobius_from_origin(std::complex<double> x, std::complex<double> w) {
  return (w + x) / (1.0 + std::conj(x) * w);
}

class PoincareDisk final : public Space {
 public:
  explicit PoincareDisk(ConvexRegion region)
      : Space(SpaceKind::PoincareDisk, "poincare-disk", disk_caps(), std::move(region)) {
    if (region_.shape == ConvexRegion::Shape::Box) throw DomainError("poincare disk regions must be balls");
    if (region_.shape == ConvexRegion::Shape::Ball) validate(*region_.center);
  }

  static Capabilities disk_caps() {
    Capabilities c;
    c.cat0 = true;
    c.uc_modulus = cat0_modulus();
    return c;
  }

  void validate(const Point& p) const override {
    const auto* z = std::get_if<std::complex<double>>(&p.value);
    if (!z) throw DomainError("poincare-disk: expected a complex point");
    if (!std::isfinite(z->real()) || !std::isfinite(z->imag()) || std::abs(*z) >= 1.0)
      throw DomainError("poincare-disk: point must lie strictly inside the unit disk");
  }

  double dist(const Point& x, const Point& y) const override {
    validate(x);
    validate(y);
    auto a = x.complex();
    auto b = y.complex();
    if (a == b) return 0.0;
    double q = std::abs(a - b) / std::abs(1.0 - std::conj(a) * b);
    return std::atanh(std::min(q, kDiskClamp));
  }

  Point combine(const Point& x, const Point& y, double t) const override {
    check_lambda(t);
    validate(x);
    validate(y);
    if (t == 0.0) return x;
    if (t == 1.0) return y;
    auto a = x.complex();
    auto u = mobius_to_origin(a, y.complex());
    double r = std::abs(u);
    if (r == 0.0) return x;
    double target = std::tanh(t * std::atanh(std::min(r, kDiskClamp)));
    return Point::disk(clamp_disk(mobius_from_origin(a, u * (target / r))));
  }

  Point sample(Rng& rng) const override {
    double angle = rng.uniform(0.0, 2.0 * M_PI);
    if (region_.shape == ConvexRegion::Shape::Ball) {
      double s = region_.radius * rng.uniform();
      auto w = std::polar(std::tanh(s), angle);
      return Point::disk(clamp_disk(mobius_from_origin(region_.center->complex(), w)));
    }
    double r = 0.9 * std::sqrt(rng.uniform());
    return Point::disk(std::polar(r, angle));
  }

  std::string format(const Point& p) const override {
    auto z = p.complex();
    return "(" + format_double(z.real()) + ", " + format_double(z.imag()) + ")";
  }
};

// ---- metric tree ----

class MetricTree final : public Space {
 public:
  explicit MetricTree(WeightedTree tree)
      : Space(SpaceKind::MetricTree, "metric-tree", tree_caps(), ConvexRegion::whole()), tree_(std::move(tree)) {}

  static Capabilities tree_caps() {
    Capabilities c;
    c.cat0 = true;
    c.r_tree = true;
    c.uc_modulus = cat0_modulus();
    return c;
  }

  void validate(const Point& p) const override {
    const auto* l = std::get_if<TreeLocus>(&p.value);
    if (!l) throw DomainError("metric-tree: expected an (edge, offset) locus");
    if (l->edge >= tree_.size() || l->edge == tree_.root())
      throw DomainError("metric-tree: unknown edge " + std::to_string(l->edge));
    if (!(l->offset >= 0.0 && l->offset <= tree_.weight(l->edge)))
      throw DomainError("metric-tree: offset outside edge length");
  }

  double depth_of(const TreeLocus& l) const { return tree_.depth(tree_.parent(l.edge)) + l.offset; }

  // Depth of the branch point of the geodesics root->x and root->y.
  double meet_depth(const TreeLocus& a, const TreeLocus& b) const {
    if (a.edge == b.edge) return std::min(a.offset, b.offset) + tree_.depth(tree_.parent(a.edge));
    if (tree_.is_ancestor(a.edge, b.edge)) return depth_of(a);
    if (tree_.is_ancestor(b.edge, a.edge)) return depth_of(b);
    return tree_.depth(tree_.lca(a.edge, b.edge));
  }

  double dist(const Point& x, const Point& y) const override {
    validate(x);
    validate(y);
    const auto& a = x.locus();
    const auto& b = y.locus();
    if (a.edge == b.edge) return std::fabs(a.offset - b.offset);
    double m = meet_depth(a, b);
    return std::max(0.0, (depth_of(a) - m) + (depth_of(b) - m));
  }

  // The ancestor of l at the given depth (depth <= depth_of(l)).
  TreeLocus ancestor_at(TreeLocus l, double depth) const {
    std::size_t e = l.edge;
    while (tree_.depth(tree_.parent(e)) > depth) e = tree_.parent(e);
    double off = std::clamp(depth - tree_.depth(tree_.parent(e)), 0.0, tree_.weight(e));
    return TreeLocus{e, off};
  }

  Point combine(const Point& x, const Point& y, double t) const override {
    check_lambda(t);
    validate(x);
    validate(y);
    if (t == 0.0) return x;
    if (t == 1.0) return y;
    const auto& a = x.locus();
    const auto& b = y.locus();
    if (a.edge == b.edge) return Point::tree(a.edge, (1.0 - t) * a.offset + t * b.offset);
    double m = meet_depth(a, b);
    double up = depth_of(a) - m;
    double down = depth_of(b) - m;
    double s = t * (up + down);
    if (s <= up) return Point{ancestor_at(a, depth_of(a) - s)};
    return Point{ancestor_at(b, m + (s - up))};
  }

  Point sample(Rng& rng) const override {
    const auto& edges = tree_.edges();
    std::size_t e = edges[rng.index(edges.size())];
    double u = rng.uniform();
    double off;
    if (u < 1.0 / 16) off = 0.0;
    else if (u < 2.0 / 16) off = tree_.weight(e);
    else off = rng.uniform(0.0, tree_.weight(e));
    return Point::tree(e, off);
  }

  std::string format(const Point& p) const override {
    const auto& l = p.locus();
    return "edge " + std::to_string(tree_.label(tree_.parent(l.edge))) + "-" + std::to_string(tree_.label(l.edge)) +
           " @ " + format_double(l.offset);
  }

  double diameter() const override {
    double best = 0.0;
    for (std::size_t u : tree_.edges())
      for (std::size_t v : tree_.edges())
        best = std::max(best, dist(Point::tree(u, tree_.weight(u)), Point::tree(v, tree_.weight(v))));
    return best;
  }

 private:
  WeightedTree tree_;
};

// ---- product with the max metric ----

class ProductSpace final : public Space {
 public:
  ProductSpace(SpacePtr first, SpacePtr second)
      : Space(SpaceKind::Product, first->name() + "*" + second->name(), product_caps(*first, *second),
              ConvexRegion::whole()),
        first_(std::move(first)),
        second_(std::move(second)) {}

  static Capabilities product_caps(const Space& a, const Space& b) {
    Capabilities c;
    c.w_hyperbolic = a.capabilities().w_hyperbolic && b.capabilities().w_hyperbolic;
    return c;
  }

  void validate(const Point& p) const override {
    const auto* pp = std::get_if<ProductPoint>(&p.value);
    if (!pp || pp->parts.size() != 2) throw DomainError(name_ + ": expected a pair of points");
    first_->validate(pp->parts[0]);
    second_->validate(pp->parts[1]);
  }

  double dist(const Point& x, const Point& y) const override {
    validate(x);
    validate(y);
    const auto& a = x.product().parts;
    const auto& b = y.product().parts;
    return std::max(first_->dist(a[0], b[0]), second_->dist(a[1], b[1]));
  }

  Point combine(const Point& x, const Point& y, double t) const override {
    check_lambda(t);
    validate(x);
    validate(y);
    const auto& a = x.product().parts;
    const auto& b = y.product().parts;
    return Point::pair(first_->combine(a[0], b[0], t), second_->combine(a[1], b[1], t));
  }

  Point sample(Rng& rng) const override {
    Point a = first_->sample(rng);
    Point b = second_->sample(rng);
    return Point::pair(std::move(a), std::move(b));
  }

  std::string format(const Point& p) const override {
    const auto& parts = p.product().parts;
    return "[" + first_->format(parts[0]) + ", " + second_->format(parts[1]) + "]";
  }

  double diameter() const override { return std::max(first_->diameter(), second_->diameter()); }

  bool contains(const Point& p, double tol) const override {
    const auto* pp = std::get_if<ProductPoint>(&p.value);
    if (!pp || pp->parts.size() != 2) return false;
    const auto& parts = pp->parts;
    return first_->contains(parts[0], tol) && second_->contains(parts[1], tol);
  }

 private:
  SpacePtr first_, second_;
};

Capabilities normed_caps(std::size_t dim, double p) {
  Capabilities c;
  c.cat0 = (p == 2.0) || dim == 1;
  c.r_tree = dim == 1;
  if (std::isfinite(p)) c.uc_modulus = as_uc_modulus(lp_modulus(p));
  else if (dim == 1) c.uc_modulus = cat0_modulus();
  if (p == 2.0) c.uc_modulus = cat0_modulus();
  return c;
}

}  // namespace

SpacePtr make_real_line(ConvexRegion region) {
  return std::make_shared<VectorSpace>(SpaceKind::RealLine, "real-line", normed_caps(1, 2.0), std::move(region), 1,
                                       2.0);
}

SpacePtr make_euclidean(std::size_t dim, ConvexRegion region) {
  if (dim == 0) throw DomainError("dimension must be positive");
  return std::make_shared<VectorSpace>(SpaceKind::Euclidean, "euclidean" + std::to_string(dim), normed_caps(dim, 2.0),
                                       std::move(region), dim, 2.0);
}

SpacePtr make_lp(std::size_t dim, double p, ConvexRegion region) {
  if (dim == 0) throw DomainError("dimension must be positive");
  if (!(p >= 2.0)) throw DomainError("lp spaces require p >= 2");
  if (std::isinf(p)) return make_maxnorm(dim, std::move(region));
  return std::make_shared<VectorSpace>(SpaceKind::Lp, "lp" + std::to_string(dim) + "," + format_double(p),
                                       normed_caps(dim, p), std::move(region), dim, p);
}

SpacePtr make_maxnorm(std::size_t dim, ConvexRegion region) {
  if (dim == 0) throw DomainError("dimension must be positive");
  return std::make_shared<VectorSpace>(SpaceKind::MaxNorm, "maxnorm" + std::to_string(dim),
                                       normed_caps(dim, std::numeric_limits<double>::infinity()), std::move(region),
                                       dim, std::numeric_limits<double>::infinity());
}

SpacePtr make_poincare_disk(ConvexRegion region) { return std::make_shared<PoincareDisk>(std::move(region)); }

SpacePtr make_metric_tree(WeightedTree tree) { return std::make_shared<MetricTree>(std::move(tree)); }

SpacePtr product_space(SpacePtr first, SpacePtr second) {
  if (!first || !second) throw DomainError("product of a null space");
  return std::make_shared<ProductSpace>(std::move(first), std::move(second));
}

// ---- checkers ----

Sampler default_sampler(const Space& space) {
  return [&space](Rng& rng) { return space.sample(rng); };
}

double AxiomReport::worst() const { return std::max({w1, w2, w3, w4, xylambda}); }

namespace {

double sample_lambda(Rng& rng) {
  double u = rng.uniform();
  if (u < 1.0 / 16) return 0.0;
  if (u < 2.0 / 16) return 1.0;
  if (u < 3.0 / 16) return 0.5;
  return rng.uniform();
}

}  // namespace

AxiomReport check_w_axioms(const Space& space, const Sampler& sampler, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  AxiomReport rep;
  for (std::size_t i = 0; i < n; ++i) {
    Point x = sampler(rng), y = sampler(rng), z = sampler(rng), w = sampler(rng);
    double l = sample_lambda(rng), m = sample_lambda(rng);
    Point wl = space.combine(x, y, l);
    Point wm = space.combine(x, y, m);
    double dxy = space.dist(x, y);

    rep.w1 = std::max(rep.w1, space.dist(z, wl) - ((1 - l) * space.dist(z, x) + l * space.dist(z, y)));
    rep.w2 = std::max(rep.w2, std::fabs(space.dist(wl, wm) - std::fabs(l - m) * dxy));
    rep.w3 = std::max(rep.w3, space.dist(wl, space.combine(y, x, 1 - l)));
    rep.w4 = std::max(rep.w4, space.dist(space.combine(x, z, l), space.combine(y, w, l)) -
                                  ((1 - l) * space.dist(x, y) + l * space.dist(z, w)));
    rep.xylambda = std::max({rep.xylambda, std::fabs(space.dist(x, wl) - l * dxy),
                             std::fabs(space.dist(y, wl) - (1 - l) * dxy)});
    ++rep.samples;
  }
  return rep;
}

AxiomReport check_w_axioms(const Space& space, std::size_t n, std::uint64_t seed) {
  return check_w_axioms(space, default_sampler(space), n, seed);
}

CnEvaluation evaluate_cn(const Space& space, const Point& x, const Point& y, const Point& z) {
  Point mid = space.combine(x, y, 0.5);
  double dm = space.dist(z, mid);
  double dx = space.dist(z, x), dy = space.dist(z, y), dxy = space.dist(x, y);
  return {dm * dm, 0.5 * dx * dx + 0.5 * dy * dy - 0.25 * dxy * dxy};
}

std::optional<CnViolation> check_cn(const Space& space, const Point& x, const Point& y, const Point& z, double tol) {
  auto v = evaluate_cn(space, x, y, z);
  if (v.lhs > v.rhs + tol) return CnViolation{x, y, z, v};
  return std::nullopt;
}

std::optional<CnViolation> check_cn(const Space& space, const Sampler& sampler, std::size_t n, double tol,
                                    std::uint64_t seed) {
  Rng rng(seed);
  std::optional<CnViolation> worst;
  for (std::size_t i = 0; i < n; ++i) {
    Point x = sampler(rng), y = sampler(rng), z = sampler(rng);
    auto v = check_cn(space, x, y, z, tol);
    if (v && (!worst || v->value.lhs - v->value.rhs > worst->value.lhs - worst->value.rhs)) worst = std::move(v);
  }
  return worst;
}

std::optional<CnViolation> check_cn(const Space& space, std::size_t n, double tol, std::uint64_t seed) {
  return check_cn(space, default_sampler(space), n, tol, seed);
}

double four_point_defect(const Space& space, const Point& x, const Point& y, const Point& z, const Point& w) {
  double s[3] = {space.dist(x, y) + space.dist(z, w), space.dist(x, z) + space.dist(y, w),
                 space.dist(x, w) + space.dist(y, z)};
  std::sort(s, s + 3);
  return std::max(0.0, (s[2] - s[1]) / 2.0);
}

double gromov_delta_estimate(const Space& space, const Sampler& sampler, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    Point x = sampler(rng), y = sampler(rng), z = sampler(rng), w = sampler(rng);
    best = std::max(best, four_point_defect(space, x, y, z, w));
  }
  return best;
}

double gromov_delta_estimate(const Space& space, std::size_t n, std::uint64_t seed) {
  return gromov_delta_estimate(space, default_sampler(space), n, seed);
}

UcConfiguration evaluate_uc(const Space& space, const UcModulus& modulus, const Point& a, const Point& x,
                            const Point& y, double r, double eps) {
  constexpr double slack = 1e-9;
  if (!(r > 0)) throw DomainError("uniform convexity check needs r > 0");
  if (space.dist(x, a) > r * (1 + slack) || space.dist(y, a) > r * (1 + slack))
    throw DomainError("uniform convexity hypothesis violated: points outside the ball");
  if (space.dist(x, y) < eps * r * (1 - slack))
    throw DomainError("uniform convexity hypothesis violated: points closer than eps*r");
  UcConfiguration c{a, x, y, r, eps, 0.0, 0.0};
  c.lhs = space.dist(space.combine(x, y, 0.5), a);
  c.rhs = (1.0 - modulus.eval(r, eps)) * r;
  return c;
}

UcReport check_uc(const Space& space, const UcModulus& modulus, std::size_t n, double tol, std::uint64_t seed) {
  Rng rng(seed);
  UcReport rep;
  // Pull a sampled point q toward the centre so that it lands in the ball of radius r.
  auto inside = [&](const Point& a, double r) {
    Point q = space.sample(rng);
    double d = space.dist(a, q);
    double target = rng.uniform() < 0.5 ? r : r * rng.uniform();
    if (d <= target) return q;
    return space.combine(a, q, target / d);
  };
  for (std::size_t i = 0; i < n; ++i) {
    Point a = space.sample(rng);
    double r = rng.uniform(0.05, 2.0);
    Point x = inside(a, r);
    Point y = inside(a, r);
    double eps = std::min(2.0, space.dist(x, y) / r);
    ++rep.samples;
    if (!(eps > 1e-9)) continue;
    UcConfiguration c{a, x, y, r, eps, 0.0, 0.0};
    c.lhs = space.dist(space.combine(x, y, 0.5), a);
    c.rhs = (1.0 - modulus.eval(r, eps)) * r;
    double margin = c.rhs - c.lhs;
    if (margin < rep.worst_margin) {
      rep.worst_margin = margin;
      if (margin < -tol) rep.violation = c;
    }
  }
  return rep;
}

}  // namespace fprates
