#include "dmfield/geometry.hpp"

#include <random>

namespace dmf {

// ---------------------------------------------------------------------------
// Boundary pieces

Vec2 BoundaryPiece::point(double s) const {
  if (kind == Kind::segment) return a + (b - a) * s;
  double th = th0 + (th1 - th0) * s;
  return center + Vec2{std::cos(th), std::sin(th)} * radius;
}

Vec2 BoundaryPiece::deriv(double s) const {
  if (kind == Kind::segment) return b - a;
  double th = th0 + (th1 - th0) * s;
  return Vec2{-std::sin(th), std::cos(th)} * (radius * (th1 - th0));
}

double BoundaryPiece::length() const {
  return kind == Kind::segment ? norm(b - a) : radius * std::abs(th1 - th0);
}

Vec2 BoundaryPiece::normal(double s) const {
  if (kind == Kind::segment) return normalized(perp(b - a)) * normal_sign;
  double th = th0 + (th1 - th0) * s;
  return Vec2{std::cos(th), std::sin(th)} * normal_sign;
}

double BoundaryPiece::project(const Vec2& x) const {
  if (kind == Kind::segment) {
    Vec2 d = b - a;
    double l2 = dot(d, d);
    return l2 > 0 ? std::clamp(dot(x - a, d) / l2, 0.0, 1.0) : 0.0;
  }
  double phi = std::atan2(x.y - center.y, x.x - center.x);
  double lo = std::min(th0, th1), hi = std::max(th0, th1);
  for (int k = -2; k <= 2; ++k) {
    double p = phi + 2.0 * kPi * k;
    if (p >= lo && p <= hi) return (p - th0) / (th1 - th0);
  }
  return dist(point(0.0), x) <= dist(point(1.0), x) ? 0.0 : 1.0;
}

BoundaryPiece BoundaryPiece::sub(double s0, double s1) const {
  BoundaryPiece p = *this;
  if (kind == Kind::segment) {
    p.a = point(s0);
    p.b = point(s1);
  } else {
    p.th0 = th0 + (th1 - th0) * s0;
    p.th1 = th0 + (th1 - th0) * s1;
  }
  return p;
}

namespace {

constexpr double kEdgeTol = 1e-12;

double seg_dist(const Vec2& p, const Vec2& a, const Vec2& b, Vec2* nearest = nullptr) {
  Vec2 d = b - a;
  double l2 = dot(d, d);
  double t = l2 > 0 ? std::clamp(dot(p - a, d) / l2, 0.0, 1.0) : 0.0;
  Vec2 q = a + d * t;
  if (nearest) *nearest = q;
  return dist(p, q);
}

double box_inner_dist(const Box& w, const Vec2& x) {
  return std::min({x.x - w.lo.x, w.hi.x - x.x, x.y - w.lo.y, w.hi.y - x.y});
}

// Keep the sub-arcs of each candidate along which `keep` holds.
std::vector<BoundaryPiece> trim_pieces(const std::vector<BoundaryPiece>& cands, const Predicate& keep,
                                       int samples = 256) {
  std::vector<BoundaryPiece> out;
  for (const BoundaryPiece& c : cands) {
    if (c.length() <= 1e-14) continue;
    auto bisect = [&](double lo, double hi, bool vlo) {
      for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (lo + hi);
        if (keep(c.point(m)) == vlo) lo = m;
        else hi = m;
      }
      return 0.5 * (lo + hi);
    };
    // Sample at interior offsets so endpoints on other pieces do not flip the verdict.
    auto at = [&](int i) { return (i + 0.5) / samples; };
    bool prev = keep(c.point(at(0)));
    double start = 0.0;
    for (int i = 1; i < samples; ++i) {
      bool v = keep(c.point(at(i)));
      if (v != prev) {
        double s = bisect(at(i - 1), at(i), prev);
        if (v) start = s;
        else if (s > start) out.push_back(c.sub(start, s));
      }
      prev = v;
    }
    if (prev) out.push_back(c.sub(start, 1.0));
  }
  std::vector<BoundaryPiece> kept;
  for (auto& p : out)
    if (p.length() > 1e-13) kept.push_back(p);
  return kept;
}

bool polygon_is_ccw(const std::vector<Vec2>& v) { return polygon_area(v) > 0; }

bool polygon_is_convex(const std::vector<Vec2>& v) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i < n; ++i) {
    Vec2 e0 = v[(i + 1) % n] - v[i], e1 = v[(i + 2) % n] - v[(i + 1) % n];
    if (cross(e0, e1) < -1e-14 * (norm(e0) * norm(e1))) return false;
  }
  return true;
}

bool point_in_polygon(const std::vector<Vec2>& v, const Vec2& p) {
  bool in = false;
  const std::size_t n = v.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    if ((v[i].y > p.y) != (v[j].y > p.y)) {
      double xc = v[j].x + (p.y - v[j].y) * (v[i].x - v[j].x) / (v[i].y - v[j].y);
      if (p.x < xc) in = !in;
    }
  }
  return in;
}

// Ear clipping of a simple counter-clockwise polygon.
std::vector<std::array<Vec2, 3>> ear_clip(std::vector<Vec2> v) {
  std::vector<std::array<Vec2, 3>> tris;
  auto inside_tri = [](const Vec2& p, const Vec2& a, const Vec2& b, const Vec2& c) {
    return cross(b - a, p - a) > 0 && cross(c - b, p - b) > 0 && cross(a - c, p - c) > 0;
  };
  int guard = 0;
  while (v.size() > 3 && guard++ < 100000) {
    const std::size_t n = v.size();
    bool cut = false;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& a = v[(i + n - 1) % n];
      const Vec2& b = v[i];
      const Vec2& c = v[(i + 1) % n];
      if (cross(b - a, c - b) <= 0) continue;
      bool ear = true;
      for (std::size_t k = 0; k < n && ear; ++k) {
        if (k == i || k == (i + 1) % n || k == (i + n - 1) % n) continue;
        if (inside_tri(v[k], a, b, c)) ear = false;
      }
      if (!ear) continue;
      tris.push_back({b, c, a});
      v.erase(v.begin() + static_cast<long>(i));
      cut = true;
      break;
    }
    if (!cut) throw UnsupportedShape("polygon: ear clipping failed (self-intersecting input?)");
  }
  if (v.size() == 3) tris.push_back({v[0], v[1], v[2]});
  return tris;
}

// Nearest-sample index on a uniform grid.
class PointGrid {
 public:
  explicit PointGrid(std::vector<Vec2> pts) : pts_(std::move(pts)) {
    if (pts_.empty()) return;
    Vec2 lo = pts_[0], hi = pts_[0];
    for (const Vec2& p : pts_) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    box_ = Box(lo, hi).grown(1e-9);
    n_ = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(pts_.size()) / 2.0)));
    hx_ = box_.width() / n_;
    hy_ = box_.height() / n_;
    cells_.assign(static_cast<std::size_t>(n_ * n_), {});
    for (std::size_t i = 0; i < pts_.size(); ++i) cells_[index(cell_of(pts_[i]))].push_back(static_cast<int>(i));
  }

  double nearest(const Vec2& x) const {
    if (pts_.empty()) return 1e300;
    if (!box_.contains(x)) {
      double best = 1e300;
      for (const Vec2& p : pts_) best = std::min(best, dist(p, x));
      return best;
    }
    auto [cx, cy] = cell_of(x);
    double best = 1e300, h = std::min(hx_, hy_);
    for (int k = 0; k <= n_; ++k) {
      for (int i = cx - k; i <= cx + k; ++i)
        for (int j = cy - k; j <= cy + k; ++j) {
          if (std::max(std::abs(i - cx), std::abs(j - cy)) != k) continue;
          if (i < 0 || j < 0 || i >= n_ || j >= n_) continue;
          for (int id : cells_[index({i, j})]) best = std::min(best, dist(pts_[static_cast<std::size_t>(id)], x));
        }
      if (best <= k * h) break;
    }
    return best;
  }

 private:
  std::pair<int, int> cell_of(const Vec2& p) const {
    int i = std::clamp(static_cast<int>((p.x - box_.lo.x) / hx_), 0, n_ - 1);
    int j = std::clamp(static_cast<int>((p.y - box_.lo.y) / hy_), 0, n_ - 1);
    return {i, j};
  }
  std::size_t index(std::pair<int, int> c) const { return static_cast<std::size_t>(c.first * n_ + c.second); }

  std::vector<Vec2> pts_;
  Box box_;
  int n_ = 1;
  double hx_ = 1, hy_ = 1;
  std::vector<std::vector<int>> cells_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Shape interface

class Shape : public std::enable_shared_from_this<Shape> {
 public:
  virtual ~Shape() = default;
  virtual std::string kind() const = 0;
  virtual bool contains(const Vec2& x) const = 0;
  virtual bool contains_closure(const Vec2& x) const { return contains(x) || sdist(x) >= -kEdgeTol * scale(); }
  virtual double sdist(const Vec2& x) const = 0;
  virtual Vec2 grad(const Vec2& x) const {
    const double h = 1e-7 * scale();
    Vec2 g{(sdist(x + Vec2{h, 0}) - sdist(x - Vec2{h, 0})) / (2 * h),
           (sdist(x + Vec2{0, h}) - sdist(x - Vec2{0, h})) / (2 * h)};
    return normalized(g);
  }
  virtual bool ridge(const Vec2&) const { return false; }
  virtual Box bounds() const = 0;
  virtual std::vector<Patch> area_patches() const = 0;
  virtual bool cover_exact() const { return true; }
  virtual bool ridge_aware() const { return true; }
  virtual std::vector<Patch> shell_patches(double, double) const { return area_patches(); }
  virtual bool exact_shells() const { return false; }
  virtual std::vector<BoundaryPiece> pieces(double) const {
    throw UnsupportedShape(kind() + ": level curves are not available for this shape");
  }
  virtual double max_depth() const {
    Box b = bounds();
    double best = 0.0;
    const int n = 200;
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) {
        Vec2 x{b.lo.x + b.width() * i / n, b.lo.y + b.height() * j / n};
        if (contains(x)) best = std::max(best, sdist(x));
      }
    return best;
  }
  virtual std::vector<double> level_breaks() const { return {}; }
  virtual Vec2 project(const Vec2& x) const { return x - grad(x) * sdist(x); }
  virtual std::vector<Vec2> sample_boundary(int n) const {
    auto ps = pieces(0.0);
    double total = 0.0;
    for (auto& p : ps) total += p.length();
    std::vector<Vec2> out;
    if (total <= 0) return out;
    for (auto& p : ps) {
      int m = std::max(2, static_cast<int>(std::ceil(n * p.length() / total)));
      for (int i = 0; i < m; ++i) out.push_back(p.point((i + 0.5) / m));
    }
    return out;
  }
  // exterior signed distance is exact (|sdist| = dist to the boundary outside too)
  virtual bool exterior_exact() const { return true; }
  virtual std::shared_ptr<const Shape> offset(double eps) const;

  double scale() const { return std::max(1.0, bounds().scale()); }
};

namespace {

// ---------------------------------------------------------------------------
// Convex polygon (also the box)

class ConvexPolygonShape : public Shape {
 public:
  ConvexPolygonShape(std::vector<Vec2> v, std::string kind) : v_(std::move(v)), kind_(std::move(kind)) {
    if (v_.size() < 3) throw ConfigError("polygon needs at least 3 vertices");
    if (!polygon_is_ccw(v_)) std::reverse(v_.begin(), v_.end());
    const std::size_t m = v_.size();
    for (std::size_t i = 0; i < m; ++i) {
      Vec2 e = v_[(i + 1) % m] - v_[i];
      if (norm(e) == 0) throw ConfigError("polygon has repeated vertices");
      Vec2 n = normalized(perp(e));
      n_.push_back(n);
      c_.push_back(dot(n, v_[i]));
    }
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<Vec2> cell = v_;
      for (std::size_t j = 0; j < m && !cell.empty(); ++j) {
        if (j == i) continue;
        Vec2 dn = n_[j] - n_[i];
        if (norm(dn) < 1e-14) continue;
        cell = clip_halfplane(cell, dn, c_[j] - c_[i]);
      }
      cells_.push_back(cell.size() >= 3 ? cell : std::vector<Vec2>{});
    }
    Vec2 lo = v_[0], hi = v_[0];
    for (const Vec2& p : v_) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    bounds_ = Box(lo, hi);
  }

  std::string kind() const override { return kind_; }
  const std::vector<Vec2>& vertices() const { return v_; }
  const std::vector<Vec2>& normals() const { return n_; }
  const std::vector<double>& offsets() const { return c_; }

  double edge(std::size_t i, const Vec2& x) const { return dot(n_[i], x) - c_[i]; }

  bool contains(const Vec2& x) const override {
    for (std::size_t i = 0; i < n_.size(); ++i)
      if (edge(i, x) <= 0) return false;
    return true;
  }
  bool contains_closure(const Vec2& x) const override {
    double tol = kEdgeTol * scale();
    for (std::size_t i = 0; i < n_.size(); ++i)
      if (edge(i, x) < -tol) return false;
    return true;
  }
  double sdist(const Vec2& x) const override {
    if (contains(x)) {
      double d = 1e300;
      for (std::size_t i = 0; i < n_.size(); ++i) d = std::min(d, edge(i, x));
      return d;
    }
    return -boundary_dist(x, nullptr);
  }
  Vec2 grad(const Vec2& x) const override {
    if (contains(x)) return n_[argmin(x)];
    Vec2 q;
    double d = boundary_dist(x, &q);
    if (d <= 0) return n_[argmin(x)];
    return (q - x) / d;
  }
  bool ridge(const Vec2& x) const override {
    double a = 1e300, b = 1e300;
    for (std::size_t i = 0; i < n_.size(); ++i) {
      double d = edge(i, x);
      if (d < a) {
        b = a;
        a = d;
      } else if (d < b) {
        b = d;
      }
    }
    return b - a <= 1e-12 * scale();
  }
  Box bounds() const override { return bounds_; }

  std::vector<Patch> area_patches() const override {
    std::vector<Patch> out;
    for (const auto& c : cells_) {
      auto p = polygon_patches(c);
      out.insert(out.end(), p.begin(), p.end());
    }
    return out;
  }
  std::vector<Patch> shell_patches(double e1, double e2) const override {
    std::vector<Patch> out;
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      if (cells_[i].empty()) continue;
      auto c = clip_halfplane(cells_[i], n_[i], c_[i] + e1);
      if (c.size() >= 3) c = clip_halfplane(c, -n_[i], -(c_[i] + e2));
      if (c.size() < 3) continue;
      auto p = polygon_patches(c);
      out.insert(out.end(), p.begin(), p.end());
    }
    return out;
  }
  bool exact_shells() const override { return true; }

  std::vector<Vec2> inner_polygon(double eps) const {
    std::vector<Vec2> p = v_;
    for (std::size_t i = 0; i < n_.size() && p.size() >= 3; ++i) p = clip_halfplane(p, n_[i], c_[i] + eps);
    if (p.size() < 3 || std::abs(polygon_area(p)) <= 1e-15 * bounds_.volume()) return {};
    return p;
  }

  std::vector<BoundaryPiece> pieces(double eps) const override {
    std::vector<BoundaryPiece> out;
    auto p = inner_polygon(eps);
    const std::size_t m = p.size();
    double tol = 1e-9 * scale();
    for (std::size_t k = 0; k < m; ++k) {
      Vec2 a = p[k], b = p[(k + 1) % m];
      if (dist(a, b) <= 1e-13 * scale()) continue;
      int id = -1;
      for (std::size_t i = 0; i < n_.size(); ++i)
        if (std::abs(edge(i, a) - eps) < tol && std::abs(edge(i, b) - eps) < tol) {
          id = static_cast<int>(i);
          break;
        }
      BoundaryPiece bp;
      bp.kind = BoundaryPiece::Kind::segment;
      bp.a = a;
      bp.b = b;
      bp.normal_sign = 1.0;
      bp.id = id;
      out.push_back(bp);
    }
    return out;
  }

  double max_depth() const override {
    double lo = 0.0, hi = bounds_.scale();
    for (int it = 0; it < 80; ++it) {
      double m = 0.5 * (lo + hi);
      if (inner_polygon(m).empty()) hi = m;
      else lo = m;
    }
    return lo;
  }

  std::vector<double> level_breaks() const override {
    auto count = [&](double e) { return inner_polygon(e).size(); };
    std::vector<double> out;
    double top = max_depth();
    const int n = 256;
    std::size_t prev = count(0.0);
    for (int i = 1; i < n; ++i) {
      double e = top * i / n;
      std::size_t c = count(e);
      if (c != prev) {
        double lo = top * (i - 1) / n, hi = e;
        for (int it = 0; it < 60; ++it) {
          double m = 0.5 * (lo + hi);
          if (count(m) == prev) lo = m;
          else hi = m;
        }
        out.push_back(0.5 * (lo + hi));
      }
      prev = c;
    }
    return out;
  }

  Vec2 project(const Vec2& x) const override {
    Vec2 q;
    boundary_dist(x, &q);
    return q;
  }

 private:
  std::size_t argmin(const Vec2& x) const {
    std::size_t k = 0;
    double best = 1e300;
    for (std::size_t i = 0; i < n_.size(); ++i) {
      double d = edge(i, x);
      if (d < best) {
        best = d;
        k = i;
      }
    }
    return k;
  }
  double boundary_dist(const Vec2& x, Vec2* nearest) const {
    double best = 1e300;
    const std::size_t m = v_.size();
    for (std::size_t i = 0; i < m; ++i) {
      Vec2 q;
      double d = seg_dist(x, v_[i], v_[(i + 1) % m], &q);
      if (d < best) {
        best = d;
        if (nearest) *nearest = q;
      }
    }
    return best;
  }

  std::vector<Vec2> v_;
  std::string kind_;
  std::vector<Vec2> n_;
  std::vector<double> c_;
  std::vector<std::vector<Vec2>> cells_;
  Box bounds_;
};

// ---------------------------------------------------------------------------
// Half-plane {n.x > t} inside a window (window walls are not boundary)

class HalfPlaneShape : public Shape {
 public:
  HalfPlaneShape(Vec2 n, double t, Box w) : n_(normalized(n)), t_(t), w_(w) {
    if (norm(n) == 0) throw ConfigError("halfspace normal must be non-zero");
    t_ = t / norm(n);
  }
  std::string kind() const override { return "halfspace"; }
  Vec2 normal() const { return n_; }
  double offset_value() const { return t_; }
  const Box& window() const { return w_; }

  bool contains(const Vec2& x) const override { return dot(n_, x) > t_ && w_.contains(x); }
  bool contains_closure(const Vec2& x) const override {
    return dot(n_, x) >= t_ - kEdgeTol * scale() && w_.contains(x);
  }
  double sdist(const Vec2& x) const override { return dot(n_, x) - t_; }
  Vec2 grad(const Vec2&) const override { return n_; }
  Box bounds() const override { return w_; }
  std::vector<Vec2> polygon(double e1) const { return clip_halfplane(box_polygon(w_), n_, t_ + e1); }
  std::vector<Patch> area_patches() const override { return polygon_patches(polygon(0.0)); }
  std::vector<Patch> shell_patches(double e1, double e2) const override {
    auto p = polygon(e1);
    if (p.size() >= 3) p = clip_halfplane(p, -n_, -(t_ + e2));
    return p.size() >= 3 ? polygon_patches(p) : std::vector<Patch>{};
  }
  bool exact_shells() const override { return true; }
  std::vector<BoundaryPiece> pieces(double eps) const override {
    // chord of the window on the line n.x = t + eps
    Vec2 dir{n_.y, -n_.x};
    Vec2 p0 = n_ * (t_ + eps);
    double lo = -1e300, hi = 1e300;
    for (int k = 0; k < 2; ++k) {
      double dk = dir[k], pk = p0[k];
      double a = k == 0 ? w_.lo.x : w_.lo.y, b = k == 0 ? w_.hi.x : w_.hi.y;
      if (std::abs(dk) < 1e-15) {
        if (pk < a || pk > b) return {};
        continue;
      }
      double s0 = (a - pk) / dk, s1 = (b - pk) / dk;
      lo = std::max(lo, std::min(s0, s1));
      hi = std::min(hi, std::max(s0, s1));
    }
    if (hi - lo <= 1e-14) return {};
    BoundaryPiece bp;
    bp.a = p0 + dir * lo;
    bp.b = p0 + dir * hi;
    bp.normal_sign = 1.0;
    return {bp};
  }
  double max_depth() const override {
    double best = 0.0;
    for (const Vec2& c : box_polygon(w_)) best = std::max(best, sdist(c));
    return best;
  }
  Vec2 project(const Vec2& x) const override { return x - n_ * sdist(x); }

 private:
  Vec2 n_;
  double t_;
  Box w_;
};

// ---------------------------------------------------------------------------
// Ball

class BallShape : public Shape {
 public:
  BallShape(Vec2 c, double r) : c_(c), r_(r) {
    if (!(r > 0)) throw ConfigError("ball radius must be positive");
  }
  std::string kind() const override { return "ball"; }
  Vec2 center() const { return c_; }
  double radius() const { return r_; }
  bool contains(const Vec2& x) const override { return dist(x, c_) < r_; }
  double sdist(const Vec2& x) const override { return r_ - dist(x, c_); }
  Vec2 grad(const Vec2& x) const override {
    double r = dist(x, c_);
    return r > 0 ? (c_ - x) / r : Vec2{-1.0, 0.0};
  }
  bool ridge(const Vec2& x) const override { return dist(x, c_) <= 1e-12 * r_; }
  Box bounds() const override { return Box(c_ - Vec2{r_, r_}, c_ + Vec2{r_, r_}); }
  std::vector<Patch> area_patches() const override { return shell_patches(0.0, r_); }
  std::vector<Patch> shell_patches(double e1, double e2) const override {
    double r0 = std::max(0.0, r_ - e2), r1 = std::max(0.0, r_ - e1);
    std::vector<Patch> out;
    if (r1 <= r0) return out;
    for (int q = 0; q < 4; ++q) out.push_back(Patch::polar(c_, r0, r1, q * 0.5 * kPi, (q + 1) * 0.5 * kPi));
    return out;
  }
  bool exact_shells() const override { return true; }
  std::vector<BoundaryPiece> pieces(double eps) const override {
    if (r_ - eps <= 0) return {};
    BoundaryPiece bp;
    bp.kind = BoundaryPiece::Kind::arc;
    bp.center = c_;
    bp.radius = r_ - eps;
    bp.th0 = 0.0;
    bp.th1 = 2.0 * kPi;
    bp.normal_sign = -1.0;
    return {bp};
  }
  double max_depth() const override { return r_; }
  Vec2 project(const Vec2& x) const override {
    double r = dist(x, c_);
    return r > 0 ? c_ + (x - c_) * (r_ / r) : c_ + Vec2{r_, 0.0};
  }

 private:
  Vec2 c_;
  double r_;
};

// ---------------------------------------------------------------------------
// Shapes parametrised through their level-set families

class LevelSetShape : public Shape, public LevelSetFamily {
 public:
  std::vector<Patch> area_patches() const override { return shell_patches(0.0, max_depth()); }
  std::vector<Patch> shell_patches(double e1, double e2) const override {
    std::vector<Patch> out;
    double top = max_depth();
    e2 = std::min(e2, top);
    if (e2 <= e1) return out;
    std::shared_ptr<const LevelSetFamily> fam(shared_from_this(), static_cast<const LevelSetFamily*>(this));
    for (int k = 0; k < piece_count(); ++k) out.push_back(Patch::levelset(fam, k, e1, e2));
    return out;
  }
  bool exact_shells() const override { return true; }
};

class HalfDiskShape : public LevelSetShape {
 public:
  HalfDiskShape(Vec2 c, double r, double angle)
      : c_(c), r_(r), a_(angle), e_{std::cos(angle), std::sin(angle)}, f_(perp(e_)) {
    if (!(r > 0)) throw ConfigError("halfdisk radius must be positive");
  }
  std::string kind() const override { return "halfdisk"; }
  bool contains(const Vec2& x) const override { return dist(x, c_) < r_ && dot(x - c_, f_) > 0; }
  bool contains_closure(const Vec2& x) const override {
    double tol = kEdgeTol * scale();
    return dist(x, c_) <= r_ + tol && dot(x - c_, f_) >= -tol;
  }
  double sdist(const Vec2& x) const override {
    double r = dist(x, c_), v = dot(x - c_, f_);
    if (contains(x)) return std::min(r_ - r, v);
    double arc = v >= 0 ? std::abs(r - r_) : std::min(dist(x, c_ + e_ * r_), dist(x, c_ - e_ * r_));
    return -std::min(arc, seg_dist(x, c_ - e_ * r_, c_ + e_ * r_));
  }
  Vec2 grad(const Vec2& x) const override {
    if (!contains(x)) return Shape::grad(x);
    double r = dist(x, c_), v = dot(x - c_, f_);
    if (v <= r_ - r || r == 0) return f_;
    return (c_ - x) / r;
  }
  bool ridge(const Vec2& x) const override {
    double r = dist(x, c_), v = dot(x - c_, f_);
    return std::abs(v - (r_ - r)) <= 1e-12 * r_;
  }
  Box bounds() const override { return Box(c_ - Vec2{r_, r_}, c_ + Vec2{r_, r_}); }
  double max_depth() const override { return 0.5 * r_; }

  int piece_count() const override { return 2; }
  Vec2 piece_point(int k, double eps, double s) const override {
    if (k == 0) {
      double w = half_chord(eps);
      return c_ + e_ * (-w + 2.0 * w * s) + f_ * eps;
    }
    double rho = r_ - eps, al = alpha(eps);
    double phi = al + s * (kPi - 2.0 * al);
    return c_ + (e_ * std::cos(phi) + f_ * std::sin(phi)) * rho;
  }
  double piece_speed(int k, double eps, double) const override {
    if (k == 0) return 2.0 * half_chord(eps);
    return (r_ - eps) * (kPi - 2.0 * alpha(eps));
  }

  std::vector<BoundaryPiece> pieces(double eps) const override {
    std::vector<BoundaryPiece> out;
    if (eps >= max_depth()) return out;
    double w = half_chord(eps);
    BoundaryPiece seg;
    seg.a = c_ - e_ * w + f_ * eps;
    seg.b = c_ + e_ * w + f_ * eps;
    seg.id = 0;
    out.push_back(seg);
    BoundaryPiece arc;
    arc.kind = BoundaryPiece::Kind::arc;
    arc.center = c_;
    arc.radius = r_ - eps;
    arc.th0 = a_ + alpha(eps);
    arc.th1 = a_ + kPi - alpha(eps);
    arc.normal_sign = -1.0;
    arc.id = 1;
    out.push_back(arc);
    return out;
  }

 private:
  double half_chord(double eps) const {
    double rho = r_ - eps;
    return std::sqrt(std::max(0.0, rho * rho - eps * eps));
  }
  double alpha(double eps) const { return std::asin(std::min(1.0, eps / (r_ - eps))); }

  Vec2 c_;
  double r_, a_;
  Vec2 e_, f_;
};

class SlitDiskShape : public LevelSetShape {
 public:
  SlitDiskShape(Vec2 c, double r) : c_(c), r_(r) {
    if (!(r > 0)) throw ConfigError("slitdisk radius must be positive");
  }
  std::string kind() const override { return "slitdisk"; }
  bool contains(const Vec2& x) const override {
    Vec2 d = x - c_;
    return norm(d) < r_ && !(d.y == 0.0 && d.x >= 0.0);
  }
  bool contains_closure(const Vec2& x) const override { return dist(x, c_) <= r_ + kEdgeTol * scale(); }
  double sdist(const Vec2& x) const override {
    Vec2 d = x - c_;
    double r = norm(d);
    if (r >= r_) return r_ - r;
    if (!contains(x)) return 0.0;
    double ray = d.x >= 0 ? std::abs(d.y) : r;
    return std::min(r_ - r, ray);
  }
  Vec2 grad(const Vec2& x) const override {
    Vec2 d = x - c_;
    double r = norm(d);
    if (r >= r_) return r > 0 ? -d / r : Vec2{};
    double ray = d.x >= 0 ? std::abs(d.y) : r;
    if (r_ - r < ray) return -d / r;
    if (d.x >= 0) return {0.0, d.y >= 0 ? 1.0 : -1.0};
    return r > 0 ? d / r : Vec2{-1.0, 0.0};
  }
  bool ridge(const Vec2& x) const override {
    Vec2 d = x - c_;
    double r = norm(d);
    double ray = d.x >= 0 ? std::abs(d.y) : r;
    return std::abs(ray - (r_ - r)) <= 1e-12 * r_ || (d.x < 0 && std::abs(d.y) <= 1e-12 * r_);
  }
  Box bounds() const override { return Box(c_ - Vec2{r_, r_}, c_ + Vec2{r_, r_}); }
  double max_depth() const override { return 0.5 * r_; }

  int piece_count() const override { return 4; }
  Vec2 piece_point(int k, double eps, double s) const override {
    switch (k) {
      case 0: {
        double rho = r_ - eps, al = alpha(eps);
        double phi = al + s * (2.0 * kPi - 2.0 * al);
        return c_ + Vec2{std::cos(phi), std::sin(phi)} * rho;
      }
      case 1: return c_ + Vec2{half_chord(eps) * s, eps};
      case 2: return c_ + Vec2{half_chord(eps) * s, -eps};
      default: {
        double phi = 0.5 * kPi + s * kPi;
        return c_ + Vec2{std::cos(phi), std::sin(phi)} * eps;
      }
    }
  }
  double piece_speed(int k, double eps, double) const override {
    switch (k) {
      case 0: return (r_ - eps) * (2.0 * kPi - 2.0 * alpha(eps));
      case 1:
      case 2: return half_chord(eps);
      default: return kPi * eps;
    }
  }

  std::vector<BoundaryPiece> pieces(double eps) const override {
    std::vector<BoundaryPiece> out;
    if (eps >= max_depth()) return out;
    BoundaryPiece arc;
    arc.kind = BoundaryPiece::Kind::arc;
    arc.center = c_;
    arc.radius = r_ - eps;
    arc.th0 = alpha(eps);
    arc.th1 = 2.0 * kPi - alpha(eps);
    arc.normal_sign = -1.0;
    arc.id = 0;
    out.push_back(arc);
    double w = half_chord(eps);
    BoundaryPiece up;
    up.a = c_ + Vec2{0.0, eps};
    up.b = c_ + Vec2{w, eps};
    up.id = 1;
    out.push_back(up);
    BoundaryPiece down;
    down.a = c_ + Vec2{0.0, -eps};
    down.b = c_ + Vec2{w, -eps};
    down.normal_sign = -1.0;
    down.id = 2;
    out.push_back(down);
    if (eps > 0) {
      BoundaryPiece cap;
      cap.kind = BoundaryPiece::Kind::arc;
      cap.center = c_;
      cap.radius = eps;
      cap.th0 = 0.5 * kPi;
      cap.th1 = 1.5 * kPi;
      cap.normal_sign = 1.0;
      cap.id = 3;
      out.push_back(cap);
    }
    return out;
  }

 private:
  double half_chord(double eps) const {
    double rho = r_ - eps;
    return std::sqrt(std::max(0.0, rho * rho - eps * eps));
  }
  double alpha(double eps) const { return std::asin(std::min(1.0, eps / (r_ - eps))); }

  Vec2 c_;
  double r_;
};

// ---------------------------------------------------------------------------
// Simple (possibly non-convex) polygon

class PolygonShape : public Shape {
 public:
  explicit PolygonShape(std::vector<Vec2> v) : v_(std::move(v)) {
    if (v_.size() < 3) throw ConfigError("polygon needs at least 3 vertices");
    if (!polygon_is_ccw(v_)) std::reverse(v_.begin(), v_.end());
    for (const auto& t : ear_clip(v_)) {
      auto p = polygon_patches({t[0], t[1], t[2]});
      patches_.insert(patches_.end(), p.begin(), p.end());
    }
    Vec2 lo = v_[0], hi = v_[0];
    for (const Vec2& p : v_) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    bounds_ = Box(lo, hi);
  }
  std::string kind() const override { return "polygon"; }
  bool contains(const Vec2& x) const override { return point_in_polygon(v_, x) && boundary_dist(x, nullptr) > 0; }
  double sdist(const Vec2& x) const override {
    double d = boundary_dist(x, nullptr);
    return point_in_polygon(v_, x) ? d : -d;
  }
  Vec2 grad(const Vec2& x) const override {
    Vec2 q;
    double d = boundary_dist(x, &q);
    if (d <= 0) return Shape::grad(x);
    return point_in_polygon(v_, x) ? (x - q) / d : (q - x) / d;
  }
  Box bounds() const override { return bounds_; }
  std::vector<Patch> area_patches() const override { return patches_; }
  bool ridge_aware() const override { return false; }
  std::vector<BoundaryPiece> pieces(double eps) const override {
    std::vector<BoundaryPiece> cands;
    const std::size_t m = v_.size();
    for (std::size_t i = 0; i < m; ++i) {
      Vec2 a = v_[i], b = v_[(i + 1) % m];
      Vec2 n = normalized(perp(b - a));
      BoundaryPiece s;
      s.a = a + n * eps;
      s.b = b + n * eps;
      s.id = static_cast<int>(i);
      cands.push_back(s);
      if (eps <= 0) continue;
      Vec2 c = v_[(i + 2) % m];
      Vec2 n2 = normalized(perp(c - b));
      if (cross(b - a, c - b) < 0) {
        BoundaryPiece arc;
        arc.kind = BoundaryPiece::Kind::arc;
        arc.center = b;
        arc.radius = eps;
        arc.th0 = std::atan2(n.y, n.x);
        arc.th1 = std::atan2(n2.y, n2.x);
        while (arc.th1 > arc.th0) arc.th1 -= 2.0 * kPi;
        while (arc.th0 - arc.th1 > 2.0 * kPi) arc.th1 += 2.0 * kPi;
        arc.normal_sign = 1.0;
        arc.id = static_cast<int>(m + i);
        cands.push_back(arc);
      }
    }
    if (eps <= 0) return cands;
    double tol = 1e-10 * scale();
    return trim_pieces(cands, [this, eps, tol](const Vec2& x) { return contains(x) && sdist(x) >= eps - tol; });
  }
  Vec2 project(const Vec2& x) const override {
    Vec2 q;
    boundary_dist(x, &q);
    return q;
  }

 private:
  double boundary_dist(const Vec2& x, Vec2* nearest) const {
    double best = 1e300;
    const std::size_t m = v_.size();
    for (std::size_t i = 0; i < m; ++i) {
      Vec2 q;
      double d = seg_dist(x, v_[i], v_[(i + 1) % m], &q);
      if (d < best) {
        best = d;
        if (nearest) *nearest = q;
      }
    }
    return best;
  }

  std::vector<Vec2> v_;
  std::vector<Patch> patches_;
  Box bounds_;
};

// ---------------------------------------------------------------------------
// Composites

class IntersectShape : public Shape {
 public:
  IntersectShape(std::shared_ptr<const Shape> a, std::shared_ptr<const Shape> b) : a_(std::move(a)), b_(std::move(b)) {}
  std::string kind() const override { return "intersect"; }
  bool contains(const Vec2& x) const override { return a_->contains(x) && b_->contains(x); }
  bool contains_closure(const Vec2& x) const override { return a_->contains_closure(x) && b_->contains_closure(x); }
  double sdist(const Vec2& x) const override {
    double da = a_->sdist(x), db = b_->sdist(x);
    return std::min(da, db);
  }
  Vec2 grad(const Vec2& x) const override {
    return a_->sdist(x) <= b_->sdist(x) ? a_->grad(x) : b_->grad(x);
  }
  bool ridge(const Vec2& x) const override {
    return std::abs(a_->sdist(x) - b_->sdist(x)) <= 1e-12 * scale() || a_->ridge(x) || b_->ridge(x);
  }
  bool exterior_exact() const override { return false; }
  Box bounds() const override {
    Box r = a_->bounds().intersect(b_->bounds());
    return r.empty() ? a_->bounds() : r;
  }
  std::vector<Patch> area_patches() const override {
    return a_->bounds().volume() <= b_->bounds().volume() ? a_->area_patches() : b_->area_patches();
  }
  bool cover_exact() const override { return false; }
  bool ridge_aware() const override { return false; }
  std::vector<BoundaryPiece> pieces(double eps) const override {
    double tol = 1e-10 * scale();
    auto pa = trim_pieces(a_->pieces(eps), [&](const Vec2& x) { return b_->contains(x) && b_->sdist(x) >= eps - tol; });
    auto pb = trim_pieces(b_->pieces(eps), [&](const Vec2& x) { return a_->contains(x) && a_->sdist(x) >= eps - tol; });
    for (auto& p : pb) p.id += 1000;
    pa.insert(pa.end(), pb.begin(), pb.end());
    return pa;
  }
  double max_depth() const override { return std::min(Shape::max_depth() * 1.02, std::min(a_->max_depth(), b_->max_depth())); }

 private:
  std::shared_ptr<const Shape> a_, b_;
};

class UnionShape : public Shape {
 public:
  UnionShape(std::shared_ptr<const Shape> a, std::shared_ptr<const Shape> b) : a_(std::move(a)), b_(std::move(b)) {
    Box ba = a_->bounds(), bb = b_->bounds();
    disjoint_ = !ba.intersects(bb);
    if (!disjoint_) {
      const int m = 4096;
      std::vector<Vec2> pts;
      for (const Vec2& p : a_->sample_boundary(m / 2))
        if (!b_->contains(p)) pts.push_back(p);
      for (const Vec2& p : b_->sample_boundary(m / 2))
        if (!a_->contains(p)) pts.push_back(p);
      grid_ = std::make_unique<PointGrid>(std::move(pts));
    }
  }
  std::string kind() const override { return "union"; }
  bool contains(const Vec2& x) const override { return a_->contains(x) || b_->contains(x); }
  bool contains_closure(const Vec2& x) const override { return a_->contains_closure(x) || b_->contains_closure(x); }
  double sdist(const Vec2& x) const override {
    double d;
    if (disjoint_) d = std::min(std::abs(a_->sdist(x)), std::abs(b_->sdist(x)));
    else d = grid_->nearest(x);
    return contains(x) ? d : -d;
  }
  Vec2 grad(const Vec2& x) const override {
    if (disjoint_) return a_->contains(x) ? a_->grad(x) : b_->grad(x);
    return Shape::grad(x);
  }
  bool exterior_exact() const override { return disjoint_; }
  Box bounds() const override {
    Box ba = a_->bounds(), bb = b_->bounds();
    return Box({std::min(ba.lo.x, bb.lo.x), std::min(ba.lo.y, bb.lo.y)},
               {std::max(ba.hi.x, bb.hi.x), std::max(ba.hi.y, bb.hi.y)});
  }
  std::vector<Patch> area_patches() const override {
    if (!disjoint_) return {Patch::rect(bounds())};
    auto p = a_->area_patches();
    auto q = b_->area_patches();
    p.insert(p.end(), q.begin(), q.end());
    return p;
  }
  bool cover_exact() const override { return disjoint_ && a_->cover_exact() && b_->cover_exact(); }
  bool ridge_aware() const override { return false; }
  std::vector<BoundaryPiece> pieces(double eps) const override {
    if (!disjoint_) throw UnsupportedShape("union: level curves of overlapping unions are not available");
    double tol = 1e-10 * scale();
    auto pa = trim_pieces(a_->pieces(eps), [&](const Vec2& x) { return std::abs(b_->sdist(x)) >= eps - tol; });
    auto pb = trim_pieces(b_->pieces(eps), [&](const Vec2& x) { return std::abs(a_->sdist(x)) >= eps - tol; });
    for (auto& p : pb) p.id += 1000;
    pa.insert(pa.end(), pb.begin(), pb.end());
    return pa;
  }
  std::vector<Vec2> sample_boundary(int n) const override {
    auto p = a_->sample_boundary(n / 2);
    auto q = b_->sample_boundary(n / 2);
    std::vector<Vec2> out;
    for (auto& x : p)
      if (!b_->contains(x)) out.push_back(x);
    for (auto& x : q)
      if (!a_->contains(x)) out.push_back(x);
    return out;
  }
  double max_depth() const override {
    if (disjoint_) return std::max(a_->max_depth(), b_->max_depth());
    return Shape::max_depth();
  }

 private:
  std::shared_ptr<const Shape> a_, b_;
  bool disjoint_ = false;
  std::unique_ptr<PointGrid> grid_;
};

// Window minus the closure of a shape.
class ComplementShape : public Shape {
 public:
  ComplementShape(Box w, std::shared_ptr<const Shape> a) : w_(w), a_(std::move(a)) {
    if (auto cp = std::dynamic_pointer_cast<const ConvexPolygonShape>(a_)) {
      // Disjoint convex decomposition: piece i lies outside edge i and inside edges j < i.
      const auto& n = cp->normals();
      const auto& c = cp->offsets();
      for (std::size_t i = 0; i < n.size(); ++i) {
        auto poly = clip_halfplane(box_polygon(w_), -n[i], -c[i]);
        for (std::size_t j = 0; j < i && poly.size() >= 3; ++j) poly = clip_halfplane(poly, n[j], c[j]);
        if (poly.size() < 3) continue;
        auto p = polygon_patches(poly);
        patches_.insert(patches_.end(), p.begin(), p.end());
      }
      exact_ = true;
    } else if (auto hp = std::dynamic_pointer_cast<const HalfPlaneShape>(a_)) {
      patches_ = polygon_patches(clip_halfplane(box_polygon(w_), -hp->normal(), -hp->offset_value()));
      exact_ = true;
    } else {
      patches_.push_back(Patch::rect(w_));
    }
  }
  std::string kind() const override { return "complement"; }
  bool contains(const Vec2& x) const override { return w_.contains_open(x) && !a_->contains_closure(x); }
  bool contains_closure(const Vec2& x) const override { return w_.contains(x) && !a_->contains(x); }
  double sdist(const Vec2& x) const override {
    double dw = box_inner_dist(w_, x), da = -a_->sdist(x);
    if (contains(x)) return std::min(dw, da);
    return std::min(dw, da) <= 0 ? std::min(dw, da) : 0.0;
  }
  Vec2 grad(const Vec2& x) const override {
    double dw = box_inner_dist(w_, x), da = -a_->sdist(x);
    if (da < dw) return -a_->grad(x);
    double d[4] = {x.x - w_.lo.x, w_.hi.x - x.x, x.y - w_.lo.y, w_.hi.y - x.y};
    const Vec2 n[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
    return n[std::min_element(d, d + 4) - d];
  }
  bool exterior_exact() const override { return false; }
  Box bounds() const override { return w_; }
  std::vector<Patch> area_patches() const override { return patches_; }
  bool cover_exact() const override { return exact_; }
  bool ridge_aware() const override { return false; }

 private:
  Box w_;
  std::shared_ptr<const Shape> a_;
  std::vector<Patch> patches_;
  bool exact_ = false;
};

// U^eps for a generic shape: d_{U^eps} = d_U - eps holds for every open set.
class OffsetShape : public Shape {
 public:
  OffsetShape(std::shared_ptr<const Shape> base, double eps) : base_(std::move(base)), eps_(eps) {}
  std::string kind() const override { return base_->kind() + "-offset"; }
  bool contains(const Vec2& x) const override { return base_->contains(x) && base_->sdist(x) > eps_; }
  bool contains_closure(const Vec2& x) const override {
    return base_->contains_closure(x) && base_->sdist(x) >= eps_ - kEdgeTol * scale();
  }
  double sdist(const Vec2& x) const override { return base_->sdist(x) - eps_; }
  Vec2 grad(const Vec2& x) const override { return base_->grad(x); }
  bool ridge(const Vec2& x) const override { return base_->ridge(x); }
  bool exterior_exact() const override { return false; }
  Box bounds() const override { return base_->bounds(); }
  std::vector<Patch> area_patches() const override { return base_->shell_patches(eps_, base_->max_depth()); }
  bool cover_exact() const override { return base_->exact_shells(); }
  bool ridge_aware() const override { return base_->ridge_aware(); }
  std::vector<Patch> shell_patches(double e1, double e2) const override {
    return base_->shell_patches(e1 + eps_, e2 + eps_);
  }
  bool exact_shells() const override { return base_->exact_shells(); }
  std::vector<BoundaryPiece> pieces(double e) const override { return base_->pieces(e + eps_); }
  double max_depth() const override { return std::max(0.0, base_->max_depth() - eps_); }
  std::vector<double> level_breaks() const override {
    std::vector<double> out;
    for (double b : base_->level_breaks())
      if (b > eps_) out.push_back(b - eps_);
    return out;
  }

 private:
  std::shared_ptr<const Shape> base_;
  double eps_;
};

}  // namespace

std::shared_ptr<const Shape> Shape::offset(double eps) const {
  if (eps == 0) return shared_from_this();
  if (auto b = dynamic_cast<const BallShape*>(this))
    if (b->radius() > eps) return std::make_shared<BallShape>(b->center(), b->radius() - eps);
  if (auto h = dynamic_cast<const HalfPlaneShape*>(this))
    return std::make_shared<HalfPlaneShape>(h->normal(), h->offset_value() + eps, h->window());
  if (auto p = dynamic_cast<const ConvexPolygonShape*>(this)) {
    auto inner = p->inner_polygon(eps);
    if (inner.size() >= 3) return std::make_shared<ConvexPolygonShape>(inner, p->kind());
  }
  return std::make_shared<OffsetShape>(shared_from_this(), eps);
}

// ---------------------------------------------------------------------------
// OpenSet

OpenSet OpenSet::box(const Box& b) {
  if (b.empty()) throw ConfigError("box: lo must be below hi in every coordinate");
  return OpenSet(std::make_shared<ConvexPolygonShape>(box_polygon(b), "box"));
}

OpenSet OpenSet::ball(Vec2 center, double radius) { return OpenSet(std::make_shared<BallShape>(center, radius)); }

OpenSet OpenSet::halfplane(Vec2 normal, double offset, const Box& window) {
  return OpenSet(std::make_shared<HalfPlaneShape>(normal, offset, window));
}

OpenSet OpenSet::polygon(const std::vector<Vec2>& vertices) {
  if (vertices.size() < 3) throw ConfigError("polygon needs at least 3 vertices");
  std::vector<Vec2> v = vertices;
  if (!polygon_is_ccw(v)) std::reverse(v.begin(), v.end());
  if (polygon_is_convex(v)) return OpenSet(std::make_shared<ConvexPolygonShape>(v, "polygon"));
  return OpenSet(std::make_shared<PolygonShape>(v));
}

OpenSet OpenSet::halfdisk(Vec2 center, double radius, double angle) {
  return OpenSet(std::make_shared<HalfDiskShape>(center, radius, angle));
}

OpenSet OpenSet::slitdisk(Vec2 center, double radius) { return OpenSet(std::make_shared<SlitDiskShape>(center, radius)); }

OpenSet OpenSet::intersect(const OpenSet& a, const OpenSet& b) {
  // Convex pieces intersect exactly into another convex polygon.
  auto as_poly = [](const Shape& s) -> std::vector<Vec2> {
    if (auto p = dynamic_cast<const ConvexPolygonShape*>(&s)) return p->vertices();
    if (auto h = dynamic_cast<const HalfPlaneShape*>(&s)) return h->polygon(0.0);
    return {};
  };
  auto pa = as_poly(a.shape()), pb = as_poly(b.shape());
  bool halfa = dynamic_cast<const HalfPlaneShape*>(&a.shape()) != nullptr;
  bool halfb = dynamic_cast<const HalfPlaneShape*>(&b.shape()) != nullptr;
  // A half-plane's window walls are not boundary, so only polygon∩polygon or polygon∩halfplane
  // (with the polygon inside the window) are collapsed.
  if (pa.size() >= 3 && pb.size() >= 3 && !(halfa && halfb)) {
    const std::vector<Vec2>& poly = halfa ? pb : pa;
    const Shape& other = halfa ? a.shape() : b.shape();
    bool inside_window = true;
    if (halfa || halfb) {
      auto h = dynamic_cast<const HalfPlaneShape*>(halfa ? &a.shape() : &b.shape());
      for (const Vec2& v : poly) inside_window = inside_window && h->window().contains(v);
    }
    (void)other;
    if (inside_window) {
      auto clipped = clip_convex(pa, pb);
      if (clipped.size() < 3) throw ConfigError("intersect: the two sets do not overlap");
      return OpenSet(std::make_shared<ConvexPolygonShape>(clipped, "polygon"));
    }
  }
  return OpenSet(std::make_shared<IntersectShape>(a.shape_ptr(), b.shape_ptr()));
}

OpenSet OpenSet::unite(const OpenSet& a, const OpenSet& b) {
  return OpenSet(std::make_shared<UnionShape>(a.shape_ptr(), b.shape_ptr()));
}

OpenSet OpenSet::complement(const Box& window, const OpenSet& a) {
  return OpenSet(std::make_shared<ComplementShape>(window, a.shape_ptr()));
}

std::string OpenSet::kind() const { return s_->kind(); }
bool OpenSet::contains(const Vec2& x) const { return s_->contains(x); }
bool OpenSet::contains_closure(const Vec2& x) const { return s_->contains_closure(x); }
double OpenSet::dist(const Vec2& x) const { return std::abs(s_->sdist(x)); }
double OpenSet::depth(const Vec2& x) const { return s_->sdist(x); }
Vec2 OpenSet::grad_dist(const Vec2& x) const { return s_->grad(x); }

Vec2 OpenSet::grad_dist_sample(const Vec2& x, bool* on_ridge) const {
  bool r = s_->ridge(x);
  if (on_ridge) *on_ridge = r;
  if (!r) return s_->grad(x);
  // deterministic jitter from the coordinate bits
  std::size_t h = std::hash<double>{}(x.x) ^ (std::hash<double>{}(x.y) * 0x9e3779b97f4a7c15ULL);
  double ang = static_cast<double>(h % 100000) / 100000.0 * 2.0 * kPi;
  return s_->grad(x + Vec2{std::cos(ang), std::sin(ang)} * (1e-12 * s_->scale()));
}

OpenSet OpenSet::interior(double eps) const {
  if (eps < 0) throw PreconditionError("interior: eps must be non-negative");
  return OpenSet(s_->offset(eps));
}

std::vector<Patch> OpenSet::area_patches() const { return s_->area_patches(); }
std::vector<Patch> OpenSet::shell_patches(double e1, double e2) const {
  if (!(e2 > e1)) throw PreconditionError("shell: eps1 must be below eps2");
  return s_->shell_patches(e1, e2);
}
bool OpenSet::exact_patches() const { return s_->ridge_aware() && s_->cover_exact(); }
bool OpenSet::exact_shells() const { return s_->exact_shells(); }

std::vector<BoundaryPiece> OpenSet::boundary(double eps) const { return s_->pieces(eps); }

BoundaryQuadrature OpenSet::boundary_quadrature(double eps, int panels, int order) const {
  BoundaryQuadrature q;
  const GaussRule& r = gauss_legendre(order);
  for (const BoundaryPiece& p : s_->pieces(eps)) {
    double h = 1.0 / panels;
    for (int k = 0; k < panels; ++k) {
      double a = k * h;
      for (std::size_t i = 0; i < r.nodes.size(); ++i) {
        double s = a + 0.5 * h * (r.nodes[i] + 1.0);
        q.points.push_back(p.point(s));
        q.weights.push_back(0.5 * h * r.weights[i] * p.speed(s));
        q.normals.push_back(p.normal(s));
      }
    }
  }
  return q;
}

double OpenSet::max_depth() const { return s_->max_depth(); }
std::vector<double> OpenSet::level_breaks() const { return s_->level_breaks(); }
Box OpenSet::bounds() const { return s_->bounds(); }
Vec2 OpenSet::project(const Vec2& x) const { return s_->project(x); }
std::vector<Vec2> OpenSet::sample_boundary(int n) const { return s_->sample_boundary(n); }

MeasureDomain OpenSet::as_domain(bool closed) const {
  return (closed ? Region::closed(*this) : Region::open(*this)).domain();
}

// ---------------------------------------------------------------------------
// Regions

Region Region::shell(const OpenSet& u, double e1, double e2) {
  if (!(e2 > e1) || e1 < 0) throw PreconditionError("shell: need 0 <= eps1 < eps2");
  return {Mode::shell, u, e1, e2, {}};
}

Region shell(const OpenSet& u, double e1, double e2) { return Region::shell(u, e1, e2); }

bool Region::contains(const Vec2& x) const {
  switch (mode) {
    case Mode::open: return set.contains(x);
    case Mode::closed: return set.contains_closure(x);
    case Mode::shell: {
      if (!set.contains(x)) return false;
      double d = set.depth(x);
      return d > e1 && d <= e2;
    }
    case Mode::exterior: return window.contains(x) && !set.contains_closure(x);
  }
  return false;
}

std::vector<Patch> Region::cells() const {
  switch (mode) {
    case Mode::open:
    case Mode::closed: return set.area_patches();
    case Mode::shell: return set.shell_patches(e1, e2);
    case Mode::exterior: return OpenSet::complement(window, set).area_patches();
  }
  return {};
}

bool Region::exact() const {
  switch (mode) {
    case Mode::open:
    case Mode::closed: return set.shape().cover_exact();
    case Mode::shell: return set.exact_shells();
    case Mode::exterior: return OpenSet::complement(window, set).shape().cover_exact();
  }
  return false;
}

MeasureDomain Region::domain() const {
  MeasureDomain d;
  Region self = *this;
  d.contains = [self](const Vec2& x) { return self.contains(x); };
  if (exact()) d.cells = cells();
  d.name = set.kind();
  return d;
}

// ---------------------------------------------------------------------------
// Good cubes

GoodCubeResult sample_good_cube(const Cube& q, const RadonMeasure& mu, std::uint64_t seed, const GoodCubeOptions& opt) {
  if (!(q.b.x > q.a.x && q.b.y > q.a.y)) throw PreconditionError("cube: need a < b componentwise");
  const double side = std::min(q.b.x - q.a.x, q.b.y - q.a.y);
  const double rad = opt.radius > 0 ? opt.radius : 0.05 * side;
  const double tol = 1e-9 * side;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double mass = std::max(1.0, total_variation(mu));

  for (int draw = 1; draw <= opt.max_draws; ++draw) {
    Vec2 x;
    do {
      x = {unif(rng), unif(rng)};
    } while (dot(x, x) > 1.0);
    x *= rad;
    Cube c = q.translated(x);
    if (!mu.box().contains(c.a) || !mu.box().contains(c.b)) {
      // the cube may poke out of a tight support box; that is fine for zero-extended measures
    }
    auto on_face_line = [&](const Vec2& p) {
      return std::abs(p.x - c.a.x) < tol || std::abs(p.x - c.b.x) < tol || std::abs(p.y - c.a.y) < tol ||
             std::abs(p.y - c.b.y) < tol;
    };
    bool bad = false;
    for (const Atom& a : mu.atoms())
      if (on_face_line(a.x)) bad = true;
    for (const CurvePart& cp : mu.curves()) {
      // a curve running along a face line puts positive mass on the face hyperplane
      int run = 0;
      for (int i = 0; i <= 256 && !bad; ++i) {
        Vec2 p = cp.gamma(cp.t0 + (cp.t1 - cp.t0) * i / 256.0);
        run = on_face_line(p) ? run + 1 : 0;
        if (run >= 3) bad = true;
      }
    }
    if (bad) continue;

    std::vector<double> ladder;
    auto corners = c.corners();
    for (int k = 0; k < opt.rungs; ++k) {
      double eps = opt.eps0 * side * std::pow(0.5, k);
      double worst = 0.0;
      for (int j = 0; j < 4; ++j) {
        Vec2 p = corners[static_cast<std::size_t>(j)];
        double r = 2.0 * eps;
        MeasureDomain dom;
        Cube cc = c;
        dom.contains = [p, r, cc](const Vec2& y) {
          return dist(y, p) < r && y.x > cc.a.x && y.x < cc.b.x && y.y > cc.a.y && y.y < cc.b.y;
        };
        dom.cells.push_back(Patch::polar(p, 0.0, r, j * 0.5 * kPi, (j + 1) * 0.5 * kPi));
        worst = std::max(worst, total_variation(mu, dom) / eps);
      }
      ladder.push_back(worst);
    }
    if (ladder.back() <= opt.tolerance * mass) return {c, draw, ladder};
  }
  throw NumericalError("measure concentrates on all sampled skeletons");
}

// ---------------------------------------------------------------------------

TestFunction distance_function(const OpenSet& u) {
  TestFunction f;
  f.value = [u](const Vec2& x) { return u.contains(x) ? u.depth(x) : 0.0; };
  f.grad = [u](const Vec2& x) { return u.contains(x) ? u.grad_dist(x) : Vec2{}; };
  f.lip = 1.0;
  f.support = u.bounds();
  f.tag = TestTag::lipschitz;
  f.name = "dist_" + u.kind();
  if (u.exact_patches()) f.grad_cells = u.area_patches();
  return f;
}

}  // namespace dmf
