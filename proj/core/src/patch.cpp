#include "dmfield/patch.hpp"

namespace dmf {

Patch Patch::rect(const Box& b) {
  Patch p;
  p.base_ = Base::identity;
  p.domain_ = Domain::rect;
  p.d0_ = b.lo;
  p.d1_ = b.hi;
  return p;
}

Patch Patch::triangle(Vec2 apex, Vec2 b, Vec2 c) {
  Patch p;
  p.base_ = Base::identity;
  p.domain_ = Domain::duffy;
  p.d0_ = apex;
  p.d1_ = b;
  p.d2_ = c;
  return p;
}

Patch Patch::polar(Vec2 center, double r0, double r1, double th0, double th1) {
  Patch p;
  p.base_ = Base::polar;
  p.domain_ = Domain::rect;
  p.center_ = center;
  p.d0_ = {r0, th0};
  p.d1_ = {r1, th1};
  return p;
}

Patch Patch::levelset(std::shared_ptr<const LevelSetFamily> fam, int piece, double e0, double e1) {
  Patch p;
  p.base_ = Base::levelset;
  p.domain_ = Domain::rect;
  p.fam_ = std::move(fam);
  p.piece_ = piece;
  p.d0_ = {e0, 0.0};
  p.d1_ = {e1, 1.0};
  return p;
}

Patch Patch::quad(Vec2 a, Vec2 b, Vec2 c, Vec2 d) {
  Patch p;
  p.base_ = Base::bilinear;
  p.domain_ = Domain::rect;
  p.corners_[0] = a;
  p.corners_[1] = b;
  p.corners_[2] = c;
  p.corners_[3] = d;
  p.d0_ = {0.0, 0.0};
  p.d1_ = {1.0, 1.0};
  return p;
}

double Patch::base_map(Vec2 q, Vec2& x) const {
  switch (base_) {
    case Base::identity:
      x = q;
      return 1.0;
    case Base::polar:
      x = center_ + Vec2{std::cos(q.y), std::sin(q.y)} * q.x;
      return std::abs(q.x);
    case Base::levelset:
      x = fam_->piece_point(piece_, q.x, q.y);
      return fam_->piece_speed(piece_, q.x, q.y);
    case Base::bilinear: {
      double u = q.x, v = q.y;
      const Vec2* c = corners_;
      x = c[0] * ((1 - u) * (1 - v)) + c[1] * (u * (1 - v)) + c[2] * (u * v) + c[3] * ((1 - u) * v);
      Vec2 du = (c[1] - c[0]) * (1 - v) + (c[2] - c[3]) * v;
      Vec2 dv = (c[3] - c[0]) * (1 - u) + (c[2] - c[1]) * u;
      return std::abs(cross(du, dv));
    }
  }
  return 0.0;
}

double Patch::map(double s, double t, Vec2& x) const {
  Vec2 q;
  double jd;
  if (domain_ == Domain::rect) {
    q = {d0_.x + s * (d1_.x - d0_.x), d0_.y + t * (d1_.y - d0_.y)};
    jd = std::abs((d1_.x - d0_.x) * (d1_.y - d0_.y));
  } else {
    Vec2 e1 = d1_ - d0_, e2 = d2_ - d1_;
    q = d0_ + e1 * s + e2 * (s * t);
    jd = s * std::abs(cross(e1, e2));
  }
  return jd * base_map(q, x);
}

bool Patch::base_inverse(const Vec2& x, Vec2& q) const {
  switch (base_) {
    case Base::identity:
      q = x;
      return true;
    case Base::polar: {
      Vec2 r = x - center_;
      double rad = norm(r);
      if (rad < 1e-14) return false;
      double th = std::atan2(r.y, r.x);
      double lo = std::min(d0_.y, d1_.y);
      while (th < lo - 1e-12) th += 2 * kPi;
      while (th > lo + 2 * kPi) th -= 2 * kPi;
      q = {rad, th};
      return true;
    }
    case Base::levelset:
      return false;
    case Base::bilinear: {
      Vec2 uv{0.5, 0.5};
      for (int it = 0; it < 50; ++it) {
        Vec2 y;
        base_map(uv, y);
        const Vec2* c = corners_;
        double u = uv.x, v = uv.y;
        Vec2 du = (c[1] - c[0]) * (1 - v) + (c[2] - c[3]) * v;
        Vec2 dv = (c[3] - c[0]) * (1 - u) + (c[2] - c[1]) * u;
        double det = cross(du, dv);
        if (std::abs(det) < 1e-300) return false;
        Vec2 r = x - y;
        Vec2 step{cross(r, dv) / det, cross(du, r) / det};
        uv += step;
        if (norm(step) < 1e-15) break;
      }
      q = uv;
      return true;
    }
  }
  return false;
}

std::vector<Patch> Patch::split_at(const Vec2& p) const {
  Vec2 q;
  if (!base_inverse(p, q)) return {*this};
  std::vector<Patch> out;
  auto make = [&](Vec2 a, Vec2 b, Vec2 c) {
    Patch np = *this;
    np.domain_ = Domain::duffy;
    np.d0_ = a;
    np.d1_ = b;
    np.d2_ = c;
    return np;
  };
  if (domain_ == Domain::rect) {
    Vec2 lo{std::min(d0_.x, d1_.x), std::min(d0_.y, d1_.y)};
    Vec2 hi{std::max(d0_.x, d1_.x), std::max(d0_.y, d1_.y)};
    double tx = 1e-13 * (hi.x - lo.x), ty = 1e-13 * (hi.y - lo.y);
    if (q.x < lo.x - tx || q.x > hi.x + tx || q.y < lo.y - ty || q.y > hi.y + ty) return {*this};
    q.x = std::clamp(q.x, lo.x, hi.x);
    q.y = std::clamp(q.y, lo.y, hi.y);
    double xs[3] = {lo.x, q.x, hi.x}, ys[3] = {lo.y, q.y, hi.y};
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double x0 = xs[i], x1 = xs[i + 1], y0 = ys[j], y1 = ys[j + 1];
        if (x1 - x0 <= tx || y1 - y0 <= ty) continue;
        Vec2 c[4] = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
        static const int corner_of_q[2][2] = {{2, 1}, {3, 0}};
        int k = corner_of_q[i][j];
        out.push_back(make(c[k], c[(k + 1) % 4], c[(k + 2) % 4]));
        out.push_back(make(c[k], c[(k + 2) % 4], c[(k + 3) % 4]));
      }
    if (out.empty()) return {*this};
    return out;
  }
  Vec2 A = d0_, B = d1_, C = d2_;
  double total = std::abs(cross(B - A, C - A));
  double l1 = cross(B - A, q - A), l2 = cross(C - B, q - B), l3 = cross(A - C, q - C);
  double tol = 1e-12 * total;
  bool inside = (l1 >= -tol && l2 >= -tol && l3 >= -tol) || (l1 <= tol && l2 <= tol && l3 <= tol);
  if (!inside) return {*this};
  Vec2 tri[3][3] = {{q, A, B}, {q, B, C}, {q, C, A}};
  for (auto& t : tri) {
    if (std::abs(cross(t[1] - t[0], t[2] - t[0])) <= 1e-12 * total) continue;
    out.push_back(make(t[0], t[1], t[2]));
  }
  if (out.empty()) return {*this};
  return out;
}

Box Patch::bounds() const {
  Vec2 lo{1e300, 1e300}, hi{-1e300, -1e300};
  const int n = 9;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Vec2 x;
      map(double(i) / (n - 1), double(j) / (n - 1), x);
      lo = {std::min(lo.x, x.x), std::min(lo.y, x.y)};
      hi = {std::max(hi.x, x.x), std::max(hi.y, x.y)};
    }
  double m = 0.05 * std::max(hi.x - lo.x, hi.y - lo.y) + 1e-12;
  return Box(lo, hi).grown(m);
}

std::vector<Patch> split_patches(std::vector<Patch> patches, const std::vector<Vec2>& points) {
  for (const Vec2& p : points) {
    std::vector<Patch> next;
    for (const Patch& pa : patches) {
      auto parts = pa.split_at(p);
      next.insert(next.end(), parts.begin(), parts.end());
    }
    patches = std::move(next);
  }
  return patches;
}

double polygon_area(const std::vector<Vec2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += cross(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

std::vector<Patch> polygon_patches(const std::vector<Vec2>& poly) {
  std::vector<Patch> out;
  if (poly.size() < 3) return out;
  double total = std::abs(polygon_area(poly));
  if (total <= 0) return out;
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    if (std::abs(cross(poly[i] - poly[0], poly[i + 1] - poly[0])) <= 1e-14 * total) continue;
    out.push_back(Patch::triangle(poly[0], poly[i], poly[i + 1]));
  }
  return out;
}

std::vector<Vec2> clip_halfplane(const std::vector<Vec2>& poly, Vec2 n, double c) {
  std::vector<Vec2> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % m];
    double fa = dot(n, a) - c, fb = dot(n, b) - c;
    if (fa >= 0) out.push_back(a);
    if ((fa >= 0) != (fb >= 0)) {
      double t = fa / (fa - fb);
      out.push_back(a + (b - a) * t);
    }
  }
  // drop consecutive duplicates
  std::vector<Vec2> clean;
  for (const Vec2& p : out)
    if (clean.empty() || dist(clean.back(), p) > 1e-15) clean.push_back(p);
  while (clean.size() > 1 && dist(clean.front(), clean.back()) <= 1e-15) clean.pop_back();
  return clean;
}

std::vector<Vec2> box_polygon(const Box& b) { return {b.lo, {b.hi.x, b.lo.y}, b.hi, {b.lo.x, b.hi.y}}; }

std::vector<Vec2> clip_convex(const std::vector<Vec2>& poly, const std::vector<Vec2>& convex_clip) {
  std::vector<Vec2> out = poly;
  for (std::size_t i = 0; i < convex_clip.size() && out.size() >= 3; ++i) {
    Vec2 a = convex_clip[i], b = convex_clip[(i + 1) % convex_clip.size()];
    Vec2 n = perp(b - a);
    out = clip_halfplane(out, n, dot(n, a));
  }
  if (out.size() < 3) out.clear();
  return out;
}

}  // namespace dmf
