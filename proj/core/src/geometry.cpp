#include "pyramask/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pyramask {

namespace {

// Relative singularity threshold for 2x2 determinants: |det| is compared
// against this times the product of the operand norms, which makes the
// test equivalent to a bound on the sine of the angle between them.
constexpr double kSingularSin = 1e-12;

// Geometric coincidence threshold (distances, unit-normal cross products).
constexpr double kCoincident = 1e-9;

double shoelace_twice(const std::array<Point2, 4>& v) {
  double s = 0.0;
  for (size_t i = 0; i < 4; ++i) {
    s += cross(v[i], v[(i + 1) % 4]);
  }
  return s;
}

double polygon_area(const std::vector<Point2>& poly) {
  if (poly.size() < 3) return 0.0;
  double s = 0.0;
  for (size_t i = 0; i < poly.size(); ++i) {
    s += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return std::abs(s) * 0.5;
}

// Clip a polygon against the half-plane left of the directed edge a -> b.
// Points on the edge count as inside, so clipping a polygon by its own
// edges returns it unchanged.
std::vector<Point2> clip_halfplane(const std::vector<Point2>& poly, Point2 a,
                                   Point2 b) {
  std::vector<Point2> out;
  const size_t n = poly.size();
  if (n == 0) return out;
  out.reserve(n + 1);
  const Point2 edge = b - a;
  for (size_t i = 0; i < n; ++i) {
    const Point2& prev = poly[(i + n - 1) % n];
    const Point2& cur = poly[i];
    const double sp = cross(edge, prev - a);
    const double sc = cross(edge, cur - a);
    const bool prev_in = sp >= 0.0;
    const bool cur_in = sc >= 0.0;
    if (prev_in != cur_in) {
      const double t = sp / (sp - sc);
      out.push_back(prev + t * (cur - prev));
    }
    if (cur_in) out.push_back(cur);
  }
  return out;
}

}  // namespace

double norm(Point2 p) { return std::hypot(p.x, p.y); }

bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

bool is_finite(Point3 p) {
  return std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z);
}

bool Box::valid() const {
  return std::isfinite(x0) && std::isfinite(y0) && std::isfinite(x1) &&
         std::isfinite(y1) && x1 > x0 && y1 > y0;
}

std::array<Point2, 4> Box::corners() const {
  return {Point2{x0, y0}, Point2{x1, y0}, Point2{x1, y1}, Point2{x0, y1}};
}

double Plane::distance(const Point3& p) const {
  const double r = a * p.x + b * p.y + p.z + d;
  return std::abs(r) / std::sqrt(a * a + b * b + 1.0);
}

Quad::Quad(const std::array<Point2, 4>& vertices) : v_(vertices) {
  for (const auto& p : v_) {
    if (!is_finite(p)) throw DegenerateQuad("quad vertex is not finite");
  }
  // Orient to positive shoelace area; reversing the cycle keeps v_[0] first.
  if (shoelace_twice(v_) < 0.0) std::swap(v_[1], v_[3]);
  // Canonical start vertex: minimal (y, x).
  size_t start = 0;
  for (size_t i = 1; i < 4; ++i) {
    if (v_[i].y < v_[start].y ||
        (v_[i].y == v_[start].y && v_[i].x < v_[start].x)) {
      start = i;
    }
  }
  std::rotate(v_.begin(), v_.begin() + start, v_.end());
  // The vertex centroid must strictly see every edge. This single check
  // implies the quad is simple, has positive area, and supports the
  // unique four-sector decomposition around its center.
  const Point2 o = 0.25 * (v_[0] + v_[1] + v_[2] + v_[3]);
  for (size_t i = 0; i < 4; ++i) {
    const Point2& s = v_[i];
    const Point2& e = v_[(i + 1) % 4];
    if (cross(e - s, o - s) <= 0.0) {
      throw DegenerateQuad("quad is not star-shaped about its centroid");
    }
  }
}

double Quad::area() const { return 0.5 * shoelace_twice(v_); }

bool Quad::is_convex() const {
  for (size_t i = 0; i < 4; ++i) {
    const Point2 e1 = v_[(i + 1) % 4] - v_[i];
    const Point2 e2 = v_[(i + 2) % 4] - v_[(i + 1) % 4];
    const double n1 = norm(e1);
    const double n2 = norm(e2);
    if (n1 == 0.0 || n2 == 0.0) return false;
    if (cross(e1, e2) / (n1 * n2) < -kSingularSin) return false;
  }
  return true;
}

Box Quad::bounding_box() const {
  Box b{v_[0].x, v_[0].y, v_[0].x, v_[0].y};
  for (const auto& p : v_) {
    b.x0 = std::min(b.x0, p.x);
    b.y0 = std::min(b.y0, p.y);
    b.x1 = std::max(b.x1, p.x);
    b.y1 = std::max(b.y1, p.y);
  }
  return b;
}

Point2 quad_center(const Quad& q) {
  const auto& v = q.vertices();
  return 0.25 * (v[0] + v[1] + v[2] + v[3]);
}

Decomposition decompose(Point2 o, Point2 m, Point2 n, Point2 p) {
  const Point2 u = m - o;
  const Point2 w = n - o;
  const double nu = norm(u);
  const double nw = norm(w);
  const double det = cross(u, w);
  if (nu == 0.0 || nw == 0.0 || std::abs(det) <= kSingularSin * nu * nw) {
    throw SingularDecomposition("rays OM and ON are linearly dependent");
  }
  const Point2 rhs = p - o;
  return {cross(rhs, w) / det, cross(u, rhs) / det};
}

Plane plane_through(const Point3& p1, const Point3& p2, const Point3& p3) {
  const Point2 u{p2.x - p1.x, p2.y - p1.y};
  const Point2 w{p3.x - p1.x, p3.y - p1.y};
  const double nu = norm(u);
  const double nw = norm(w);
  const double det = cross(u, w);
  if (nu == 0.0 || nw == 0.0 || std::abs(det) <= kSingularSin * nu * nw) {
    throw DegeneratePlane(
        "points are collinear in the xy projection; plane is vertical or "
        "undefined");
  }
  const double dz1 = p2.z - p1.z;
  const double dz2 = p3.z - p1.z;
  Plane pl;
  pl.a = (-dz1 * w.y + dz2 * u.y) / det;
  pl.b = (-dz2 * u.x + dz1 * w.x) / det;
  pl.d = -(pl.a * p1.x + pl.b * p1.y + p1.z);
  return pl;
}

Line2 plane_base_intersection(const Plane& plane) {
  const double n = std::hypot(plane.a, plane.b);
  if (n <= kSingularSin) {
    throw HorizontalPlane("plane is parallel to the base plane z = 0");
  }
  return {plane.a / n, plane.b / n, plane.d / n};
}

Point2 line_intersection(const Line2& l1, const Line2& l2) {
  // Normals are unit, so det is the sine of the angle between the lines.
  const double det = l1.p * l2.q - l2.p * l1.q;
  if (std::abs(det) <= kCoincident) {
    throw ParallelLines("lines are (near-)parallel");
  }
  return {(-l1.r * l2.q + l2.r * l1.q) / det,
          (-l1.p * l2.r + l2.p * l1.r) / det};
}

double polygon_iou(const Quad& q1, const Quad& q2) {
  if (!q1.is_convex() || !q2.is_convex()) {
    throw NonConvexInput("polygon_iou requires convex quadrilaterals");
  }
  std::vector<Point2> inter(q1.vertices().begin(), q1.vertices().end());
  const auto& clip = q2.vertices();
  for (size_t i = 0; i < 4 && !inter.empty(); ++i) {
    inter = clip_halfplane(inter, clip[i], clip[(i + 1) % 4]);
  }
  const double ai = polygon_area(inter);
  const double au = q1.area() + q2.area() - ai;
  if (au <= 0.0) return 0.0;
  return std::clamp(ai / au, 0.0, 1.0);
}

std::vector<Point2> convex_hull(std::vector<Point2> points) {
  std::sort(points.begin(), points.end(), [](Point2 a, Point2 b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  points.erase(std::unique(points.begin(), points.end(),
                           [](Point2 a, Point2 b) {
                             return a.x == b.x && a.y == b.y;
                           }),
               points.end());
  const size_t n = points.size();
  if (n < 3) return points;
  std::vector<Point2> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {  // lower chain
    while (k >= 2 && cross(hull[k - 1] - hull[k - 2],
                           points[i] - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = points[i];
  }
  for (size_t i = n - 1, lower = k + 1; i-- > 0;) {  // upper chain
    while (k >= lower && cross(hull[k - 1] - hull[k - 2],
                               points[i] - hull[k - 2]) <= 0.0) {
      --k;
    }
    hull[k++] = points[i];
  }
  hull.resize(k - 1);
  return hull;
}

Quad min_area_rect(const std::vector<Point2>& points) {
  if (points.size() < 3) {
    throw DegenerateInput("min_area_rect needs at least 3 points");
  }
  const std::vector<Point2> hull = convex_hull(points);
  if (hull.size() < 3) {
    throw DegenerateInput("min_area_rect input is collinear");
  }
  double best_area = std::numeric_limits<double>::infinity();
  std::array<Point2, 4> best{};
  for (size_t i = 0; i < hull.size(); ++i) {
    const Point2& p = hull[i];
    const Point2& q = hull[(i + 1) % hull.size()];
    const double len = norm(q - p);
    if (len == 0.0) continue;
    const Point2 u{(q.x - p.x) / len, (q.y - p.y) / len};
    const Point2 nrm{-u.y, u.x};
    double smin = 0.0, smax = 0.0, tmin = 0.0, tmax = 0.0;
    for (const auto& h : hull) {
      const Point2 rel = h - p;
      const double s = dot(rel, u);
      const double t = dot(rel, nrm);
      smin = std::min(smin, s);
      smax = std::max(smax, s);
      tmin = std::min(tmin, t);
      tmax = std::max(tmax, t);
    }
    const double area = (smax - smin) * (tmax - tmin);
    if (area < best_area) {
      best_area = area;
      best = {p + smin * u + tmin * nrm, p + smax * u + tmin * nrm,
              p + smax * u + tmax * nrm, p + smin * u + tmax * nrm};
    }
  }
  if (!std::isfinite(best_area) || best_area <= 0.0) {
    throw DegenerateInput("min_area_rect input is collinear");
  }
  return Quad(best);
}

}  // namespace pyramask
