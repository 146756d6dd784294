#pragma once

#include <array>
#include <vector>

#include "pyramask/errors.hpp"

namespace pyramask {

// Image convention throughout: x grows to the right, y grows downward.
// "Counter-clockwise" refers to the orientation with positive shoelace
// area in raw (x, y) coordinates, i.e. the reading order top-left,
// top-right, bottom-right, bottom-left for an axis-aligned box.

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 p) { return {s * p.x, s * p.y}; }

inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
double norm(Point2 p);
bool is_finite(Point2 p);
bool is_finite(Point3 p);

/// Axis-aligned rectangle in image coordinates.
struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool valid() const;
  /// Corners in canonical order: (x0,y0), (x1,y0), (x1,y1), (x0,y1).
  std::array<Point2, 4> corners() const;
};

/// Supporting plane a*x + b*y + z + d = 0 (z coefficient fixed to 1).
struct Plane {
  double a = 0.0;
  double b = 0.0;
  double d = 0.0;

  /// Height of the plane over (x, y): z = -(a*x + b*y + d).
  double height_at(double x, double y) const { return -(a * x + b * y + d); }
  /// Perpendicular distance from a 3D point to the plane.
  double distance(const Point3& p) const;
};

/// Line p*x + q*y + r = 0 with the normal (p, q) normalized to unit length.
struct Line2 {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;

  double signed_distance(Point2 pt) const { return p * pt.x + q * pt.y + r; }
};

/// An ordered quadrilateral. Construction canonicalizes the vertex cycle
/// (counter-clockwise, starting from the vertex with minimal (y, x)) and
/// rejects quads that are not simple and star-shaped about their vertex
/// centroid. Throws DegenerateQuad.
class Quad {
 public:
  explicit Quad(const std::array<Point2, 4>& vertices);
  Quad(Point2 a, Point2 b, Point2 c, Point2 d) : Quad(std::array{a, b, c, d}) {}

  const std::array<Point2, 4>& vertices() const { return v_; }
  const Point2& operator[](int i) const { return v_[static_cast<size_t>(i)]; }

  double area() const;
  bool is_convex() const;
  /// Tight axis-aligned bounding box.
  Box bounding_box() const;

 private:
  std::array<Point2, 4> v_;
};

/// Arithmetic mean of the four vertices (the pyramid apex location).
Point2 quad_center(const Quad& q);

/// Decompose OP = alpha*OM + beta*ON. Throws SingularDecomposition when
/// the rays OM, ON are (near-)collinear or zero length.
struct Decomposition {
  double alpha = 0.0;
  double beta = 0.0;
};
Decomposition decompose(Point2 o, Point2 m, Point2 n, Point2 p);

/// Plane through three 3D points, normalized to a*x + b*y + z + d = 0.
/// Throws DegeneratePlane for collinear points or a vertical plane.
Plane plane_through(const Point3& p1, const Point3& p2, const Point3& p3);

/// Intersection of the plane with the base plane z = 0.
/// Throws HorizontalPlane when a = b = 0.
Line2 plane_base_intersection(const Plane& plane);

/// Intersection point of two lines. Throws ParallelLines.
Point2 line_intersection(const Line2& l1, const Line2& l2);

/// Intersection-over-union of two convex quadrilaterals (Sutherland-Hodgman
/// clipping). Throws NonConvexInput for non-convex quads.
double polygon_iou(const Quad& q1, const Quad& q2);

/// Convex hull (counter-clockwise, no collinear interior points).
std::vector<Point2> convex_hull(std::vector<Point2> points);

/// Minimum-area enclosing rotated rectangle, via convex hull edges.
/// Throws DegenerateInput for fewer than 3 points or collinear input.
Quad min_area_rect(const std::vector<Point2>& points);

}  // namespace pyramask
