#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pyramask/geometry.hpp"
#include "pyramask/rng.hpp"
#include "pyramask/synth.hpp"

using namespace pyramask;

TEST_CASE("decompose solves the two-ray system") {
  const Decomposition d =
      decompose({2.0, 1.0}, {0.0, 0.0}, {4.0, 0.0}, {1.0, 0.5});
  CHECK(d.alpha == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(d.beta == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("decompose reconstructs the input point") {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    const Point2 o{rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const Point2 m{o.x + rng.uniform(0.5, 3), o.y + rng.uniform(-3, 3)};
    const Point2 n{o.x + rng.uniform(-3, 3), o.y + rng.uniform(0.5, 3)};
    const Point2 p{rng.uniform(-10, 10), rng.uniform(-10, 10)};
    Decomposition d{};
    try {
      d = decompose(o, m, n, p);
    } catch (const SingularDecomposition&) {
      continue;
    }
    const Point2 rec = o + d.alpha * (m - o) + d.beta * (n - o);
    CHECK(norm(rec - p) < 1e-9 * (1.0 + norm(p - o)));
  }
}

TEST_CASE("decompose rejects collinear rays") {
  CHECK_THROWS_AS(decompose({0, 0}, {1, 0}, {2, 0}, {3, 4}),
                  SingularDecomposition);
  CHECK_THROWS_AS(decompose({0, 0}, {0, 0}, {1, 1}, {3, 4}),
                  SingularDecomposition);
}

TEST_CASE("plane_through hits its three points") {
  const Plane pl = plane_through({0, 0, 0}, {2, 0, 0}, {1, 1, 1});
  CHECK(pl.a == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pl.b == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pl.d == doctest::Approx(0.0).epsilon(1e-12));

  Rng rng(12);
  for (int i = 0; i < 200; ++i) {
    const Point3 p1{rng.uniform(-10, 10), rng.uniform(-10, 10),
                    rng.uniform(-2, 2)};
    const Point3 p2{rng.uniform(-10, 10), rng.uniform(-10, 10),
                    rng.uniform(-2, 2)};
    const Point3 p3{rng.uniform(-10, 10), rng.uniform(-10, 10),
                    rng.uniform(-2, 2)};
    Plane pl2{};
    try {
      pl2 = plane_through(p1, p2, p3);
    } catch (const DegeneratePlane&) {
      continue;
    }
    for (const Point3& p : {p1, p2, p3}) {
      CHECK(std::abs(pl2.a * p.x + pl2.b * p.y + p.z + pl2.d) < 1e-9);
    }
  }
}

TEST_CASE("plane_through rejects xy-collinear points") {
  CHECK_THROWS_AS(plane_through({0, 0, 0}, {1, 0, 0}, {2, 0, 1}),
                  DegeneratePlane);
  CHECK_THROWS_AS(plane_through({1, 1, 0}, {1, 1, 1}, {2, 2, 0}),
                  DegeneratePlane);
}

TEST_CASE("plane_base_intersection gives the z=0 trace") {
  const Plane pl = plane_through({0, 0, 1}, {1, 0, 0}, {1, 1, 0});  // x = 1
  const Line2 line = plane_base_intersection(pl);
  CHECK(std::hypot(line.p, line.q) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(line.signed_distance({1.0, -3.0})) < 1e-9);
  CHECK(std::abs(line.signed_distance({1.0, 7.0})) < 1e-9);

  CHECK_THROWS_AS(plane_base_intersection(Plane{0.0, 0.0, -1.0}),
                  HorizontalPlane);
}

TEST_CASE("line_intersection crosses axes at the origin") {
  const Line2 x_axis{0.0, 1.0, 0.0};  // y = 0
  const Line2 y_axis{1.0, 0.0, 0.0};  // x = 0
  const Point2 p = line_intersection(x_axis, y_axis);
  CHECK(norm(p) < 1e-12);

  const Line2 y_one{0.0, 1.0, -1.0};  // y = 1
  CHECK_THROWS_AS(line_intersection(x_axis, y_one), ParallelLines);
}

TEST_CASE("quad canonicalization fixes order and start") {
  const std::array<Point2, 4> base = {Point2{0, 0}, Point2{4, 1}, Point2{5, 4},
                                      Point2{1, 3}};
  const Quad canon(base);
  CHECK(canon.area() > 0.0);
  CHECK(canon[0].x == 0.0);
  CHECK(canon[0].y == 0.0);
  // Any rotation or reversal of the same cycle lands on the same vertices.
  for (int rot = 0; rot < 4; ++rot) {
    std::array<Point2, 4> cycled{};
    std::array<Point2, 4> reversed{};
    for (int i = 0; i < 4; ++i) {
      cycled[static_cast<size_t>(i)] = base[static_cast<size_t>((i + rot) % 4)];
      reversed[static_cast<size_t>(i)] =
          base[static_cast<size_t>((4 - i + rot) % 4)];
    }
    for (const auto& variant : {cycled, reversed}) {
      const Quad q(variant);
      for (int i = 0; i < 4; ++i) {
        CHECK(q[i].x == doctest::Approx(canon[i].x).epsilon(1e-15));
        CHECK(q[i].y == doctest::Approx(canon[i].y).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("quad validation rejects degenerate cycles") {
  // bowtie (self-intersecting)
  CHECK_THROWS_AS(Quad({0, 0}, {1, 1}, {1, 0}, {0, 1}), DegenerateQuad);
  // collinear
  CHECK_THROWS_AS(Quad({0, 0}, {1, 0}, {2, 0}, {3, 0}), DegenerateQuad);
  // repeated vertex
  CHECK_THROWS_AS(Quad({0, 0}, {1, 0}, {1, 0}, {0, 1}), DegenerateQuad);
  const double inf = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Quad({0, 0}, {1, 0}, {inf, 1}, {0, 1}), DegenerateQuad);
}

TEST_CASE("quad convexity and area") {
  const Quad square({0, 0}, {2, 0}, {2, 2}, {0, 2});
  CHECK(square.is_convex());
  CHECK(square.area() == doctest::Approx(4.0));
  // dart: reflex at (5, 2) but still star-shaped about the centroid
  const Quad dart({0, 0}, {10, 0}, {6, 6}, {5, 2});
  CHECK_FALSE(dart.is_convex());
  CHECK(dart.area() > 0.0);
}

TEST_CASE("polygon_iou on reference configurations") {
  const Quad a({0, 0}, {1, 0}, {1, 1}, {0, 1});
  CHECK(polygon_iou(a, a) == 1.0);  // self-IoU is exact

  const Quad shifted({0.5, 0}, {1.5, 0}, {1.5, 1}, {0.5, 1});
  CHECK(polygon_iou(a, shifted) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

  const Quad far({10, 10}, {11, 10}, {11, 11}, {10, 11});
  CHECK(polygon_iou(a, far) == 0.0);

  const Quad dart({0, 0}, {10, 0}, {6, 6}, {5, 2});
  CHECK_THROWS_AS(polygon_iou(a, dart), NonConvexInput);
  CHECK_THROWS_AS(polygon_iou(dart, a), NonConvexInput);
}

TEST_CASE("polygon_iou is symmetric and bounded") {
  Rng rng(13);
  for (int i = 0; i < 50; ++i) {
    const Quad a = random_quad(rng);
    Quad b = random_quad(rng);
    const double ab = polygon_iou(a, b);
    const double ba = polygon_iou(b, a);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab >= 0.0);
    CHECK(ab <= 1.0);
  }
}

TEST_CASE("polygon_iou tracks the Monte Carlo oracle") {
  Rng rng(14);
  for (int i = 0; i < 10; ++i) {
    const Quad a = random_quad(rng);
    // nudge the second quad so the pair overlaps often
    Quad b = random_quad(rng);
    const double exact = polygon_iou(a, b);
    const double mc = oracles::mc_iou(a, b, 100000, 1000 + i);
    CHECK(std::abs(exact - mc) < 0.02);
  }
}

TEST_CASE("convex_hull removes interior and collinear points") {
  const std::vector<Point2> pts{{0, 0}, {4, 0}, {4, 4}, {0, 4},
                                {2, 2}, {2, 0}, {4, 2}};
  const auto hull = convex_hull(pts);
  REQUIRE(hull.size() == 4);
  double area2 = 0.0;
  for (size_t i = 0; i < hull.size(); ++i) {
    area2 += cross(hull[i], hull[(i + 1) % hull.size()]);
  }
  CHECK(area2 == doctest::Approx(32.0));  // CCW orientation, area 16

  const auto degenerate = convex_hull({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
  CHECK(degenerate.size() == 2);
}

TEST_CASE("min_area_rect recovers rotated rectangles") {
  Rng rng(15);
  for (int i = 0; i < 100; ++i) {
    const double cx = rng.uniform(-10, 10);
    const double cy = rng.uniform(-10, 10);
    const double w = rng.uniform(2, 8);
    const double h = rng.uniform(1, 6);
    const double t = rng.uniform(0, 3.14159);
    std::vector<Point2> pts;
    // corners plus edge midpoints of the rotated rectangle
    for (const auto& [lx, ly] :
         std::vector<std::pair<double, double>>{{-0.5, -0.5},
                                                {0.5, -0.5},
                                                {0.5, 0.5},
                                                {-0.5, 0.5},
                                                {0.0, -0.5},
                                                {0.5, 0.0},
                                                {0.0, 0.5},
                                                {-0.5, 0.0}}) {
      pts.push_back({cx + lx * w * std::cos(t) - ly * h * std::sin(t),
                     cy + lx * w * std::sin(t) + ly * h * std::cos(t)});
    }
    const Quad rect = min_area_rect(pts);
    CHECK(rect.area() == doctest::Approx(w * h).epsilon(1e-9));
    for (const auto& p : pts) {
      // contained up to boundary round-off: signed distance to every edge
      const auto& v = rect.vertices();
      double worst = 0.0;
      for (int k = 0; k < 4; ++k) {
        const Point2 e = v[(k + 1) % 4] - v[k];
        worst = std::min(worst, cross(e, p - v[k]) / norm(e));
      }
      CHECK(worst > -1e-9);
    }
  }
}

TEST_CASE("min_area_rect rejects degenerate input") {
  CHECK_THROWS_AS(min_area_rect({{0, 0}, {1, 1}}), DegenerateInput);
  CHECK_THROWS_AS(min_area_rect({{0, 0}, {1, 1}, {2, 2}, {3, 3}}),
                  DegenerateInput);
}

TEST_CASE("min_area_rect minimal: diamond") {
  const Quad rect = min_area_rect({{0, -1}, {1, 0}, {0, 1}, {-1, 0}});
  CHECK(rect.area() == doctest::Approx(2.0).epsilon(1e-9));
}
