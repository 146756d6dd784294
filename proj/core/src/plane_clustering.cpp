#include "pyramask/plane_clustering.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pyramask {

namespace {

// Degrees of separation below which two base lines count as parallel when
// intersecting them into quad corners.
constexpr double kMinCornerAngleDeg = 0.5;

// Scale-free xy-collinearity test: the ratio of the scatter matrix
// eigenvalues. det(S) = l1*l2 and trace(S)^2 >= l1^2, so
// det <= eps * trace^2 implies l2/l1 <= ~eps.
bool xy_spread_ok(const std::vector<Point3>& pts,
                  const std::vector<double>* weights) {
  double wsum = 0.0, mx = 0.0, my = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double w = weights ? (*weights)[i] : 1.0;
    wsum += w;
    mx += w * pts[i].x;
    my += w * pts[i].y;
  }
  if (wsum <= 0.0) return false;
  mx /= wsum;
  my /= wsum;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (size_t i = 0; i < pts.size(); ++i) {
    const double w = weights ? (*weights)[i] : 1.0;
    const double dx = pts[i].x - mx;
    const double dy = pts[i].y - my;
    sxx += w * dx * dx;
    sxy += w * dx * dy;
    syy += w * dy * dy;
  }
  const double det = sxx * syy - sxy * sxy;
  const double trace = sxx + syy;
  return trace > 0.0 && det > 1e-12 * trace * trace;
}

double mean_squared_distance(const Plane& plane,
                             const std::vector<Point3>& pts) {
  if (pts.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : pts) {
    const double d = plane.distance(p);
    sum += d * d;
  }
  return sum / static_cast<double>(pts.size());
}

// Weighted least squares of z on (x, y): minimizes
// sum w_i (a x_i + b y_i + z_i + d)^2 via the 3x3 normal equations.
bool solve_wls(const std::vector<Point3>& pts, const std::vector<double>& w,
               Plane* out) {
  Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
  Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
  for (size_t i = 0; i < pts.size(); ++i) {
    if (w[i] <= 0.0) continue;
    const Eigen::Vector3d row(pts[i].x, pts[i].y, 1.0);
    m.noalias() += w[i] * row * row.transpose();
    rhs.noalias() -= w[i] * pts[i].z * row;
  }
  const Eigen::LDLT<Eigen::Matrix3d> ldlt(m);
  if (ldlt.info() != Eigen::Success) return false;
  const Eigen::Vector3d abd = ldlt.solve(rhs);
  if (!abd.allFinite()) return false;
  // LDLT on a rank-deficient matrix can still "solve"; verify the result.
  if (!rhs.isApprox(m * abd, 1e-8) && (m * abd - rhs).norm() > 1e-8) {
    return false;
  }
  out->a = abd[0];
  out->b = abd[1];
  out->d = abd[2];
  return true;
}

double median_abs(std::vector<double> v) {
  const size_t n = v.size();
  for (auto& x : v) x = std::abs(x);
  const size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (n % 2 == 0) {
    const double lo = *std::max_element(v.begin(), v.begin() + mid);
    m = 0.5 * (lo + m);
  }
  return m;
}

bool xy_collinear(const std::vector<Point3>& pts) {
  return !xy_spread_ok(pts, nullptr);
}

}  // namespace

void ClusteringConfig::validate() const {
  if (!(positive_threshold >= 0.0 && positive_threshold < 1.0)) {
    throw std::invalid_argument("positive_threshold must lie in [0, 1)");
  }
  if (max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (!(residual_threshold >= 0.0)) {
    throw std::invalid_argument("residual_threshold must be >= 0");
  }
  if (irls_iterations < 1) {
    throw std::invalid_argument("irls_iterations must be >= 1");
  }
  if (!(irls_tuning_constant > 0.0)) {
    throw std::invalid_argument("irls_tuning_constant must be > 0");
  }
}

std::vector<Point3> select_positive(const SoftMask& mask,
                                    const ClusteringConfig& cfg) {
  cfg.validate();
  std::vector<Point3> out;
  for (int row = 0; row < mask.height(); ++row) {
    for (int col = 0; col < mask.width(); ++col) {
      const double z = mask.at(col, row);
      if (z > cfg.positive_threshold) {
        const Point2 c = mask.cell_center(col, row);
        out.push_back({c.x, c.y, z});
      }
    }
  }
  if (out.empty()) {
    throw EmptyMask("no cell score exceeds the positive threshold");
  }
  return out;
}

PyramidFit init_planes(const std::vector<Point3>& positives, const Box& bbox) {
  if (positives.empty()) {
    throw std::invalid_argument("init_planes: no positive points");
  }
  if (!bbox.valid()) {
    throw std::invalid_argument("init_planes: box must have positive extent");
  }
  double mx = 0.0, my = 0.0;
  for (const auto& p : positives) {
    mx += p.x;
    my += p.y;
  }
  const double n = static_cast<double>(positives.size());
  PyramidFit fit;
  fit.apex = {mx / n, my / n, 1.0};
  const auto corners = bbox.corners();
  for (int i = 0; i < 4; ++i) {
    const Point2 c0 = corners[i];
    const Point2 c1 = corners[(i + 1) % 4];
    fit.planes[i] = plane_through(fit.apex, {c0.x, c0.y, 0.0},
                                  {c1.x, c1.y, 0.0});
  }
  return fit;
}

int nearest_plane(const Point3& p, const std::array<Plane, 4>& planes) {
  int best = 0;
  double best_d = planes[0].distance(p);
  for (int i = 1; i < 4; ++i) {
    const double d = planes[i].distance(p);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

RobustFit fit_plane_robust(const std::vector<Point3>& points,
                           const ClusteringConfig& cfg,
                           const Plane& fallback) {
  if (points.size() < 3 || !xy_spread_ok(points, nullptr)) {
    return {fallback, mean_squared_distance(fallback, points)};
  }
  std::vector<double> weights(points.size(), 1.0);
  std::vector<double> residuals(points.size());
  Plane cur{};
  bool have = false;
  for (int it = 0; it < cfg.irls_iterations; ++it) {
    size_t active = 0;
    for (double w : weights) active += w > 0.0;
    if (active < 3 || !xy_spread_ok(points, &weights)) break;
    Plane next{};
    if (!solve_wls(points, weights, &next)) break;
    const bool converged =
        have && std::abs(next.a - cur.a) < 1e-10 &&
        std::abs(next.b - cur.b) < 1e-10 && std::abs(next.d - cur.d) < 1e-10;
    cur = next;
    have = true;
    if (converged) break;
    for (size_t i = 0; i < points.size(); ++i) {
      residuals[i] =
          cur.a * points[i].x + cur.b * points[i].y + points[i].z + cur.d;
    }
    const double scale = 1.4826 * median_abs(residuals);
    if (scale <= 1e-12) break;  // at least half the points fit exactly
    const double cutoff = cfg.irls_tuning_constant * scale;
    for (size_t i = 0; i < points.size(); ++i) {
      const double r = std::abs(residuals[i]) / cutoff;
      weights[i] = r < 1.0 ? (1.0 - r * r) * (1.0 - r * r) : 0.0;
    }
  }
  if (!have) return {fallback, mean_squared_distance(fallback, points)};
  return {cur, mean_squared_distance(cur, points)};
}

PyramidFit cluster_planes(const std::vector<Point3>& positives,
                          const Box& bbox, const ClusteringConfig& cfg) {
  cfg.validate();
  PyramidFit fit = init_planes(positives, bbox);
  const double n = static_cast<double>(positives.size());
  double residual = std::numeric_limits<double>::infinity();
  int iter = 0;
  std::array<std::vector<Point3>, 4> clusters;
  while (iter < cfg.max_iter && residual > cfg.residual_threshold) {
    for (auto& c : clusters) c.clear();
    for (const auto& p : positives) {
      clusters[nearest_plane(p, fit.planes)].push_back(p);
    }
    double pooled = 0.0;
    for (int i = 0; i < 4; ++i) {
      const RobustFit rf = fit_plane_robust(clusters[i], cfg, fit.planes[i]);
      fit.planes[i] = rf.plane;
      fit.cluster_sizes[i] = static_cast<int>(clusters[i].size());
      pooled += rf.mean_squared_residual *
                static_cast<double>(clusters[i].size());
    }
    residual = pooled / n;
    ++iter;
  }
  fit.iterations_run = iter;
  fit.final_residual = residual;
  return fit;
}

DecodeResult decode_pyramid(const SoftMask& mask, const Box& bbox,
                            const ClusteringConfig& cfg) {
  const std::vector<Point3> positives = select_positive(mask, cfg);
  if (xy_collinear(positives)) {
    // Every plane through a line of points meets z = 0 in parallel lines,
    // so no quad can be recovered.
    throw DegenerateQuad("positive cells are collinear");
  }
  PyramidFit fit;
  std::array<Line2, 4> lines;
  try {
    fit = cluster_planes(positives, bbox, cfg);
    for (int i = 0; i < 4; ++i) {
      lines[i] = plane_base_intersection(fit.planes[i]);
    }
  } catch (const DegeneratePlane& e) {
    throw DegenerateQuad(std::string("plane fit degenerated: ") + e.what());
  } catch (const HorizontalPlane& e) {
    throw DegenerateQuad(std::string("side plane went horizontal: ") +
                         e.what());
  }
  const double min_sin =
      std::sin(kMinCornerAngleDeg * std::acos(-1.0) / 180.0);
  std::array<Point2, 4> corners{};
  for (int i = 0; i < 4; ++i) {
    const Line2& l1 = lines[i];
    const Line2& l2 = lines[(i + 1) % 4];
    if (std::abs(l1.p * l2.q - l2.p * l1.q) < min_sin) {
      throw DegenerateQuad("adjacent base lines are near-parallel");
    }
    corners[i] = line_intersection(l1, l2);
  }
  // Corner i joins sides i and i+1; the cycle is already consecutive.
  return {Quad(corners), fit, static_cast<int>(positives.size())};
}

}  // namespace pyramask
