#pragma once

#include <array>
#include <vector>

#include "pyramask/errors.hpp"
#include "pyramask/geometry.hpp"
#include "pyramask/pyramid_label.hpp"

namespace pyramask {

struct ClusteringConfig {
  // Cells with score strictly above this participate in the fit.
  double positive_threshold = 0.1;
  // Assign/refit rounds.
  int max_iter = 10;
  // Stop once the pooled mean squared perpendicular residual drops to or
  // below this.
  double residual_threshold = 1e-4;
  // Reweighting rounds inside each robust plane fit.
  int irls_iterations = 20;
  // Tukey bisquare cutoff in units of the robust residual scale.
  double irls_tuning_constant = 4.685;

  void validate() const;  // throws std::invalid_argument
};

// Four lateral planes of the pyramid, ordered like the corners of the
// enclosing box they were seeded from: sides facing the top, right,
// bottom, and left box edges, in that order.
struct PyramidFit {
  std::array<Plane, 4> planes;
  Point3 apex{};            // fit seed: mean of positives at height 1
  int iterations_run = 0;
  double final_residual = 0.0;  // pooled mean squared perpendicular distance
  std::array<int, 4> cluster_sizes{};
};

struct DecodeResult {
  Quad quad;
  PyramidFit fit;
  int positive_count = 0;
};

// Cell centers with score above cfg.positive_threshold, lifted to 3D with
// z = score. Throws EmptyMask when no cell qualifies.
std::vector<Point3> select_positive(const SoftMask& mask,
                                    const ClusteringConfig& cfg);

// Seed planes: each passes through the apex (mean of positives, z = 1) and
// one pair of consecutive corners of `bbox` at height 0. Throws
// DegeneratePlane if the apex lies on a box edge line.
PyramidFit init_planes(const std::vector<Point3>& positives, const Box& bbox);

// Index of the plane with the smallest perpendicular distance to p;
// ties resolve to the lowest index.
int nearest_plane(const Point3& p, const std::array<Plane, 4>& planes);

struct RobustFit {
  Plane plane;
  double mean_squared_residual = 0.0;  // perpendicular, over all points
};

// Iteratively reweighted least squares with the Tukey bisquare weight.
// Residuals are vertical (z minus plane height); the scale is 1.4826 times
// their median absolute value. Clusters that cannot determine a plane
// (fewer than 3 points, or xy-collinear support) keep `fallback`.
RobustFit fit_plane_robust(const std::vector<Point3>& points,
                           const ClusteringConfig& cfg, const Plane& fallback);

// Alternate nearest-plane assignment and robust refit until the pooled
// residual reaches cfg.residual_threshold or cfg.max_iter rounds have run.
PyramidFit cluster_planes(const std::vector<Point3>& positives,
                          const Box& bbox, const ClusteringConfig& cfg);

// Full decoder: select positives, cluster planes over the mask box, cut
// each plane with z = 0, and intersect consecutive base lines into a quad.
// Throws EmptyMask when nothing clears the threshold and DegenerateQuad
// when the positives cannot support four distinct sides (collinear input,
// near-parallel adjacent base lines, or a non-simple corner cycle).
DecodeResult decode_pyramid(const SoftMask& mask, const Box& bbox,
                            const ClusteringConfig& cfg);

}  // namespace pyramask
