#pragma once

#include <vector>

#include "pyramask/errors.hpp"
#include "pyramask/geometry.hpp"

namespace pyramask {

// Dense per-cell score grid over an axis-aligned image-space box.
// Scores are row-major (row * width + col) and confined to [0, 1].
// Cell (col, row) samples the image at the center of its grid cell:
//   x = box.x0 + (col + 0.5) * box.width() / width
//   y = box.y0 + (row + 0.5) * box.height() / height
class SoftMask {
 public:
  SoftMask(int width, int height, const Box& box, std::vector<double> scores);

  int width() const { return width_; }
  int height() const { return height_; }
  const Box& box() const { return box_; }
  const std::vector<double>& scores() const { return scores_; }

  double at(int col, int row) const {
    return scores_[static_cast<size_t>(row) * width_ + col];
  }

  double cell_width() const { return box_.width() / width_; }
  double cell_height() const { return box_.height() / height_; }

  Point2 cell_center(int col, int row) const {
    return {box_.x0 + (col + 0.5) * cell_width(),
            box_.y0 + (row + 0.5) * cell_height()};
  }

 private:
  int width_;
  int height_;
  Box box_;
  std::vector<double> scores_;
};

// The four triangular sectors around the quad center O, one per edge,
// in vertex order: sector i spans edge (v[i], v[i+1]).
enum class RegionId { kEdge01 = 0, kEdge12 = 1, kEdge23 = 2, kEdge30 = 3 };

struct PyramidRegion {
  RegionId id;
  Point2 m;  // first edge endpoint (ray OM)
  Point2 n;  // second edge endpoint (ray ON)
};

struct RegionDecomposition {
  PyramidRegion region;
  double alpha;
  double beta;
};

// Which sector contains p, and the coefficients of OP = alpha*OM + beta*ON
// there. Exactly one sector yields alpha >= 0 and beta >= 0 for points not
// on a sector ray; on a shared ray the lowest-index sector wins. If
// round-off leaves no sector with both coefficients non-negative, the one
// maximizing min(alpha, beta) is returned.
RegionDecomposition select_region(const Quad& quad, Point2 p);

// Height of the pyramid label at p: 1 at the quad center, falling linearly
// to 0 on each edge, 0 outside. Computed as max(1 - (alpha + beta), 0) from
// the sector decomposition of p.
double pyramid_score(const Quad& quad, Point2 p);

// Sample the pyramid label of `quad` at every cell center of a
// mask_width x mask_height grid over `box`.
SoftMask rasterize_label(const Quad& quad, int mask_width, int mask_height,
                         const Box& box);

// Mean absolute per-cell difference. Throws DimensionMismatch if the grids
// differ in size.
double l1_mask_distance(const SoftMask& m1, const SoftMask& m2);

}  // namespace pyramask
