#include "pyramask/pyramid_label.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace pyramask {

SoftMask::SoftMask(int width, int height, const Box& box,
                   std::vector<double> scores)
    : width_(width), height_(height), box_(box), scores_(std::move(scores)) {
  if (width_ < 2 || height_ < 2) {
    throw std::invalid_argument("mask dimensions must be at least 2x2");
  }
  if (!box_.valid()) {
    throw std::invalid_argument("mask box must have positive extent");
  }
  const size_t expected =
      static_cast<size_t>(width_) * static_cast<size_t>(height_);
  if (scores_.size() != expected) {
    throw std::invalid_argument("score buffer size does not match dimensions");
  }
  for (double s : scores_) {
    if (!(s >= 0.0 && s <= 1.0)) {  // also rejects NaN
      throw std::invalid_argument("scores must lie in [0, 1]");
    }
  }
}

RegionDecomposition select_region(const Quad& quad, Point2 p) {
  if (!is_finite(p)) {
    throw std::invalid_argument("select_region: point is not finite");
  }
  const Point2 o = quad_center(quad);
  const auto& v = quad.vertices();
  RegionDecomposition fallback{};
  double fallback_min = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 4; ++i) {
    const Point2 m = v[i];
    const Point2 n = v[(i + 1) % 4];
    Decomposition dec{};
    try {
      dec = decompose(o, m, n, p);
    } catch (const SingularDecomposition&) {
      continue;  // cannot happen for a valid quad, but stay defensive
    }
    const PyramidRegion region{static_cast<RegionId>(i), m, n};
    if (dec.alpha >= 0.0 && dec.beta >= 0.0) {
      return {region, dec.alpha, dec.beta};
    }
    const double mn = std::min(dec.alpha, dec.beta);
    if (mn > fallback_min) {
      fallback_min = mn;
      fallback = {region, dec.alpha, dec.beta};
    }
  }
  if (fallback_min == -std::numeric_limits<double>::infinity()) {
    throw DegenerateQuad("no sector decomposition exists for this point");
  }
  // Round-off left every sector with a slightly negative coefficient; the
  // least-negative one is the sector the point geometrically belongs to.
  return fallback;
}

double pyramid_score(const Quad& quad, Point2 p) {
  const RegionDecomposition rd = select_region(quad, p);
  return std::clamp(1.0 - (rd.alpha + rd.beta), 0.0, 1.0);
}

SoftMask rasterize_label(const Quad& quad, int mask_width, int mask_height,
                         const Box& box) {
  if (mask_width < 2 || mask_height < 2) {
    throw std::invalid_argument("mask dimensions must be at least 2x2");
  }
  if (!box.valid()) {
    throw std::invalid_argument("rasterize_label: box must have positive extent");
  }
  std::vector<double> scores(static_cast<size_t>(mask_width) *
                             static_cast<size_t>(mask_height));
  const double cw = box.width() / mask_width;
  const double ch = box.height() / mask_height;
  size_t idx = 0;
  for (int row = 0; row < mask_height; ++row) {
    const double y = box.y0 + (row + 0.5) * ch;
    for (int col = 0; col < mask_width; ++col, ++idx) {
      const double x = box.x0 + (col + 0.5) * cw;
      scores[idx] = pyramid_score(quad, {x, y});
    }
  }
  return SoftMask(mask_width, mask_height, box, std::move(scores));
}

double l1_mask_distance(const SoftMask& m1, const SoftMask& m2) {
  if (m1.width() != m2.width() || m1.height() != m2.height()) {
    throw DimensionMismatch("mask dimensions differ: " +
                            std::to_string(m1.width()) + "x" +
                            std::to_string(m1.height()) + " vs " +
                            std::to_string(m2.width()) + "x" +
                            std::to_string(m2.height()));
  }
  const auto& a = m1.scores();
  const auto& b = m2.scores();
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
  return sum / static_cast<double>(a.size());
}

}  // namespace pyramask
