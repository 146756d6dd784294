#include "pyramask/baseline_decoder.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace pyramask {

BinaryMask binarize(const SoftMask& mask, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("binarize threshold must lie in (0, 1)");
  }
  BinaryMask out;
  out.width = mask.width();
  out.height = mask.height();
  out.bits.resize(mask.scores().size());
  const auto& s = mask.scores();
  for (size_t i = 0; i < s.size(); ++i) {
    out.bits[i] = s[i] > threshold ? 1 : 0;
  }
  return out;
}

std::vector<Component> connected_components(const BinaryMask& mask) {
  std::vector<Component> out;
  const int w = mask.width;
  const int h = mask.height;
  std::vector<uint8_t> seen(static_cast<size_t>(w) * h, 0);
  std::deque<GridCell> frontier;
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      const size_t idx = static_cast<size_t>(row) * w + col;
      if (!mask.bits[idx] || seen[idx]) continue;
      Component comp;
      seen[idx] = 1;
      frontier.push_back({col, row});
      while (!frontier.empty()) {
        const GridCell c = frontier.front();
        frontier.pop_front();
        comp.cells.push_back(c);
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            if (dr == 0 && dc == 0) continue;
            const int nc = c.col + dc;
            const int nr = c.row + dr;
            if (nc < 0 || nc >= w || nr < 0 || nr >= h) continue;
            const size_t nidx = static_cast<size_t>(nr) * w + nc;
            if (!mask.bits[nidx] || seen[nidx]) continue;
            seen[nidx] = 1;
            frontier.push_back({nc, nr});
          }
        }
      }
      out.push_back(std::move(comp));
    }
  }
  return out;
}

Quad decode_baseline(const SoftMask& mask, const Box& bbox,
                     const BaselineOptions& options) {
  (void)bbox;
  const BinaryMask bin = binarize(mask, options.threshold);
  const std::vector<Component> comps = connected_components(bin);
  if (comps.empty()) {
    throw EmptyMask("no cell score exceeds the baseline threshold");
  }
  // Components are discovered in row-major order of their first cell, so
  // scanning with a strict > keeps the earliest of equal-area components.
  size_t best = 0;
  for (size_t i = 1; i < comps.size(); ++i) {
    if (comps[i].area() > comps[best].area()) best = i;
  }
  std::vector<Point2> points;
  const Component& comp = comps[best];
  if (options.half_cell_inflation) {
    points.reserve(comp.cells.size() * 4);
    const double hw = 0.5 * mask.cell_width();
    const double hh = 0.5 * mask.cell_height();
    for (const GridCell& c : comp.cells) {
      const Point2 ctr = mask.cell_center(c.col, c.row);
      points.push_back({ctr.x - hw, ctr.y - hh});
      points.push_back({ctr.x + hw, ctr.y - hh});
      points.push_back({ctr.x + hw, ctr.y + hh});
      points.push_back({ctr.x - hw, ctr.y + hh});
    }
  } else {
    points.reserve(comp.cells.size());
    for (const GridCell& c : comp.cells) {
      points.push_back(mask.cell_center(c.col, c.row));
    }
  }
  return min_area_rect(points);
}

}  // namespace pyramask
