#pragma once

#include <cstdint>
#include <vector>

#include "pyramask/errors.hpp"
#include "pyramask/geometry.hpp"
#include "pyramask/pyramid_label.hpp"

namespace pyramask {

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> bits;  // row-major, 0 or 1

  bool at(int col, int row) const {
    return bits[static_cast<size_t>(row) * width + col] != 0;
  }
};

struct GridCell {
  int col = 0;
  int row = 0;
};

struct Component {
  std::vector<GridCell> cells;  // in discovery (row-major BFS) order
  int area() const { return static_cast<int>(cells.size()); }
};

// Cell is set iff its score is strictly above the threshold.
BinaryMask binarize(const SoftMask& mask, double threshold);

// 8-connected components, enumerated by a deterministic row-major scan;
// each component's first cell is its row-major-smallest one.
std::vector<Component> connected_components(const BinaryMask& mask);

struct BaselineOptions {
  double threshold = 0.5;
  // With inflation the rectangle encloses the full extent of every cell of
  // the chosen component (all four cell corners); without it only the cell
  // centers. Either way the result stays inside the mask's box.
  bool half_cell_inflation = false;
};

// Threshold-and-box decoder: binarize, keep the largest component (ties go
// to the component whose first cell comes earliest in row-major order), and
// return the minimum-area rotated rectangle around it. The result cannot
// reach past the support of the mask, so it stays within the mask's box up
// to cell quantization. The bbox parameter is accepted for call-site
// symmetry with the pyramid decoder; the mask's own box defines the
// geometry.
// Throws EmptyMask when nothing clears the threshold and DegenerateInput
// when the component cannot span a rectangle (e.g. a single cell row
// without inflation).
Quad decode_baseline(const SoftMask& mask, const Box& bbox,
                     const BaselineOptions& options = {});

}  // namespace pyramask
