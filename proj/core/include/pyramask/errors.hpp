#pragma once

#include <stdexcept>
#include <string>

namespace pyramask {

/// Base class for all pyramask error conditions.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// The 2x2 ray decomposition matrix is (numerically) singular.
struct SingularDecomposition final : Error {
  using Error::Error;
};

/// Three points are collinear or the plane through them is vertical,
/// so it cannot be written as a*x + b*y + z + d = 0.
struct DegeneratePlane final : Error {
  using Error::Error;
};

/// Plane parallel to z = 0; it has no base intersection line.
struct HorizontalPlane final : Error {
  using Error::Error;
};

struct ParallelLines final : Error {
  using Error::Error;
};

/// polygon_iou only accepts convex quadrilaterals.
struct NonConvexInput final : Error {
  using Error::Error;
};

/// Too few / collinear points where a 2D extent is required.
struct DegenerateInput final : Error {
  using Error::Error;
};

/// A quadrilateral violating the simple + star-shaped invariants.
struct DegenerateQuad final : Error {
  using Error::Error;
};

struct DimensionMismatch final : Error {
  using Error::Error;
};

/// A mask with no cell above the positive threshold.
struct EmptyMask final : Error {
  using Error::Error;
};

struct EmptyDataset final : Error {
  using Error::Error;
};

/// File could not be read, written, or parsed.
struct IoError final : Error {
  using Error::Error;
};

}  // namespace pyramask
