#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "pyramask/errors.hpp"
#include "pyramask/pyramid_label.hpp"

namespace pyramask {

// Masks are stored as 16-bit binary PGM ("P5", maxval 65535, big-endian
// samples), sample = round(score * 65535): quantization error <= 1e-5.
// Geometry metadata (the image-space box) travels in a sidecar JSON at
// "<pgm_path>.json" with keys width, height, box = [x0, y0, x1, y1].

constexpr uint16_t kMaskMaxval = 65535;

inline uint16_t quantize_score(double score) {
  return static_cast<uint16_t>(score * kMaskMaxval + 0.5);
}

inline double dequantize_score(uint16_t sample) {
  return static_cast<double>(sample) / kMaskMaxval;
}

struct Pgm16 {
  int width = 0;
  int height = 0;
  std::vector<uint16_t> samples;  // row-major
};

// All four throw IoError on unreadable/unwritable files or malformed
// content.
void write_pgm16(const std::filesystem::path& path, int width, int height,
                 const std::vector<uint16_t>& samples);
Pgm16 read_pgm16(const std::filesystem::path& path);

void write_mask(const SoftMask& mask, const std::filesystem::path& pgm_path);
SoftMask read_mask(const std::filesystem::path& pgm_path);

}  // namespace pyramask
