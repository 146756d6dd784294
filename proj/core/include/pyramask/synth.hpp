#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pyramask/errors.hpp"
#include "pyramask/geometry.hpp"
#include "pyramask/pyramid_label.hpp"
#include "pyramask/rng.hpp"

namespace pyramask {

// Mask corruption model. Applied in a fixed order: truncation (shrink the
// box, re-rasterize), gaussian, uniform, salt, then clamp to [0, 1].
struct NoiseSpec {
  double additive_uniform_amplitude = 0.0;  // i.i.d. uniform in [-a, a]
  double gaussian_sigma = 0.0;              // i.i.d. normal(0, sigma)
  double salt_fraction = 0.0;  // chance a cell is replaced by uniform [0,1)
  // Crop fraction per side {left, top, right, bottom}, each in [0, 0.4);
  // e.g. right = 0.15 moves the box's right edge to 85% of its extent.
  std::array<double, 4> truncation{};
  uint64_t seed = 0;

  void validate() const;  // throws std::invalid_argument
  bool any() const;
};

struct CorpusRecord {
  std::string id;
  Quad quad;             // ground truth
  std::string mask_path;  // relative to the manifest's directory
  Box box;                // rasterization box actually used (post-truncation)
  uint64_t seed = 0;      // per-record noise stream seed
};

struct CorpusManifest {
  int mask_width = 0;
  int mask_height = 0;
  uint64_t seed = 0;  // master seed the corpus was generated from
  NoiseSpec noise;
  std::vector<CorpusRecord> records;
};

struct SynthOptions {
  int count = 0;
  int mask_width = 56;
  int mask_height = 56;
  // The rasterization box is the quad's bounding box grown by this
  // fraction of its extent on every side.
  double box_margin = 0.15;
  NoiseSpec noise;
  uint64_t seed = 0;
  int workers = 1;
};

// A random convex quad: a rotated rectangle of random center, side lengths
// and angle, with uniform jitter on each vertex (re-drawn on the rare
// non-convex outcome). Consumes a fixed number of rng draws per attempt.
Quad random_quad(Rng& rng);

// The quad's bounding box grown by `margin` times its extent per side.
Box margin_box(const Quad& quad, double margin);

Box truncate_box(const Box& box, const std::array<double, 4>& truncation);

// Rasterize `quad` over `base_box` shrunk by `noise.truncation`, then
// corrupt the scores with the remaining noise passes, seeded by
// `record_seed` only.
SoftMask synth_mask(const Quad& quad, const Box& base_box, int mask_width,
                    int mask_height, const NoiseSpec& noise,
                    uint64_t record_seed);

// Generate options.count records under out_dir (masks in out_dir/masks,
// manifest at out_dir/manifest.json). Byte-identical output for a fixed
// seed, independent of the worker count.
CorpusManifest generate_corpus(const SynthOptions& options,
                               const std::filesystem::path& out_dir);

void write_manifest(const CorpusManifest& manifest,
                    const std::filesystem::path& path);
CorpusManifest read_manifest(const std::filesystem::path& path);

}  // namespace pyramask
