#include <benchmark/benchmark.h>

#include "pyramask/baseline_decoder.hpp"
#include "pyramask/plane_clustering.hpp"
#include "pyramask/pyramid_label.hpp"
#include "pyramask/rng.hpp"
#include "pyramask/synth.hpp"

using namespace pyramask;

namespace {

Quad fixed_quad() {
  Rng rng(7);
  return random_quad(rng);
}

const SoftMask& fixed_mask(int side) {
  static const Quad q = fixed_quad();
  static const SoftMask m28 = rasterize_label(q, 28, 28, margin_box(q, 0.15));
  static const SoftMask m56 = rasterize_label(q, 56, 56, margin_box(q, 0.15));
  static const SoftMask m112 =
      rasterize_label(q, 112, 112, margin_box(q, 0.15));
  switch (side) {
    case 28:
      return m28;
    case 112:
      return m112;
    default:
      return m56;
  }
}

void BM_rasterize_label(benchmark::State& state) {
  const Quad q = fixed_quad();
  const Box box = margin_box(q, 0.15);
  const int side = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rasterize_label(q, side, side, box));
  }
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_rasterize_label)->Arg(28)->Arg(56)->Arg(112);

void BM_decode_pyramid(benchmark::State& state) {
  const SoftMask& m = fixed_mask(static_cast<int>(state.range(0)));
  const ClusteringConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode_pyramid(m, m.box(), cfg));
  }
}
BENCHMARK(BM_decode_pyramid)->Arg(28)->Arg(56)->Arg(112);

void BM_decode_baseline(benchmark::State& state) {
  const SoftMask& m = fixed_mask(static_cast<int>(state.range(0)));
  BaselineOptions opt;
  opt.threshold = 0.1;
  opt.half_cell_inflation = true;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode_baseline(m, m.box(), opt));
  }
}
BENCHMARK(BM_decode_baseline)->Arg(28)->Arg(56)->Arg(112);

void BM_polygon_iou(benchmark::State& state) {
  Rng rng(11);
  const Quad a = random_quad(rng);
  const Quad b = random_quad(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(polygon_iou(a, b));
  }
}
BENCHMARK(BM_polygon_iou);

void BM_min_area_rect(benchmark::State& state) {
  Rng rng(13);
  std::vector<Point2> pts;
  for (int i = 0; i < state.range(0); ++i) {
    pts.push_back({rng.uniform(0, 100), rng.uniform(0, 100)});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(min_area_rect(pts));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_min_area_rect)->Arg(16)->Arg(256)->Arg(4096);

void BM_synth_mask(benchmark::State& state) {
  const Quad q = fixed_quad();
  const Box box = margin_box(q, 0.15);
  NoiseSpec noise;
  noise.gaussian_sigma = 0.05;
  noise.salt_fraction = 0.01;
  uint64_t seed = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(synth_mask(q, box, 56, 56, noise, seed++));
  }
}
BENCHMARK(BM_synth_mask);

}  // namespace

BENCHMARK_MAIN();
