#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "pyramask/mask_io.hpp"
#include "pyramask/rng.hpp"
#include "pyramask/synth.hpp"

using namespace pyramask;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("pyramask_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("score quantization round-trips within 1e-5") {
  Rng rng(61);
  double max_err = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double s = rng.uniform();
    const double back = dequantize_score(quantize_score(s));
    max_err = std::max(max_err, std::abs(back - s));
  }
  CHECK(max_err <= 0.5 / 65535.0);
  CHECK(quantize_score(0.0) == 0);
  CHECK(quantize_score(1.0) == 65535);
  CHECK(dequantize_score(65535) == 1.0);
}

TEST_CASE("pgm16 write/read round trip") {
  TempDir tmp;
  const fs::path p = tmp.path / "m.pgm";
  std::vector<uint16_t> samples{0, 1, 255, 256, 65534, 65535};
  write_pgm16(p, 3, 2, samples);
  const Pgm16 back = read_pgm16(p);
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.samples == samples);
  // stored big-endian: header then 2 bytes per sample
  const std::string bytes = slurp(p);
  const size_t data = bytes.size() - 12;
  CHECK(bytes.substr(0, 2) == "P5");
  CHECK(static_cast<unsigned char>(bytes[data + 8]) == 0xFF);  // 65534 hi
  CHECK(static_cast<unsigned char>(bytes[data + 9]) == 0xFE);  // 65534 lo
}

TEST_CASE("pgm16 reader rejects malformed files") {
  TempDir tmp;
  const fs::path missing = tmp.path / "nope.pgm";
  CHECK_THROWS_AS(read_pgm16(missing), IoError);

  const fs::path p6 = tmp.path / "p6.pgm";
  std::ofstream(p6, std::ios::binary) << "P6\n2 2\n65535\n" << std::string(12, '\0');
  CHECK_THROWS_AS(read_pgm16(p6), IoError);

  const fs::path lowmax = tmp.path / "low.pgm";
  std::ofstream(lowmax, std::ios::binary) << "P5\n2 2\n255\n" << std::string(4, '\0');
  CHECK_THROWS_AS(read_pgm16(lowmax), IoError);

  const fs::path truncated = tmp.path / "short.pgm";
  std::ofstream(truncated, std::ios::binary) << "P5\n2 2\n65535\n\0\0\0";
  CHECK_THROWS_AS(read_pgm16(truncated), IoError);
}

TEST_CASE("pgm16 reader skips comment lines") {
  TempDir tmp;
  const fs::path p = tmp.path / "c.pgm";
  {
    std::ofstream out(p, std::ios::binary);
    out << "P5\n# a comment\n2 # inline\n1\n65535\n";
    const unsigned char data[4] = {0x00, 0x07, 0x01, 0x00};
    out.write(reinterpret_cast<const char*>(data), 4);
  }
  const Pgm16 back = read_pgm16(p);
  CHECK(back.width == 2);
  CHECK(back.height == 1);
  CHECK(back.samples == std::vector<uint16_t>{7, 256});
}

TEST_CASE("mask write/read round trip preserves geometry and scores") {
  TempDir tmp;
  const Quad q({10, 20}, {80, 25}, {85, 60}, {12, 55});
  const Box box = margin_box(q, 0.15);
  const SoftMask m = rasterize_label(q, 56, 56, box);
  const fs::path p = tmp.path / "mask.pgm";
  write_mask(m, p);
  CHECK(fs::exists(tmp.path / "mask.pgm.json"));
  const SoftMask back = read_mask(p);
  CHECK(back.width() == m.width());
  CHECK(back.height() == m.height());
  CHECK(back.box().x0 == doctest::Approx(box.x0).epsilon(1e-12));
  CHECK(back.box().y1 == doctest::Approx(box.y1).epsilon(1e-12));
  double max_err = 0.0;
  for (int row = 0; row < 56; ++row) {
    for (int col = 0; col < 56; ++col) {
      max_err = std::max(max_err, std::abs(back.at(col, row) - m.at(col, row)));
    }
  }
  CHECK(max_err <= 0.5 / 65535.0);
}

TEST_CASE("mask reader requires the sidecar") {
  TempDir tmp;
  const fs::path p = tmp.path / "bare.pgm";
  write_pgm16(p, 2, 2, std::vector<uint16_t>{0, 0, 0, 0});
  CHECK_THROWS_AS(read_mask(p), IoError);  // no .json next to it

  const fs::path p2 = tmp.path / "bad.pgm";
  write_pgm16(p2, 2, 2, std::vector<uint16_t>{0, 0, 0, 0});
  std::ofstream(tmp.path / "bad.pgm.json") << "{\"width\": 3}";
  CHECK_THROWS_AS(read_mask(p2), IoError);
}

TEST_CASE("NoiseSpec validation") {
  NoiseSpec n;
  CHECK_NOTHROW(n.validate());
  CHECK_FALSE(n.any());
  n.gaussian_sigma = 0.05;
  CHECK(n.any());
  n = NoiseSpec{};
  n.salt_fraction = 1.5;
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
  n = NoiseSpec{};
  n.truncation = {0.0, 0.0, 0.4, 0.0};  // 0.4 is out (half-open range)
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
  n = NoiseSpec{};
  n.additive_uniform_amplitude = -0.1;
  CHECK_THROWS_AS(n.validate(), std::invalid_argument);
}

TEST_CASE("truncate_box shrinks each side by its fraction") {
  const Box b{10, 20, 110, 70};  // 100 x 50
  const Box t = truncate_box(b, {0.1, 0.2, 0.15, 0.0});
  CHECK(t.x0 == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(t.y0 == doctest::Approx(30.0).epsilon(1e-12));
  CHECK(t.x1 == doctest::Approx(95.0).epsilon(1e-12));
  CHECK(t.y1 == doctest::Approx(70.0).epsilon(1e-12));
  const Box same = truncate_box(b, {0, 0, 0, 0});
  CHECK(same.x0 == b.x0);
  CHECK(same.x1 == b.x1);
}

TEST_CASE("margin_box grows the bounding box symmetrically") {
  const Quad q({0, 0}, {10, 0}, {10, 4}, {0, 4});
  const Box b = margin_box(q, 0.15);
  CHECK(b.x0 == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(b.x1 == doctest::Approx(11.5).epsilon(1e-12));
  CHECK(b.y0 == doctest::Approx(-0.6).epsilon(1e-12));
  CHECK(b.y1 == doctest::Approx(4.6).epsilon(1e-12));
}

TEST_CASE("synth_mask is deterministic in the record seed") {
  Rng rng(62);
  const Quad q = random_quad(rng);
  const Box box = margin_box(q, 0.15);
  NoiseSpec noise;
  noise.gaussian_sigma = 0.05;
  noise.additive_uniform_amplitude = 0.02;
  noise.salt_fraction = 0.01;
  const SoftMask a = synth_mask(q, box, 56, 56, noise, 777);
  const SoftMask b = synth_mask(q, box, 56, 56, noise, 777);
  CHECK(a.scores() == b.scores());
  const SoftMask c = synth_mask(q, box, 56, 56, noise, 778);
  CHECK(a.scores() != c.scores());
  // clamping holds even under heavy noise
  NoiseSpec heavy;
  heavy.gaussian_sigma = 1.0;
  heavy.additive_uniform_amplitude = 0.5;
  const SoftMask d = synth_mask(q, box, 56, 56, heavy, 7);
  for (double s : d.scores()) {
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
  }
}

TEST_CASE("zero noise means exact rasterization") {
  Rng rng(63);
  const Quad q = random_quad(rng);
  const Box box = margin_box(q, 0.15);
  const SoftMask clean = rasterize_label(q, 56, 56, box);
  const SoftMask synth = synth_mask(q, box, 56, 56, NoiseSpec{}, 123);
  CHECK(synth.scores() == clean.scores());
}

TEST_CASE("truncation re-rasterizes over the shrunk box") {
  Rng rng(64);
  const Quad q = random_quad(rng);
  const Box box = margin_box(q, 0.15);
  NoiseSpec noise;
  noise.truncation = {0.0, 0.0, 0.15, 0.0};
  const SoftMask t = synth_mask(q, box, 56, 56, noise, 5);
  const Box want = truncate_box(box, noise.truncation);
  CHECK(t.box().x1 == doctest::Approx(want.x1).epsilon(1e-12));
  CHECK(t.box().x0 == doctest::Approx(box.x0).epsilon(1e-12));
  const SoftMask direct = rasterize_label(q, 56, 56, want);
  CHECK(t.scores() == direct.scores());
}

TEST_CASE("manifest write/read round trip") {
  TempDir tmp;
  CorpusManifest m;
  m.mask_width = 56;
  m.mask_height = 48;
  m.seed = 42;
  m.noise.gaussian_sigma = 0.05;
  m.noise.truncation = {0.1, 0.0, 0.0, 0.05};
  m.records.push_back({"r00000", Quad({0, 0}, {4, 0}, {4, 2}, {0, 2}),
                       "masks/r00000.pgm", Box{-1, -1, 5, 3}, 999});
  const fs::path p = tmp.path / "manifest.json";
  write_manifest(m, p);
  const CorpusManifest back = read_manifest(p);
  CHECK(back.mask_width == 56);
  CHECK(back.mask_height == 48);
  CHECK(back.seed == 42);
  CHECK(back.noise.gaussian_sigma == doctest::Approx(0.05));
  CHECK(back.noise.truncation[0] == doctest::Approx(0.1));
  REQUIRE(back.records.size() == 1);
  CHECK(back.records[0].id == "r00000");
  CHECK(back.records[0].seed == 999);
  CHECK(back.records[0].quad[1].x == doctest::Approx(4.0));
  CHECK(back.records[0].box.x0 == doctest::Approx(-1.0));
  // serialization is byte-stable
  const std::string first = slurp(p);
  write_manifest(back, p);
  CHECK(slurp(p) == first);
}

TEST_CASE("read_manifest validates structure") {
  TempDir tmp;
  const fs::path p = tmp.path / "manifest.json";
  CHECK_THROWS_AS(read_manifest(p), IoError);  // missing file
  std::ofstream(p) << "not json";
  CHECK_THROWS_AS(read_manifest(p), IoError);
  std::ofstream(p, std::ios::trunc) << "{\"mask_width\": 56}";
  CHECK_THROWS_AS(read_manifest(p), IoError);
}

TEST_CASE("corpus generation is reproducible and worker-independent") {
  TempDir tmp;
  SynthOptions opt;
  opt.count = 6;
  opt.seed = 2024;
  opt.noise.gaussian_sigma = 0.03;
  opt.noise.salt_fraction = 0.01;
  opt.workers = 1;
  const CorpusManifest m1 = generate_corpus(opt, tmp.path / "a");
  opt.workers = 4;
  const CorpusManifest m2 = generate_corpus(opt, tmp.path / "b");
  REQUIRE(m1.records.size() == 6);
  REQUIRE(m2.records.size() == 6);
  CHECK(slurp(tmp.path / "a" / "manifest.json") ==
        slurp(tmp.path / "b" / "manifest.json"));
  for (const CorpusRecord& rec : m1.records) {
    CHECK(slurp(tmp.path / "a" / rec.mask_path) ==
          slurp(tmp.path / "b" / rec.mask_path));
    CHECK(rec.seed ==
          mix_seed(2024, static_cast<uint64_t>(&rec - m1.records.data())));
  }
  // a different master seed changes the corpus
  opt.seed = 2025;
  const CorpusManifest m3 = generate_corpus(opt, tmp.path / "c");
  CHECK(slurp(tmp.path / "a" / "manifest.json") !=
        slurp(tmp.path / "c" / "manifest.json"));
}

TEST_CASE("corpus masks decode back to their quads") {
  TempDir tmp;
  SynthOptions opt;
  opt.count = 4;
  opt.seed = 77;
  const CorpusManifest m = generate_corpus(opt, tmp.path);
  for (const CorpusRecord& rec : m.records) {
    const SoftMask mask = read_mask(tmp.path / rec.mask_path);
    CHECK(mask.width() == 56);
    CHECK(mask.box().x0 == doctest::Approx(rec.box.x0).epsilon(1e-9));
    // noiseless corpus: mask equals the quantized clean label
    const SoftMask clean = rasterize_label(rec.quad, 56, 56, rec.box);
    double max_err = 0.0;
    for (size_t i = 0; i < clean.scores().size(); ++i) {
      max_err = std::max(max_err,
                         std::abs(mask.scores()[i] - clean.scores()[i]));
    }
    CHECK(max_err <= 0.5 / 65535.0);
  }
}

TEST_CASE("synth options are validated") {
  TempDir tmp;
  SynthOptions opt;
  opt.count = 0;
  CHECK_THROWS_AS(generate_corpus(opt, tmp.path), std::invalid_argument);
  opt = SynthOptions{};
  opt.count = 1;
  opt.workers = 0;
  CHECK_THROWS_AS(generate_corpus(opt, tmp.path), std::invalid_argument);
}
