#include "pyramask/synth.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "pyramask/mask_io.hpp"

namespace pyramask {

namespace {

using nlohmann::json;

json noise_to_json(const NoiseSpec& n) {
  json j;
  j["additive_uniform_amplitude"] = n.additive_uniform_amplitude;
  j["gaussian_sigma"] = n.gaussian_sigma;
  j["salt_fraction"] = n.salt_fraction;
  j["truncation"] = n.truncation;
  j["seed"] = n.seed;
  return j;
}

NoiseSpec noise_from_json(const json& j) {
  NoiseSpec n;
  n.additive_uniform_amplitude =
      j.value("additive_uniform_amplitude", n.additive_uniform_amplitude);
  n.gaussian_sigma = j.value("gaussian_sigma", n.gaussian_sigma);
  n.salt_fraction = j.value("salt_fraction", n.salt_fraction);
  if (j.contains("truncation")) {
    const auto& t = j.at("truncation");
    for (size_t i = 0; i < 4; ++i) n.truncation[i] = t.at(i).get<double>();
  }
  n.seed = j.value("seed", n.seed);
  n.validate();
  return n;
}

std::string record_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "r%05d", index);
  return buf;
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(additive_uniform_amplitude >= 0.0)) {
    throw std::invalid_argument("additive_uniform_amplitude must be >= 0");
  }
  if (!(gaussian_sigma >= 0.0)) {
    throw std::invalid_argument("gaussian_sigma must be >= 0");
  }
  if (!(salt_fraction >= 0.0 && salt_fraction < 1.0)) {
    throw std::invalid_argument("salt_fraction must lie in [0, 1)");
  }
  for (double t : truncation) {
    if (!(t >= 0.0 && t < 0.4)) {
      throw std::invalid_argument("truncation fractions must lie in [0, 0.4)");
    }
  }
}

bool NoiseSpec::any() const {
  return additive_uniform_amplitude > 0.0 || gaussian_sigma > 0.0 ||
         salt_fraction > 0.0 ||
         std::any_of(truncation.begin(), truncation.end(),
                     [](double t) { return t > 0.0; });
}

Quad random_quad(Rng& rng) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    const double cx = rng.uniform(160.0, 352.0);
    const double cy = rng.uniform(160.0, 352.0);
    const double w = rng.uniform(60.0, 240.0);
    const double h = rng.uniform(24.0, 120.0);
    const double angle = rng.uniform(-1.5707963267948966, 1.5707963267948966);
    const double ca = std::cos(angle);
    const double sa = std::sin(angle);
    const double jitter = 0.12 * std::min(w, h);
    std::array<Point2, 4> v{};
    const std::array<Point2, 4> local = {Point2{-0.5 * w, -0.5 * h},
                                         Point2{0.5 * w, -0.5 * h},
                                         Point2{0.5 * w, 0.5 * h},
                                         Point2{-0.5 * w, 0.5 * h}};
    for (int i = 0; i < 4; ++i) {
      const double jx = rng.uniform(-jitter, jitter);
      const double jy = rng.uniform(-jitter, jitter);
      v[i] = {cx + local[i].x * ca - local[i].y * sa + jx,
              cy + local[i].x * sa + local[i].y * ca + jy};
    }
    try {
      Quad q(v);
      if (q.is_convex()) return q;
    } catch (const DegenerateQuad&) {
      // jitter produced a non-simple cycle; re-draw
    }
  }
  throw Error("random_quad: no convex quad after 100 attempts");
}

Box margin_box(const Quad& quad, double margin) {
  if (!(margin >= 0.0)) {
    throw std::invalid_argument("box margin must be >= 0");
  }
  Box b = quad.bounding_box();
  const double mw = margin * b.width();
  const double mh = margin * b.height();
  return {b.x0 - mw, b.y0 - mh, b.x1 + mw, b.y1 + mh};
}

Box truncate_box(const Box& box, const std::array<double, 4>& truncation) {
  const double w = box.width();
  const double h = box.height();
  return {box.x0 + truncation[0] * w, box.y0 + truncation[1] * h,
          box.x1 - truncation[2] * w, box.y1 - truncation[3] * h};
}

SoftMask synth_mask(const Quad& quad, const Box& base_box, int mask_width,
                    int mask_height, const NoiseSpec& noise,
                    uint64_t record_seed) {
  noise.validate();
  const Box box = truncate_box(base_box, noise.truncation);
  SoftMask ideal = rasterize_label(quad, mask_width, mask_height, box);
  if (noise.additive_uniform_amplitude == 0.0 && noise.gaussian_sigma == 0.0 &&
      noise.salt_fraction == 0.0) {
    return ideal;
  }
  std::vector<double> scores = ideal.scores();
  Rng rng(record_seed);
  if (noise.gaussian_sigma > 0.0) {
    for (double& s : scores) s += rng.normal(0.0, noise.gaussian_sigma);
  }
  if (noise.additive_uniform_amplitude > 0.0) {
    const double a = noise.additive_uniform_amplitude;
    for (double& s : scores) s += rng.uniform(-a, a);
  }
  if (noise.salt_fraction > 0.0) {
    for (double& s : scores) {
      if (rng.uniform() < noise.salt_fraction) s = rng.uniform();
    }
  }
  for (double& s : scores) s = std::clamp(s, 0.0, 1.0);
  return SoftMask(mask_width, mask_height, box, std::move(scores));
}

CorpusManifest generate_corpus(const SynthOptions& options,
                               const std::filesystem::path& out_dir) {
  if (options.count < 1) {
    throw std::invalid_argument("corpus size must be >= 1");
  }
  if (options.workers < 1) {
    throw std::invalid_argument("worker count must be >= 1");
  }
  options.noise.validate();
  std::filesystem::create_directories(out_dir / "masks");

  CorpusManifest manifest;
  manifest.mask_width = options.mask_width;
  manifest.mask_height = options.mask_height;
  manifest.seed = options.seed;
  manifest.noise = options.noise;
  manifest.noise.seed = options.seed;

  // Geometry comes from one serial stream; only the per-record mask
  // synthesis (seeded individually) runs on the workers.
  Rng rng(options.seed);
  manifest.records.reserve(options.count);
  for (int i = 0; i < options.count; ++i) {
    const Quad q = random_quad(rng);
    manifest.records.push_back(
        {record_id(i), q, "masks/" + record_id(i) + ".pgm",
         truncate_box(margin_box(q, options.box_margin),
                      options.noise.truncation),
         mix_seed(options.seed, static_cast<uint64_t>(i))});
  }

  std::atomic<int> next{0};
  std::mutex error_mutex;
  int error_index = options.count;
  std::exception_ptr error;
  auto work = [&]() {
    for (int i = next.fetch_add(1); i < options.count;
         i = next.fetch_add(1)) {
      try {
        const CorpusRecord& rec = manifest.records[static_cast<size_t>(i)];
        const SoftMask mask = synth_mask(
            rec.quad, margin_box(rec.quad, options.box_margin),
            options.mask_width, options.mask_height, manifest.noise,
            rec.seed);
        write_mask(mask, out_dir / rec.mask_path);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (i < error_index) {  // report the earliest failing record
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  if (options.workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(options.workers);
    for (int t = 0; t < options.workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  write_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

void write_manifest(const CorpusManifest& manifest,
                    const std::filesystem::path& path) {
  json j;
  j["mask_width"] = manifest.mask_width;
  j["mask_height"] = manifest.mask_height;
  j["seed"] = manifest.seed;
  j["noise"] = noise_to_json(manifest.noise);
  json records = json::array();
  for (const CorpusRecord& r : manifest.records) {
    const auto& v = r.quad.vertices();
    json jr;
    jr["id"] = r.id;
    jr["quad"] = {v[0].x, v[0].y, v[1].x, v[1].y,
                  v[2].x, v[2].y, v[3].x, v[3].y};
    jr["mask"] = r.mask_path;
    jr["box"] = {r.box.x0, r.box.y0, r.box.x1, r.box.y1};
    jr["seed"] = r.seed;
    records.push_back(std::move(jr));
  }
  j["records"] = std::move(records);
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest: " + path.string());
  // Sorted keys plus shortest-round-trip floats make the dump byte-stable.
  out << j.dump(2) << "\n";
  if (!out) throw IoError("manifest write failed: " + path.string());
}

CorpusManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("malformed manifest " + path.string() + ": " + e.what());
  }
  CorpusManifest manifest;
  try {
    manifest.mask_width = j.at("mask_width").get<int>();
    manifest.mask_height = j.at("mask_height").get<int>();
    manifest.seed = j.at("seed").get<uint64_t>();
    manifest.noise = noise_from_json(j.at("noise"));
    for (const json& jr : j.at("records")) {
      const auto& q = jr.at("quad");
      std::array<Point2, 4> v{};
      for (int i = 0; i < 4; ++i) {
        v[static_cast<size_t>(i)] = {q.at(2 * i).get<double>(),
                                     q.at(2 * i + 1).get<double>()};
      }
      const auto& b = jr.at("box");
      manifest.records.push_back(
          {jr.at("id").get<std::string>(), Quad(v),
           jr.at("mask").get<std::string>(),
           Box{b.at(0).get<double>(), b.at(1).get<double>(),
               b.at(2).get<double>(), b.at(3).get<double>()},
           jr.at("seed").get<uint64_t>()});
    }
  } catch (const json::exception& e) {
    throw IoError("manifest schema error " + path.string() + ": " + e.what());
  } catch (const DegenerateQuad& e) {
    throw IoError("manifest holds an invalid quad (" + path.string() +
                  "): " + e.what());
  } catch (const std::invalid_argument& e) {
    throw IoError("manifest holds invalid values (" + path.string() +
                  "): " + e.what());
  }
  return manifest;
}

}  // namespace pyramask
