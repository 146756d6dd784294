#include "pyramask/mask_io.hpp"

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <stdexcept>
#include <string>

namespace pyramask {

namespace {

using nlohmann::json;

std::filesystem::path sidecar_path(const std::filesystem::path& pgm_path) {
  std::filesystem::path p = pgm_path;
  p += ".json";
  return p;
}

// One whitespace-delimited header token, skipping '#' comment lines.
std::string next_token(std::istream& in) {
  std::string tok;
  char c;
  while (in.get(c)) {
    if (c == '#') {
      std::string line;
      std::getline(in, line);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!tok.empty()) return tok;
      continue;
    }
    tok.push_back(c);
  }
  return tok;
}

}  // namespace

void write_pgm16(const std::filesystem::path& path, int width, int height,
                 const std::vector<uint16_t>& samples) {
  if (width < 1 || height < 1 ||
      samples.size() != static_cast<size_t>(width) * height) {
    throw IoError("write_pgm16: sample count does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << "P5\n" << width << " " << height << "\n" << kMaskMaxval << "\n";
  std::vector<unsigned char> raw(samples.size() * 2);
  for (size_t i = 0; i < samples.size(); ++i) {
    raw[2 * i] = static_cast<unsigned char>(samples[i] >> 8);
    raw[2 * i + 1] = static_cast<unsigned char>(samples[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

Pgm16 read_pgm16(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path.string());
  if (next_token(in) != "P5") {
    throw IoError("not a binary PGM (expected magic P5): " + path.string());
  }
  Pgm16 pgm;
  int maxval = 0;
  try {
    pgm.width = std::stoi(next_token(in));
    pgm.height = std::stoi(next_token(in));
    maxval = std::stoi(next_token(in));
  } catch (const std::exception&) {
    throw IoError("malformed PGM header: " + path.string());
  }
  if (pgm.width < 1 || pgm.height < 1 || maxval != kMaskMaxval) {
    throw IoError("unsupported PGM geometry or maxval: " + path.string());
  }
  const size_t n = static_cast<size_t>(pgm.width) * pgm.height;
  std::vector<unsigned char> raw(n * 2);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(in.gcount()) != raw.size()) {
    throw IoError("truncated PGM payload: " + path.string());
  }
  pgm.samples.resize(n);
  for (size_t i = 0; i < n; ++i) {
    pgm.samples[i] =
        static_cast<uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
  }
  return pgm;
}

void write_mask(const SoftMask& mask, const std::filesystem::path& pgm_path) {
  std::vector<uint16_t> samples(mask.scores().size());
  for (size_t i = 0; i < samples.size(); ++i) {
    samples[i] = quantize_score(mask.scores()[i]);
  }
  write_pgm16(pgm_path, mask.width(), mask.height(), samples);
  json meta;
  meta["width"] = mask.width();
  meta["height"] = mask.height();
  meta["box"] = {mask.box().x0, mask.box().y0, mask.box().x1, mask.box().y1};
  std::ofstream out(sidecar_path(pgm_path));
  if (!out) {
    throw IoError("cannot write sidecar: " + sidecar_path(pgm_path).string());
  }
  out << meta.dump() << "\n";
  if (!out) {
    throw IoError("sidecar write failed: " + sidecar_path(pgm_path).string());
  }
}

SoftMask read_mask(const std::filesystem::path& pgm_path) {
  const Pgm16 pgm = read_pgm16(pgm_path);
  std::ifstream in(sidecar_path(pgm_path));
  if (!in) {
    throw IoError("missing sidecar: " + sidecar_path(pgm_path).string());
  }
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw IoError("malformed sidecar " + sidecar_path(pgm_path).string() +
                  ": " + e.what());
  }
  Box box{};
  try {
    if (meta.at("width").get<int>() != pgm.width ||
        meta.at("height").get<int>() != pgm.height) {
      throw IoError("sidecar dimensions disagree with PGM: " +
                    pgm_path.string());
    }
    const auto& b = meta.at("box");
    box = {b.at(0).get<double>(), b.at(1).get<double>(),
           b.at(2).get<double>(), b.at(3).get<double>()};
  } catch (const json::exception& e) {
    throw IoError("sidecar schema error " + sidecar_path(pgm_path).string() +
                  ": " + e.what());
  }
  std::vector<double> scores(pgm.samples.size());
  for (size_t i = 0; i < scores.size(); ++i) {
    scores[i] = dequantize_score(pgm.samples[i]);
  }
  try {
    return SoftMask(pgm.width, pgm.height, box, std::move(scores));
  } catch (const std::invalid_argument& e) {
    throw IoError("mask file invalid " + pgm_path.string() + ": " + e.what());
  }
}

}  // namespace pyramask
