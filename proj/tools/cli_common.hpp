#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pyramask/baseline_decoder.hpp"
#include "pyramask/evaluation.hpp"
#include "pyramask/plane_clustering.hpp"
#include "pyramask/synth.hpp"

namespace pyramask::cli {

// Everything a config file can carry; command-line flags override fields
// individually after the file is loaded.
struct AppConfig {
  ClusteringConfig clustering;
  NoiseSpec noise;
  BaselineOptions baseline;
  // Whether the config file pinned the baseline threshold explicitly
  // (bench otherwise ties it to the clustering positive threshold).
  bool baseline_threshold_configured = false;
};

// Throws IoError on unreadable/malformed files, std::invalid_argument on
// out-of-range values.
AppConfig load_config(const std::filesystem::path& path);

// "0.5,0.6,0.7" -> {0.5, 0.6, 0.7}; throws std::invalid_argument.
std::vector<double> parse_double_list(const std::string& text);

// JSON Lines annotations: {"id": str, "quad": [8 numbers],
// "confidence"?: num, "ignore"?: bool}, one object per region.
struct AnnotationRecord {
  std::string id;
  Quad quad;
  double confidence = 1.0;
  bool ignore = false;
};
std::vector<AnnotationRecord> read_jsonl(const std::filesystem::path& path);

// Group predictions and ground truth into per-image samples, ordered by
// lexicographic image id so downstream reports are stable.
std::vector<ImageSample> group_samples(
    const std::vector<AnnotationRecord>& preds,
    const std::vector<AnnotationRecord>& gts);

struct GenerateArgs {
  std::string quad;  // "x1,y1,x2,y2,x3,y3,x4,y4"
  std::string box;   // "x0,y0,x1,y1"; empty -> 15% margin box of the quad
  int width = 56;
  int height = 56;
  std::string out;
};

struct DecodeArgs {
  std::string mask_path;
  std::string method = "pyramid";
  std::string bbox;  // empty -> the mask's own box
  std::string id;    // empty -> mask filename stem
  std::string out;   // empty -> stdout
  AppConfig config;
};

struct SynthArgs {
  int count = 0;
  int width = 56;
  int height = 56;
  double margin = 0.15;
  uint64_t seed = 0;
  int workers = 1;
  std::string out_dir;
  AppConfig config;
};

struct EvalArgs {
  std::string pred_path;
  std::string gt_path;
  std::vector<double> thresholds;
  std::string out;  // report path prefix; empty -> stdout only
};

struct BenchArgs {
  std::string corpus;  // manifest path or its directory
  std::vector<std::string> methods{"baseline", "pyramid"};
  std::vector<double> thresholds;
  int workers = 1;
  std::string out;  // report path prefix; empty -> stdout only
  AppConfig config;
};

int cmd_generate(const GenerateArgs& args);
int cmd_decode(const DecodeArgs& args);
int cmd_synth(const SynthArgs& args);
int cmd_eval(const EvalArgs& args);
int cmd_bench(const BenchArgs& args);

inline const std::vector<double>& default_thresholds() {
  static const std::vector<double> kDefaults{0.5, 0.6, 0.7, 0.8, 0.9};
  return kDefaults;
}

}  // namespace pyramask::cli
