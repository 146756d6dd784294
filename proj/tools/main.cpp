#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

#include "cli_common.hpp"

namespace cli = pyramask::cli;

namespace {

// 0 ok; 1 usage or unparsable input; 2 empty/degenerate input.
constexpr int kExitUsage = 1;
constexpr int kExitDegenerate = 2;

struct CommonFlags {
  std::string config_path;
  std::string thresholds = "0.5,0.6,0.7,0.8,0.9";
};

cli::AppConfig resolve_config(const std::string& path) {
  return path.empty() ? cli::AppConfig{} : cli::load_config(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"soft pyramid mask codec, synthetic corpus and benchmark tool"};
  app.require_subcommand(1);

  cli::GenerateArgs gen;
  CLI::App* generate =
      app.add_subcommand("generate", "rasterize a quad's pyramid label");
  generate->add_option("--quad", gen.quad,
                       "ground-truth quad as x1,y1,...,x4,y4")
      ->required();
  generate->add_option("--box", gen.box,
                       "rasterization box x0,y0,x1,y1 (default: quad "
                       "bounding box with 15% margin)");
  generate->add_option("--width", gen.width, "mask width (cells)");
  generate->add_option("--height", gen.height, "mask height (cells)");
  generate->add_option("--out", gen.out, "output mask path (.pgm)")
      ->required();

  cli::DecodeArgs dec;
  CommonFlags dec_common;
  double dec_threshold = 0.5;
  bool dec_inflate = false;
  CLI::App* decode =
      app.add_subcommand("decode", "recover a quad from a soft mask");
  decode->add_option("--mask", dec.mask_path, "mask file (.pgm + sidecar)")
      ->required();
  decode
      ->add_option("--method", dec.method, "decoder: pyramid or baseline")
      ->check(CLI::IsMember({"pyramid", "baseline"}));
  decode->add_option("--bbox", dec.bbox,
                     "decode box x0,y0,x1,y1 (default: the mask's box)");
  decode->add_option("--id", dec.id, "record id for the output line");
  decode->add_option("--out", dec.out, "write the JSON line here");
  decode->add_option("--config", dec_common.config_path, "JSON config file");
  CLI::Option* dec_threshold_opt = decode->add_option(
      "--threshold", dec_threshold, "baseline binarization threshold");
  decode->add_flag("--inflate", dec_inflate,
                   "baseline: enclose full cells, not centers");

  cli::SynthArgs synth;
  CommonFlags synth_common;
  double noise_uniform = 0.0, noise_gaussian = 0.0, noise_salt = 0.0;
  std::string truncate;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic mask corpus");
  synth_cmd->add_option("--count", synth.count, "number of records")
      ->required()
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--out", synth.out_dir, "corpus directory")
      ->required();
  synth_cmd->add_option("--width", synth.width, "mask width (cells)");
  synth_cmd->add_option("--height", synth.height, "mask height (cells)");
  synth_cmd->add_option("--margin", synth.margin,
                        "box margin as a fraction of quad extent");
  CLI::Option* seed_opt =
      synth_cmd->add_option("--seed", synth.seed, "master RNG seed");
  synth_cmd->add_option("--workers", synth.workers, "worker threads")
      ->check(CLI::PositiveNumber);
  synth_cmd->add_option("--config", synth_common.config_path,
                        "JSON config file");
  CLI::Option* nu_opt = synth_cmd->add_option(
      "--noise-uniform", noise_uniform, "additive uniform amplitude");
  CLI::Option* ng_opt = synth_cmd->add_option(
      "--noise-gaussian", noise_gaussian, "additive gaussian sigma");
  CLI::Option* ns_opt = synth_cmd->add_option(
      "--noise-salt", noise_salt, "fraction of cells replaced by noise");
  CLI::Option* tr_opt = synth_cmd->add_option(
      "--truncate", truncate, "per-side crop fractions left,top,right,bottom");

  cli::EvalArgs eval;
  CommonFlags eval_common;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "score predictions against ground truth");
  eval_cmd->add_option("--pred", eval.pred_path, "predictions (JSON lines)")
      ->required();
  eval_cmd->add_option("--gt", eval.gt_path, "ground truth (JSON lines)")
      ->required();
  eval_cmd->add_option("--iou-thresholds", eval_common.thresholds,
                       "comma-separated IoU thresholds");
  eval_cmd->add_option("--out", eval.out, "report path prefix");

  cli::BenchArgs bench;
  CommonFlags bench_common;
  std::string bench_methods = "baseline,pyramid";
  CLI::App* bench_cmd = app.add_subcommand(
      "bench", "decode a corpus with each method and tabulate IoU sweeps");
  bench_cmd->add_option("--corpus", bench.corpus,
                        "corpus directory or manifest path")
      ->required();
  bench_cmd->add_option("--method,--methods", bench_methods,
                        "comma-separated decoders to compare");
  bench_cmd->add_option("--iou-thresholds", bench_common.thresholds,
                        "comma-separated IoU thresholds");
  bench_cmd->add_option("--workers", bench.workers, "worker threads")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--out", bench.out, "report path prefix");
  bench_cmd->add_option("--config", bench_common.config_path,
                        "JSON config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (generate->parsed()) return cli::cmd_generate(gen);

    if (decode->parsed()) {
      dec.config = resolve_config(dec_common.config_path);
      if (dec_threshold_opt->count() > 0) {
        dec.config.baseline.threshold = dec_threshold;
      }
      if (dec_inflate) dec.config.baseline.half_cell_inflation = true;
      return cli::cmd_decode(dec);
    }

    if (synth_cmd->parsed()) {
      synth.config = resolve_config(synth_common.config_path);
      if (nu_opt->count() > 0) {
        synth.config.noise.additive_uniform_amplitude = noise_uniform;
      }
      if (ng_opt->count() > 0) {
        synth.config.noise.gaussian_sigma = noise_gaussian;
      }
      if (ns_opt->count() > 0) synth.config.noise.salt_fraction = noise_salt;
      if (tr_opt->count() > 0) {
        const auto t = cli::parse_double_list(truncate);
        if (t.size() != 4) {
          throw std::invalid_argument(
              "--truncate needs exactly 4 fractions (left,top,right,bottom)");
        }
        for (size_t i = 0; i < 4; ++i) synth.config.noise.truncation[i] = t[i];
      }
      synth.config.noise.validate();
      if (seed_opt->count() == 0) synth.seed = synth.config.noise.seed;
      return cli::cmd_synth(synth);
    }

    if (eval_cmd->parsed()) {
      eval.thresholds = cli::parse_double_list(eval_common.thresholds);
      return cli::cmd_eval(eval);
    }

    if (bench_cmd->parsed()) {
      bench.config = resolve_config(bench_common.config_path);
      bench.thresholds = cli::parse_double_list(bench_common.thresholds);
      bench.methods.clear();
      std::stringstream ss(bench_methods);
      std::string m;
      while (std::getline(ss, m, ',')) {
        if (!m.empty()) bench.methods.push_back(m);
      }
      return cli::cmd_bench(bench);
    }
  } catch (const pyramask::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const pyramask::EmptyMask& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const pyramask::EmptyDataset& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const pyramask::DegenerateQuad& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const pyramask::DegenerateInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const pyramask::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
