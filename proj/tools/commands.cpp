#include "cli_common.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "pyramask/mask_io.hpp"
#include "pyramask/report.hpp"

namespace pyramask::cli {

namespace {

using nlohmann::json;

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const EmptyMask*>(&e)) return "EmptyMask";
  if (dynamic_cast<const DegenerateQuad*>(&e)) return "DegenerateQuad";
  if (dynamic_cast<const DegenerateInput*>(&e)) return "DegenerateInput";
  if (dynamic_cast<const EmptyDataset*>(&e)) return "EmptyDataset";
  if (dynamic_cast<const IoError*>(&e)) return "IoError";
  if (dynamic_cast<const Error*>(&e)) return "Error";
  return "error";
}

void emit_error_line(std::ostream& out, const std::string& id,
                     const std::string& method, const std::exception& e) {
  json j;
  j["error"] = {{"type", error_type(e)}, {"message", e.what()}};
  if (!id.empty()) j["id"] = id;
  if (!method.empty()) j["method"] = method;
  out << j.dump() << "\n";
}

json quad_to_json(const Quad& q) {
  const auto& v = q.vertices();
  return json::array({v[0].x, v[0].y, v[1].x, v[1].y, v[2].x, v[2].y, v[3].x,
                      v[3].y});
}

Quad quad_from_flat(const std::vector<double>& f) {
  if (f.size() != 8) {
    throw std::invalid_argument("a quad needs exactly 8 coordinates");
  }
  return Quad(std::array<Point2, 4>{Point2{f[0], f[1]}, Point2{f[2], f[3]},
                                    Point2{f[4], f[5]}, Point2{f[6], f[7]}});
}

Box box_from_flat(const std::vector<double>& f) {
  if (f.size() != 4) {
    throw std::invalid_argument("a box needs exactly 4 coordinates");
  }
  const Box b{f[0], f[1], f[2], f[3]};
  if (!b.valid()) {
    throw std::invalid_argument("box must be finite with positive extent");
  }
  return b;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw IoError("write failed: " + path);
}

// Tables shared by eval and bench: one IoU-sweep row block per threshold
// with per-method metric columns, plus relative improvements of each
// method over the first when there are at least two.
ReportTable sweep_table(const std::vector<std::string>& methods,
                        const std::vector<EvalReport>& reports) {
  ReportTable t;
  t.title = "IoU sweep";
  t.columns = {"iou"};
  for (const auto& m : methods) {
    t.columns.push_back(m + "_matched");
    t.columns.push_back(m + "_precision");
    t.columns.push_back(m + "_recall");
    t.columns.push_back(m + "_f");
  }
  for (size_t mi = 1; mi < methods.size(); ++mi) {
    t.columns.push_back(methods[mi] + "_vs_" + methods[0] + "_matched");
    t.columns.push_back(methods[mi] + "_vs_" + methods[0] + "_f");
  }
  if (reports.empty()) return t;
  const size_t n_rows = reports[0].rows.size();
  for (size_t r = 0; r < n_rows; ++r) {
    std::vector<std::string> row;
    row.push_back(fmt_fixed(reports[0].rows[r].iou_threshold, 2));
    for (const auto& rep : reports) {
      const EvalRow& er = rep.rows[r];
      row.push_back(fmt_int(er.matched));
      row.push_back(fmt_fixed(er.precision, 4));
      row.push_back(fmt_fixed(er.recall, 4));
      row.push_back(fmt_fixed(er.f_measure, 4));
    }
    const auto relative = [](double base, double value) {
      if (base == 0.0) {
        return value == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
      }
      return (value - base) / base;
    };
    for (size_t mi = 1; mi < reports.size(); ++mi) {
      const EvalRow& base = reports[0].rows[r];
      const EvalRow& er = reports[mi].rows[r];
      row.push_back(fmt_percent(relative(static_cast<double>(base.matched),
                                         static_cast<double>(er.matched)),
                                2));
      row.push_back(fmt_percent(relative(base.f_measure, er.f_measure), 2));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

ReportTable hist_table(const std::vector<std::string>& methods,
                       const std::vector<EvalReport>& reports) {
  ReportTable t;
  t.title = "Matched IoU histogram (threshold 0.5)";
  t.columns = {"bin"};
  for (const auto& m : methods) t.columns.push_back(m + "_count");
  for (int b = 0; b < EvalReport::kHistBins; ++b) {
    std::vector<std::string> row;
    const double lo = EvalReport::kHistLow + b * EvalReport::kHistBinWidth;
    const double hi = lo + EvalReport::kHistBinWidth;
    row.push_back(fmt_fixed(lo, 2) + "-" + fmt_fixed(hi, 2));
    for (const auto& rep : reports) {
      row.push_back(fmt_int(rep.histogram[static_cast<size_t>(b)]));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void emit_report(const std::vector<ReportTable>& tables,
                 const std::string& out_prefix) {
  const std::string md = render_markdown(tables);
  if (!out_prefix.empty()) {
    write_text(out_prefix + ".md", md);
    for (const auto& t : tables) {
      std::string suffix = t.title.substr(0, t.title.find(' '));
      std::transform(suffix.begin(), suffix.end(), suffix.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      write_text(out_prefix + "_" + suffix + ".csv", render_csv(t));
    }
  }
  std::cout << md;
}

}  // namespace

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("malformed config " + path.string() + ": " + e.what());
  }
  AppConfig cfg;
  try {
    if (j.contains("clustering")) {
      const json& c = j.at("clustering");
      auto& cc = cfg.clustering;
      cc.positive_threshold =
          c.value("positive_threshold", cc.positive_threshold);
      cc.max_iter = c.value("max_iter", cc.max_iter);
      cc.residual_threshold =
          c.value("residual_threshold", cc.residual_threshold);
      cc.irls_iterations = c.value("irls_iterations", cc.irls_iterations);
      cc.irls_tuning_constant =
          c.value("irls_tuning_constant", cc.irls_tuning_constant);
    }
    if (j.contains("noise")) {
      const json& n = j.at("noise");
      auto& ns = cfg.noise;
      ns.additive_uniform_amplitude = n.value(
          "additive_uniform_amplitude", ns.additive_uniform_amplitude);
      ns.gaussian_sigma = n.value("gaussian_sigma", ns.gaussian_sigma);
      ns.salt_fraction = n.value("salt_fraction", ns.salt_fraction);
      if (n.contains("truncation")) {
        const json& t = n.at("truncation");
        for (size_t i = 0; i < 4; ++i) {
          ns.truncation[i] = t.at(i).get<double>();
        }
      }
      ns.seed = n.value("seed", ns.seed);
    }
    if (j.contains("baseline")) {
      const json& b = j.at("baseline");
      cfg.baseline.threshold = b.value("threshold", cfg.baseline.threshold);
      cfg.baseline.half_cell_inflation =
          b.value("half_cell_inflation", cfg.baseline.half_cell_inflation);
      cfg.baseline_threshold_configured = b.contains("threshold");
    }
  } catch (const json::exception& e) {
    throw IoError("config schema error " + path.string() + ": " + e.what());
  }
  cfg.clustering.validate();
  cfg.noise.validate();
  return cfg;
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t pos = 0;
    const double v = std::stod(item, &pos);
    while (pos < item.size() &&
           std::isspace(static_cast<unsigned char>(item[pos]))) {
      ++pos;
    }
    if (pos != item.size()) {
      throw std::invalid_argument("not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

std::vector<AnnotationRecord> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open annotations: " + path.string());
  std::vector<AnnotationRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      std::vector<double> flat;
      for (const json& c : j.at("quad")) flat.push_back(c.get<double>());
      out.push_back({j.at("id").get<std::string>(), quad_from_flat(flat),
                     j.value("confidence", 1.0), j.value("ignore", false)});
    } catch (const std::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " +
                    e.what());
    }
  }
  return out;
}

std::vector<ImageSample> group_samples(
    const std::vector<AnnotationRecord>& preds,
    const std::vector<AnnotationRecord>& gts) {
  std::map<std::string, ImageSample> by_id;
  for (const auto& p : preds) {
    ImageSample& s = by_id[p.id];
    s.id = p.id;
    s.predictions.push_back({p.quad, p.confidence});
  }
  for (const auto& g : gts) {
    ImageSample& s = by_id[g.id];
    s.id = g.id;
    s.ground_truth.push_back({g.quad, g.ignore});
  }
  std::vector<ImageSample> out;
  out.reserve(by_id.size());
  for (auto& [id, sample] : by_id) out.push_back(std::move(sample));
  return out;
}

int cmd_generate(const GenerateArgs& args) {
  try {
    const Quad quad = quad_from_flat(parse_double_list(args.quad));
    const Box box = args.box.empty()
                        ? margin_box(quad, 0.15)
                        : box_from_flat(parse_double_list(args.box));
    const SoftMask mask = rasterize_label(quad, args.width, args.height, box);
    write_mask(mask, args.out);
    json j;
    j["mask"] = args.out;
    j["width"] = mask.width();
    j["height"] = mask.height();
    j["box"] = {box.x0, box.y0, box.x1, box.y1};
    std::cout << j.dump() << "\n";
    return 0;
  } catch (const DegenerateQuad& e) {
    emit_error_line(std::cout, "", "", e);
    return 2;
  }
}

int cmd_decode(const DecodeArgs& args) {
  const SoftMask mask = read_mask(args.mask_path);
  const Box bbox = args.bbox.empty()
                       ? mask.box()
                       : box_from_flat(parse_double_list(args.bbox));
  const std::string id =
      args.id.empty() ? std::filesystem::path(args.mask_path).stem().string()
                      : args.id;
  json j;
  j["id"] = id;
  j["method"] = args.method;
  try {
    if (args.method == "pyramid") {
      const DecodeResult r = decode_pyramid(mask, bbox, args.config.clustering);
      j["quad"] = quad_to_json(r.quad);
      j["iterations"] = r.fit.iterations_run;
      j["residual"] = r.fit.final_residual;
    } else if (args.method == "baseline") {
      const Quad q = decode_baseline(mask, bbox, args.config.baseline);
      j["quad"] = quad_to_json(q);
    } else {
      throw std::invalid_argument("unknown method: " + args.method);
    }
  } catch (const IoError&) {
    throw;
  } catch (const Error& e) {
    emit_error_line(std::cout, id, args.method, e);
    return 2;
  }
  if (!args.out.empty()) {
    auto out = open_out(args.out);
    out << j.dump() << "\n";
  } else {
    std::cout << j.dump() << "\n";
  }
  return 0;
}

int cmd_synth(const SynthArgs& args) {
  SynthOptions opts;
  opts.count = args.count;
  opts.mask_width = args.width;
  opts.mask_height = args.height;
  opts.box_margin = args.margin;
  opts.noise = args.config.noise;
  opts.seed = args.seed;
  opts.workers = args.workers;
  const CorpusManifest manifest = generate_corpus(opts, args.out_dir);
  json j;
  j["manifest"] =
      (std::filesystem::path(args.out_dir) / "manifest.json").string();
  j["records"] = manifest.records.size();
  std::cout << j.dump() << "\n";
  return 0;
}

int cmd_eval(const EvalArgs& args) {
  const auto preds = read_jsonl(args.pred_path);
  const auto gts = read_jsonl(args.gt_path);
  const auto samples = group_samples(preds, gts);
  const EvalReport report = iou_sweep(samples, args.thresholds);
  const std::vector<std::string> methods{"predictions"};
  const std::vector<EvalReport> reports{report};
  emit_report({sweep_table(methods, reports), hist_table(methods, reports)},
              args.out);
  return 0;
}

int cmd_bench(const BenchArgs& args) {
  std::filesystem::path manifest_path(args.corpus);
  if (std::filesystem::is_directory(manifest_path)) {
    manifest_path /= "manifest.json";
  }
  const CorpusManifest manifest = read_manifest(manifest_path);
  const std::filesystem::path base_dir = manifest_path.parent_path();
  if (args.methods.empty()) {
    throw std::invalid_argument("at least one method is required");
  }
  for (const auto& m : args.methods) {
    if (m != "baseline" && m != "pyramid") {
      throw std::invalid_argument("unknown method: " + m);
    }
  }

  // The baseline's binarization threshold follows the clustering positive
  // threshold here (unless configured away) so both methods see the same
  // mask support; the absolute default of 0.5 would read a pyramid's
  // half-height cross-section and make every comparison vacuous.
  BaselineOptions baseline = args.config.baseline;
  if (!args.config.baseline_threshold_configured) {
    baseline.threshold = args.config.clustering.positive_threshold;
    baseline.half_cell_inflation = true;
  }

  const size_t n = manifest.records.size();
  // Referential integrity first: a record whose files are missing becomes
  // an error row and is skipped by every method.
  std::vector<std::string> file_errors(n);
  size_t file_failures = 0;
  for (size_t i = 0; i < n; ++i) {
    const auto mask_path = base_dir / manifest.records[i].mask_path;
    const auto sidecar = mask_path.string() + ".json";
    if (!std::filesystem::exists(mask_path)) {
      file_errors[i] = "missing mask file: " + mask_path.string();
    } else if (!std::filesystem::exists(sidecar)) {
      file_errors[i] = "missing sidecar: " + sidecar;
    }
    if (!file_errors[i].empty()) ++file_failures;
  }

  struct RecordOutcome {
    std::vector<std::optional<Quad>> quads;  // per method
    std::vector<std::string> errors;         // per method
  };
  std::vector<RecordOutcome> outcomes(n);
  for (auto& o : outcomes) {
    o.quads.resize(args.methods.size());
    o.errors.resize(args.methods.size());
  }

  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      if (!file_errors[i].empty()) continue;
      const auto mask_path = base_dir / manifest.records[i].mask_path;
      for (size_t mi = 0; mi < args.methods.size(); ++mi) {
        try {
          const SoftMask mask = read_mask(mask_path);
          if (args.methods[mi] == "pyramid") {
            outcomes[i].quads[mi] =
                decode_pyramid(mask, mask.box(), args.config.clustering)
                    .quad;
          } else {
            outcomes[i].quads[mi] =
                decode_baseline(mask, mask.box(), baseline);
          }
        } catch (const Error& e) {
          outcomes[i].errors[mi] =
              std::string(error_type(e)) + ": " + e.what();
        }
      }
    }
  };
  const int workers = std::max(1, args.workers);
  if (workers == 1 || n <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    const size_t count = std::min<size_t>(static_cast<size_t>(workers), n);
    pool.reserve(count);
    for (size_t t = 0; t < count; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  // One sample per record and method: the decoded quad (if any) against
  // the generating quad.
  std::vector<EvalReport> reports;
  reports.reserve(args.methods.size());
  for (size_t mi = 0; mi < args.methods.size(); ++mi) {
    std::vector<ImageSample> samples;
    samples.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      if (!file_errors[i].empty()) continue;
      ImageSample s;
      s.id = manifest.records[i].id;
      if (outcomes[i].quads[mi]) {
        s.predictions.push_back({*outcomes[i].quads[mi], 1.0});
      }
      s.ground_truth.push_back({manifest.records[i].quad, false});
      samples.push_back(std::move(s));
    }
    reports.push_back(iou_sweep(samples, args.thresholds));
  }

  ReportTable errors_table;
  errors_table.title = "Errors";
  errors_table.columns = {"id", "method", "error"};
  for (size_t i = 0; i < n; ++i) {
    if (!file_errors[i].empty()) {
      errors_table.rows.push_back(
          {manifest.records[i].id, "-", file_errors[i]});
      continue;
    }
    for (size_t mi = 0; mi < args.methods.size(); ++mi) {
      if (!outcomes[i].errors[mi].empty()) {
        errors_table.rows.push_back({manifest.records[i].id,
                                     args.methods[mi],
                                     outcomes[i].errors[mi]});
      }
    }
  }

  emit_report({sweep_table(args.methods, reports),
               hist_table(args.methods, reports), errors_table},
              args.out);

  if (n > 0 && static_cast<double>(file_failures) >
                   0.1 * static_cast<double>(n)) {
    std::cerr << "bench: " << file_failures << " of " << n
              << " records have missing files\n";
    return 2;
  }
  return 0;
}

}  // namespace pyramask::cli
