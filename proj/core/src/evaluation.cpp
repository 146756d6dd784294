#include "pyramask/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pyramask {

namespace {

// Evaluation treats a non-convex prediction as missing everything rather
// than aborting a whole run.
double safe_iou(const Quad& pred, const Quad& gt) {
  try {
    return polygon_iou(pred, gt);
  } catch (const NonConvexInput&) {
    return 0.0;
  }
}

void check_thresholds(const std::vector<double>& thresholds) {
  if (thresholds.empty()) {
    throw std::invalid_argument("at least one IoU threshold is required");
  }
  double prev = 0.0;
  for (double t : thresholds) {
    if (!(t > 0.0 && t <= 1.0)) {
      throw std::invalid_argument("IoU thresholds must lie in (0, 1]");
    }
    if (t <= prev) {
      throw std::invalid_argument("IoU thresholds must be strictly ascending");
    }
    prev = t;
  }
}

}  // namespace

MatchResult match_greedy(const std::vector<Prediction>& preds,
                         const std::vector<GtRegion>& gts,
                         double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0)) {
    throw std::invalid_argument("IoU threshold must lie in (0, 1]");
  }
  std::vector<int> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return preds[a].confidence > preds[b].confidence;
  });

  MatchResult result;
  result.counted_ground_truth = static_cast<int>(
      std::count_if(gts.begin(), gts.end(),
                    [](const GtRegion& g) { return !g.ignore; }));
  std::vector<uint8_t> gt_taken(gts.size(), 0);
  int consumed_by_ignored = 0;
  for (int pi : order) {
    int best_gt = -1;
    double best_iou = 0.0;
    for (size_t gi = 0; gi < gts.size(); ++gi) {
      if (gt_taken[gi]) continue;
      const double iou = safe_iou(preds[pi].quad, gts[gi].quad);
      if (iou >= iou_threshold && iou > best_iou) {
        best_iou = iou;
        best_gt = static_cast<int>(gi);
      }
    }
    if (best_gt < 0) continue;
    gt_taken[best_gt] = 1;
    if (gts[best_gt].ignore) {
      ++consumed_by_ignored;
    } else {
      result.matches.push_back({pi, best_gt, best_iou});
    }
  }
  result.counted_predictions =
      static_cast<int>(preds.size()) - consumed_by_ignored;
  return result;
}

Prf prf(long matched, long num_pred, long num_gt) {
  if (matched < 0 || num_pred < 0 || num_gt < 0) {
    throw std::invalid_argument("prf counts must be non-negative");
  }
  Prf out;
  out.precision =
      num_pred > 0 ? static_cast<double>(matched) / num_pred : 0.0;
  out.recall = num_gt > 0 ? static_cast<double>(matched) / num_gt : 0.0;
  const double pr = out.precision + out.recall;
  out.f_measure = pr > 0.0 ? 2.0 * out.precision * out.recall / pr : 0.0;
  return out;
}

EvalReport iou_sweep(const std::vector<ImageSample>& samples,
                     const std::vector<double>& thresholds) {
  check_thresholds(thresholds);
  EvalReport report;
  report.rows.reserve(thresholds.size());
  for (double t : thresholds) {
    EvalRow row;
    row.iou_threshold = t;
    for (const ImageSample& s : samples) {
      const MatchResult m = match_greedy(s.predictions, s.ground_truth, t);
      row.matched += static_cast<long>(m.matches.size());
      row.num_pred += m.counted_predictions;
      row.num_gt += m.counted_ground_truth;
    }
    const Prf p = prf(row.matched, row.num_pred, row.num_gt);
    row.precision = p.precision;
    row.recall = p.recall;
    row.f_measure = p.f_measure;
    report.rows.push_back(row);
  }
  for (const ImageSample& s : samples) {
    const MatchResult m = match_greedy(s.predictions, s.ground_truth, 0.5);
    for (const MatchPair& pair : m.matches) {
      int bin = static_cast<int>((pair.iou - EvalReport::kHistLow) /
                                 EvalReport::kHistBinWidth);
      bin = std::clamp(bin, 0, EvalReport::kHistBins - 1);
      ++report.histogram[bin];
    }
  }
  return report;
}

EvalReport iou_sweep(const std::vector<Prediction>& preds,
                     const std::vector<GtRegion>& gts,
                     const std::vector<double>& thresholds) {
  std::vector<ImageSample> samples(1);
  samples[0].predictions = preds;
  samples[0].ground_truth = gts;
  return iou_sweep(samples, thresholds);
}

std::vector<double> compute_anchor_ratios(const std::vector<BoxSize>& boxes,
                                          double low_q, double high_q,
                                          int count) {
  if (boxes.empty()) {
    throw EmptyDataset("compute_anchor_ratios: no boxes");
  }
  if (!(low_q > 0.0 && low_q < high_q && high_q < 1.0)) {
    throw std::invalid_argument("quantiles must satisfy 0 < low < high < 1");
  }
  if (count < 2) throw std::invalid_argument("count must be >= 2");
  std::vector<double> ratios;
  ratios.reserve(boxes.size());
  for (const BoxSize& b : boxes) {
    if (!(b.width > 0.0) || !(b.height > 0.0)) {
      throw std::invalid_argument("box sides must be positive");
    }
    ratios.push_back(b.width / b.height);
  }
  std::sort(ratios.begin(), ratios.end());
  const auto quantile = [&ratios](double q) {
    const double pos = q * static_cast<double>(ratios.size() - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, ratios.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return ratios[lo] + frac * (ratios[hi] - ratios[lo]);
  };
  const double lo_v = quantile(low_q);
  const double hi_v = quantile(high_q);
  std::vector<double> out;
  out.reserve(count);
  // Ratios are positive, so a geometric ladder between the endpoints is
  // well-defined; equal endpoints collapse it to a constant.
  const double step = std::pow(hi_v / lo_v, 1.0 / (count - 1));
  double v = lo_v;
  for (int i = 0; i < count; ++i) {
    out.push_back(i + 1 == count ? hi_v : v);
    v *= step;
  }
  return out;
}

}  // namespace pyramask
