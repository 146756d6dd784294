#pragma once

#include <array>
#include <string>
#include <vector>

#include "pyramask/errors.hpp"
#include "pyramask/geometry.hpp"

namespace pyramask {

struct Prediction {
  Quad quad;
  double confidence = 1.0;
};

struct GtRegion {
  Quad quad;
  bool ignore = false;
};

// One scored image: the predictions and ground-truth regions to match.
struct ImageSample {
  std::string id;
  std::vector<Prediction> predictions;
  std::vector<GtRegion> ground_truth;
};

struct MatchPair {
  int pred_index = -1;
  int gt_index = -1;
  double iou = 0.0;
};

struct MatchResult {
  std::vector<MatchPair> matches;  // to counted (non-ignored) gts only
  // Predictions that matched an ignored gt drop out of the precision
  // denominator; everything else counts.
  int counted_predictions = 0;
  int counted_ground_truth = 0;  // non-ignored gts
};

// One-to-one greedy matching. Predictions are visited in order of
// descending confidence (ties keep input order); each takes the unmatched
// ground-truth region of highest IoU, if that IoU reaches the threshold
// (IoU ties go to the lower gt index). A prediction whose best admissible
// region is flagged `ignore` consumes it silently: neither side counts.
// Non-convex prediction quads score IoU 0 against everything.
MatchResult match_greedy(const std::vector<Prediction>& preds,
                         const std::vector<GtRegion>& gts,
                         double iou_threshold);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

// precision = matched/num_pred, recall = matched/num_gt, f = harmonic mean;
// each guarded to 0 when its denominator is 0.
Prf prf(long matched, long num_pred, long num_gt);

struct EvalRow {
  double iou_threshold = 0.0;
  long matched = 0;
  long num_pred = 0;
  long num_gt = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_measure = 0.0;
};

struct EvalReport {
  static constexpr double kHistLow = 0.5;
  static constexpr double kHistBinWidth = 0.05;
  static constexpr int kHistBins = 10;

  std::vector<EvalRow> rows;  // one per threshold, ascending
  // IoU values of the matches found at threshold 0.5, binned over
  // [0.5, 1.0]; an IoU of exactly 1.0 lands in the last bin.
  std::array<long, kHistBins> histogram{};
};

// Matching runs independently per threshold and per image; counts are
// summed across images. The histogram always comes from a threshold-0.5
// matching, whether or not 0.5 is in `thresholds`.
// Requires thresholds non-empty, strictly ascending, each in (0, 1].
EvalReport iou_sweep(const std::vector<ImageSample>& samples,
                     const std::vector<double>& thresholds);

// Single-image convenience overload.
EvalReport iou_sweep(const std::vector<Prediction>& preds,
                     const std::vector<GtRegion>& gts,
                     const std::vector<double>& thresholds);

struct BoxSize {
  double width = 0.0;
  double height = 0.0;
};

// Aspect-ratio anchor ladder: the low_q and high_q empirical quantiles of
// w/h (linear interpolation between order statistics) as endpoints, with
// count - 2 interior values in geometric progression between them.
// Throws EmptyDataset for no boxes, std::invalid_argument for bad
// quantiles, count < 2, or non-positive box sides.
std::vector<double> compute_anchor_ratios(const std::vector<BoxSize>& boxes,
                                          double low_q, double high_q,
                                          int count);

}  // namespace pyramask
