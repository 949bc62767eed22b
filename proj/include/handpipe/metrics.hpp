#ifndef HANDPIPE_METRICS_HPP_
#define HANDPIPE_METRICS_HPP_

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "handpipe/graph.hpp"
#include "handpipe/types.hpp"

namespace handpipe {

// Evaluation harness: detection average precision, palm-size-normalized
// landmark error, and pipeline benchmarks.

struct ScoredBox {
  AxisAlignedBox box;
  double score = 0.0;
};

struct FrameDetections {
  std::vector<ScoredBox> preds;
  std::vector<AxisAlignedBox> gts;
};

// Rank all predictions by score, greedy-match each to an unmatched same-frame
// ground truth with IoU >= iou_match_threshold, and integrate the
// all-points-interpolated precision-recall curve. No ground truth and no
// predictions means AP = 1; predictions without ground truth score 0.
double average_precision(const std::vector<FrameDetections>& frames,
                         double iou_match_threshold = 0.5);

// Mean over the 21 landmarks of squared 2D error divided by palm_size^2,
// where palm_size is the ground-truth wrist to middle-MCP distance. Returned
// as a fraction (multiply by 100 for the percent convention). Throws on zero
// palm size.
double normalized_landmark_error(const HandLandmarks& pred, const HandLandmarks& gt);

// One evaluated frame: ground truth and predictions share the timestamp.
struct EvalRecord {
  int64_t t_us = 0;
  bool detector_ran = false;
  std::vector<HandLandmarks> gt_landmarks;
  std::vector<AxisAlignedBox> gt_boxes;
  std::vector<HandLandmarks> pred_landmarks;
  std::vector<ScoredBox> pred_boxes;
  std::vector<std::string> pred_gestures;
  std::vector<std::pair<int, int>> matches;  // (pred, gt), filled by evaluate_tracking
  std::vector<double> timings_us;            // per-frame stage samples, when available
};

struct TrackingEvalReport {
  int64_t frames = 0;
  double average_precision = 0.0;
  double ap_iou_threshold = 0.5;
  double mean_normalized_mse = 0.0;
  double max_normalized_mse = 0.0;
  int64_t matched_hands = 0;
  int64_t missed_gt = 0;
  int64_t spurious_tracks = 0;
  int64_t detector_runs = 0;
  double detector_rate = 0.0;
  std::map<std::string, int64_t> gesture_counts;
};

// Greedy per-frame matching by mean squared 2D landmark distance, then AP
// over the boxes and palm-normalized error over the matched pairs. Fills
// each record's match assignments.
TrackingEvalReport evaluate_tracking(std::vector<EvalRecord>& records,
                                     double ap_iou_threshold = 0.5);

struct StageTiming {
  std::string name;
  int64_t fires = 0;
  double p50_us = 0.0;
  double p95_us = 0.0;
};

struct BenchReport {
  int frames = 0;
  int repetitions = 0;
  double throughput_fps = 0.0;
  double detector_rate = 0.0;  // detector-node fires / frames
  double total_wall_s = 0.0;
  std::vector<StageTiming> stages;
};

// Runs the tracking graph over the sequence `repetitions` times and reports
// per-stage wall-time percentiles, detector invocation rate, and end-to-end
// throughput. Frame results are deterministic; timings are not.
BenchReport bench_pipeline(const graph::GraphSpec& spec, const std::vector<HandScene>& scenes,
                           int repetitions, const graph::RunOptions& options = {});

double percentile(std::vector<double> samples, double p);

}  // namespace handpipe

#endif  // HANDPIPE_METRICS_HPP_
