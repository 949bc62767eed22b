#include "handpipe/metrics.hpp"

#include <algorithm>
#include <limits>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace handpipe {

double average_precision(const std::vector<FrameDetections>& frames, double iou_match_threshold) {
  struct Ranked {
    double score;
    size_t frame;
    size_t index;
  };
  std::vector<Ranked> ranked;
  size_t total_gt = 0;
  for (size_t f = 0; f < frames.size(); ++f) {
    total_gt += frames[f].gts.size();
    for (size_t i = 0; i < frames[f].preds.size(); ++i) {
      ranked.push_back({frames[f].preds[i].score, f, i});
    }
  }
  if (total_gt == 0) return ranked.empty() ? 1.0 : 0.0;
  if (ranked.empty()) return 0.0;

  std::stable_sort(ranked.begin(), ranked.end(), [](const Ranked& a, const Ranked& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.frame != b.frame) return a.frame < b.frame;
    return a.index < b.index;
  });

  std::vector<std::vector<bool>> gt_matched(frames.size());
  for (size_t f = 0; f < frames.size(); ++f) gt_matched[f].assign(frames[f].gts.size(), false);

  std::vector<double> precision(ranked.size()), recall(ranked.size());
  size_t tp = 0;
  for (size_t r = 0; r < ranked.size(); ++r) {
    const auto& cand = ranked[r];
    const auto& frame = frames[cand.frame];
    double best_iou = 0.0;
    int best_gt = -1;
    for (size_t g = 0; g < frame.gts.size(); ++g) {
      if (gt_matched[cand.frame][g]) continue;
      const double iou = box_iou(frame.preds[cand.index].box, frame.gts[g]);
      if (iou >= iou_match_threshold && iou > best_iou) {
        best_iou = iou;
        best_gt = static_cast<int>(g);
      }
    }
    if (best_gt >= 0) {
      gt_matched[cand.frame][best_gt] = true;
      ++tp;
    }
    precision[r] = static_cast<double>(tp) / static_cast<double>(r + 1);
    recall[r] = static_cast<double>(tp) / static_cast<double>(total_gt);
  }

  // All-points interpolation: running max of precision from the right, then
  // integrate over recall steps.
  for (size_t r = ranked.size() - 1; r-- > 0;) {
    precision[r] = std::max(precision[r], precision[r + 1]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (size_t r = 0; r < ranked.size(); ++r) {
    ap += (recall[r] - prev_recall) * precision[r];
    prev_recall = recall[r];
  }
  return ap;
}

double normalized_landmark_error(const HandLandmarks& pred, const HandLandmarks& gt) {
  const auto& w = gt.points[topo::kWrist];
  const auto& m = gt.points[topo::kMiddleMcp];
  const double palm_sq = (w.x - m.x) * (w.x - m.x) + (w.y - m.y) * (w.y - m.y);
  if (palm_sq <= 0.0) throw std::invalid_argument("normalized_landmark_error: zero palm size");

  double total = 0.0;
  for (int i = 0; i < topo::kNumLandmarks; ++i) {
    const double dx = pred.points[i].x - gt.points[i].x;
    const double dy = pred.points[i].y - gt.points[i].y;
    total += dx * dx + dy * dy;
  }
  return total / (topo::kNumLandmarks * palm_sq);
}

TrackingEvalReport evaluate_tracking(std::vector<EvalRecord>& records, double ap_iou_threshold) {
  TrackingEvalReport report;
  report.frames = static_cast<int64_t>(records.size());
  report.ap_iou_threshold = ap_iou_threshold;

  std::vector<FrameDetections> ap_frames;
  double nle_sum = 0.0;

  for (EvalRecord& record : records) {
    if (record.detector_ran) ++report.detector_runs;
    for (const auto& gesture : record.pred_gestures) report.gesture_counts[gesture]++;

    FrameDetections frame;
    frame.gts = record.gt_boxes;
    frame.preds = record.pred_boxes;
    ap_frames.push_back(std::move(frame));

    record.matches.clear();
    std::vector<bool> gt_used(record.gt_landmarks.size(), false);
    std::vector<bool> pred_used(record.pred_landmarks.size(), false);
    while (true) {
      double best = std::numeric_limits<double>::infinity();
      int best_g = -1, best_p = -1;
      for (size_t g = 0; g < record.gt_landmarks.size(); ++g) {
        if (gt_used[g]) continue;
        for (size_t p = 0; p < record.pred_landmarks.size(); ++p) {
          if (pred_used[p]) continue;
          double d = 0.0;
          for (int i = 0; i < topo::kNumLandmarks; ++i) {
            const auto& a = record.gt_landmarks[g].points[i];
            const auto& b = record.pred_landmarks[p].points[i];
            d += (a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y);
          }
          if (d < best) {
            best = d;
            best_g = static_cast<int>(g);
            best_p = static_cast<int>(p);
          }
        }
      }
      if (best_g < 0) break;
      gt_used[best_g] = true;
      pred_used[best_p] = true;
      record.matches.emplace_back(best_p, best_g);

      const double nle = normalized_landmark_error(record.pred_landmarks[best_p],
                                                   record.gt_landmarks[best_g]);
      nle_sum += nle;
      report.max_normalized_mse = std::max(report.max_normalized_mse, nle);
      ++report.matched_hands;
    }
    for (bool used : gt_used) report.missed_gt += used ? 0 : 1;
    for (bool used : pred_used) report.spurious_tracks += used ? 0 : 1;
  }

  report.average_precision = average_precision(ap_frames, ap_iou_threshold);
  if (report.matched_hands > 0) {
    report.mean_normalized_mse = nle_sum / static_cast<double>(report.matched_hands);
  }
  if (report.frames > 0) {
    report.detector_rate =
        static_cast<double>(report.detector_runs) / static_cast<double>(report.frames);
  }
  return report;
}

double percentile(std::vector<double> samples, double p) {
  if (samples.empty()) return 0.0;
  std::sort(samples.begin(), samples.end());
  const double rank = p / 100.0 * static_cast<double>(samples.size());
  size_t index = static_cast<size_t>(std::ceil(rank));
  index = std::clamp<size_t>(index, 1, samples.size());
  return samples[index - 1];
}

BenchReport bench_pipeline(const graph::GraphSpec& spec, const std::vector<HandScene>& scenes,
                           int repetitions, const graph::RunOptions& options) {
  BenchReport report;
  report.frames = static_cast<int>(scenes.size());
  report.repetitions = std::max(1, repetitions);

  graph::RunOptions run_options = options;
  run_options.collect_timing = true;

  std::map<std::string, std::vector<double>> durations;
  std::map<std::string, int64_t> fires;
  int64_t detector_fires = 0;

  const auto start = std::chrono::steady_clock::now();
  for (int rep = 0; rep < report.repetitions; ++rep) {
    std::map<std::string, std::vector<graph::Packet>> inputs;
    inputs[spec.inputs.at(0)] = graph::scenes_to_packets(scenes);
    const graph::RunResult result = graph::run_graph(spec, inputs, run_options);
    for (const auto& [name, stats] : result.stats) {
      auto& bucket = durations[name];
      bucket.insert(bucket.end(), stats.durations_us.begin(), stats.durations_us.end());
      fires[name] += stats.fires;
    }
  }
  report.total_wall_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.throughput_fps = report.total_wall_s > 0.0
                              ? report.frames * report.repetitions / report.total_wall_s
                              : 0.0;

  for (const auto& node : spec.nodes) {
    StageTiming stage;
    stage.name = node.name;
    stage.fires = fires[node.name];
    stage.p50_us = percentile(durations[node.name], 50.0);
    stage.p95_us = percentile(durations[node.name], 95.0);
    report.stages.push_back(stage);
    if (node.type == "palm_detector") detector_fires += fires[node.name];
  }
  if (!scenes.empty()) {
    report.detector_rate = static_cast<double>(detector_fires) /
                           static_cast<double>(scenes.size() * report.repetitions);
  }
  return report;
}

}  // namespace handpipe
