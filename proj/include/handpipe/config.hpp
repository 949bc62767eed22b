#ifndef HANDPIPE_CONFIG_HPP_
#define HANDPIPE_CONFIG_HPP_

#include <cstdint>
#include <optional>
#include <string>

#include "handpipe/backend.hpp"
#include "handpipe/tracker.hpp"

namespace handpipe {

// Everything the CLI needs to assemble a pipeline. The seed is mandatory
// (from the config file or the --seed flag) so every run is reproducible.
struct PipelineConfig {
  uint64_t seed = 1;
  bool seed_set = false;

  AnchorConfig anchors = AnchorConfig::defaults();
  double score_threshold = 0.5;
  double nms_iou_threshold = 0.3;
  NmsMode nms = NmsMode::kGreedy;
  double detector_noise_sigma = 0.0;

  TrackerConfig tracker;
  BackendTier tier = BackendTier::kFull;
  // Optional overrides of the tier's synthetic capability (a zero noise_sigma
  // gives a perfect oracle run).
  std::optional<double> backend_noise_sigma;
  std::optional<double> backend_flip_probability;
  std::optional<int64_t> backend_sim_cost_us;
  std::string graph_path;  // empty = built-in hand-tracking graph

  DetectorParams detector_params() const {
    return {anchors, score_threshold, nms_iou_threshold, nms, detector_noise_sigma};
  }

  BackendCapability backend_capability() const {
    BackendCapability cap = BackendCapability::for_tier(tier);
    if (backend_noise_sigma) cap.noise_sigma = *backend_noise_sigma;
    if (backend_flip_probability) cap.flip_probability = *backend_flip_probability;
    if (backend_sim_cost_us) cap.sim_cost_us = *backend_sim_cost_us;
    return cap;
  }

  static PipelineConfig defaults() { return {}; }
};

// Parses the config JSON document; missing fields keep their defaults.
// Throws FormatError on malformed JSON and ConfigError on out-of-range
// values.
PipelineConfig parse_config(const std::string& json_text);

}  // namespace handpipe

#endif  // HANDPIPE_CONFIG_HPP_
