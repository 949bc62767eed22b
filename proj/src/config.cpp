#include "handpipe/config.hpp"

#include <json.hpp>

#include "handpipe/error.hpp"

namespace handpipe {

using nlohmann::json;

namespace {

double checked_threshold(const json& obj, const char* name, double fallback) {
  if (!obj.contains(name)) return fallback;
  const double v = obj[name].get<double>();
  if (v < 0.0 || v > 1.0) {
    throw ConfigError(std::string("config: '") + name + "' must be in [0,1]");
  }
  return v;
}

std::optional<FingerStateKind> pattern_state(char c, const std::string& where) {
  switch (c) {
    case 'S': return FingerStateKind::kStraight;
    case 'B': return FingerStateKind::kBent;
    case '*': return std::nullopt;
  }
  throw ConfigError(where + ": pattern characters must be S, B or *");
}

void parse_gesture(const json& g, GestureConfig& cfg) {
  if (g.contains("straight_max_deg")) cfg.straight_max_deg = g["straight_max_deg"].get<double>();
  if (g.contains("bent_min_deg")) cfg.bent_min_deg = g["bent_min_deg"].get<double>();
  if (g.contains("thumb_straight_max_deg")) {
    cfg.thumb_straight_max_deg = g["thumb_straight_max_deg"].get<double>();
  }
  if (g.contains("pinch_max_fraction")) {
    cfg.pinch_max_fraction = g["pinch_max_fraction"].get<double>();
  }
  if (!g.contains("rules")) return;

  // Row format: {"pattern":"SBBBB","pinch":false,"label":"THUMBS_UP"}, finger
  // order thumb..pinky, first match wins.
  cfg.rules.clear();
  for (const json& row : g["rules"]) {
    GestureRule rule;
    const std::string pattern = row.at("pattern").get<std::string>();
    if (pattern.size() != topo::kNumFingers) {
      throw ConfigError("config: gesture pattern must have 5 characters");
    }
    for (int f = 0; f < topo::kNumFingers; ++f) {
      rule.pattern[f] = pattern_state(pattern[f], "config: gesture rule");
    }
    if (row.contains("pinch")) rule.require_pinch = row["pinch"].get<bool>();
    const std::string label = row.at("label").get<std::string>();
    const auto parsed = gesture_label_from_name(label);
    if (!parsed) throw ConfigError("config: unknown gesture label '" + label + "'");
    rule.label = *parsed;
    cfg.rules.push_back(rule);
  }
}

}  // namespace

PipelineConfig parse_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("config: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("config: document must be a JSON object");
  if (doc.contains("schema") && doc["schema"] != "handpipe/v1") {
    throw FormatError("config: unsupported schema version");
  }

  PipelineConfig cfg;
  if (doc.contains("seed")) {
    cfg.seed = doc["seed"].get<uint64_t>();
    cfg.seed_set = true;
  }

  if (doc.contains("anchors")) {
    const json& a = doc["anchors"];
    AnchorConfig anchors;
    anchors.input_size = a.contains("input_size") ? a["input_size"].get<int>() : 192;
    anchors.layers.clear();
    for (const json& layer : a.at("layers")) {
      AnchorLayer l;
      l.stride = layer.at("stride").get<int>();
      for (const json& s : layer.at("scales")) l.scales.push_back(s.get<double>());
      anchors.layers.push_back(std::move(l));
    }
    generate_anchors(anchors);  // validates strides and scales
    cfg.anchors = std::move(anchors);
  }

  if (doc.contains("detector")) {
    const json& d = doc["detector"];
    cfg.score_threshold = checked_threshold(d, "score_threshold", cfg.score_threshold);
    cfg.nms_iou_threshold = checked_threshold(d, "iou_threshold", cfg.nms_iou_threshold);
    if (d.contains("nms")) {
      const std::string mode = d["nms"].get<std::string>();
      if (mode == "greedy") {
        cfg.nms = NmsMode::kGreedy;
      } else if (mode == "blend") {
        cfg.nms = NmsMode::kBlend;
      } else {
        throw ConfigError("config: nms must be 'greedy' or 'blend'");
      }
    }
    if (d.contains("noise_sigma")) cfg.detector_noise_sigma = d["noise_sigma"].get<double>();
  }

  if (doc.contains("crop")) {
    const json& c = doc["crop"];
    auto& crop = cfg.tracker.crop;
    if (c.contains("detection_expand")) crop.detection_expand = c["detection_expand"].get<double>();
    if (c.contains("detection_shift")) crop.detection_shift = c["detection_shift"].get<double>();
    if (c.contains("landmark_expand")) crop.landmark_expand = c["landmark_expand"].get<double>();
    if (crop.detection_expand <= 0.0 || crop.landmark_expand <= 0.0) {
      throw ConfigError("config: crop expand factors must be positive");
    }
  }

  if (doc.contains("tracker")) {
    const json& t = doc["tracker"];
    if (t.contains("max_hands")) cfg.tracker.max_hands = t["max_hands"].get<int>();
    if (cfg.tracker.max_hands < 1) throw ConfigError("config: max_hands must be at least 1");
    cfg.tracker.presence_threshold =
        checked_threshold(t, "presence_threshold", cfg.tracker.presence_threshold);
    cfg.tracker.association_iou =
        checked_threshold(t, "association_iou", cfg.tracker.association_iou);
    if (t.contains("redetect_interval")) {
      cfg.tracker.redetect_interval = t["redetect_interval"].get<int>();
    }
    if (t.contains("probe_max_age")) cfg.tracker.probe_max_age = t["probe_max_age"].get<int>();
    if (t.contains("gating")) cfg.tracker.gating = t["gating"].get<bool>();
  }

  if (doc.contains("backend")) {
    const json& b = doc["backend"];
    if (b.contains("tier")) {
      const std::string tier = b["tier"].get<std::string>();
      if (tier == "light") {
        cfg.tier = BackendTier::kLight;
      } else if (tier == "full") {
        cfg.tier = BackendTier::kFull;
      } else if (tier == "heavy") {
        cfg.tier = BackendTier::kHeavy;
      } else {
        throw ConfigError("config: tier must be light, full or heavy");
      }
    }
    if (b.contains("noise_sigma")) cfg.backend_noise_sigma = b["noise_sigma"].get<double>();
    if (b.contains("flip_probability")) {
      cfg.backend_flip_probability = b["flip_probability"].get<double>();
    }
    if (b.contains("sim_cost_us")) cfg.backend_sim_cost_us = b["sim_cost_us"].get<int64_t>();
  }

  if (doc.contains("gesture")) parse_gesture(doc["gesture"], cfg.tracker.gesture);
  if (doc.contains("graph")) cfg.graph_path = doc["graph"].get<std::string>();

  return cfg;
}

}  // namespace handpipe
