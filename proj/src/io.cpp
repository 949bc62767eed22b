#include "handpipe/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "handpipe/error.hpp"
#include "handpipe/rng.hpp"

namespace handpipe::io {

using nlohmann::json;

std::string format_number(double v) {
  if (!std::isfinite(v)) throw FormatError("cannot serialize non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

std::string quoted(const std::string& s) {
  // Values written by this codebase are identifier-like; escape defensively.
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::string header_line(const char* kind) {
  return std::string("{\"schema\":\"") + kSchemaVersion + "\",\"kind\":\"" + kind + "\"}";
}

json parse_json_line(const std::string& line, int line_no) {
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
  }
}

void check_header(const json& header, const char* kind, int line_no) {
  if (!header.is_object() || !header.contains("schema") ||
      header["schema"] != kSchemaVersion) {
    throw FormatError("line " + std::to_string(line_no) +
                      ": missing or wrong schema header (expected " +
                      std::string(kSchemaVersion) + ")");
  }
  if (header.contains("kind") && header["kind"] != kind) {
    throw FormatError("line " + std::to_string(line_no) + ": expected kind '" + kind +
                      "' but found '" + header["kind"].get<std::string>() + "'");
  }
}

// Pulls a field with a type check and a path-qualified diagnostic.
const json& field(const json& obj, const char* name, const std::string& where) {
  if (!obj.is_object() || !obj.contains(name)) {
    throw FormatError(where + ": missing field '" + name + "'");
  }
  return obj[name];
}

double number_field(const json& obj, const char* name, const std::string& where) {
  const json& f = field(obj, name, where);
  if (!f.is_number()) throw FormatError(where + ": field '" + name + "' must be a number");
  return f.get<double>();
}

Handedness handedness_from_json(const json& j, const std::string& where) {
  if (!j.is_string()) throw FormatError(where + ": handedness must be a string");
  const std::string s = j.get<std::string>();
  if (s == "Right") return Handedness::kRight;
  if (s == "Left") return Handedness::kLeft;
  throw FormatError(where + ": handedness must be 'Left' or 'Right', got '" + s + "'");
}

template <typename Fn>
void parse_jsonl(std::istream& in, const char* kind, Fn&& per_record) {
  std::string line;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const json j = parse_json_line(line, line_no);
    if (!saw_header) {
      check_header(j, kind, line_no);
      saw_header = true;
      continue;
    }
    per_record(j, line_no);
  }
  if (!saw_header) throw FormatError("empty stream: missing schema header line");
}

}  // namespace

// ---------------------------------------------------------------------------
// Scenes
// ---------------------------------------------------------------------------

std::string scenes_header() { return header_line("scenes"); }

std::string scene_line(const HandScene& scene) {
  std::string out = "{\"t_us\":" + std::to_string(scene.t_us) + ",\"hands\":[";
  for (size_t h = 0; h < scene.hands.size(); ++h) {
    if (h > 0) out += ',';
    const auto& hand = scene.hands[h];
    out += "{\"joints3d\":[";
    for (int i = 0; i < topo::kNumLandmarks; ++i) {
      if (i > 0) out += ',';
      const Vec3& j = hand.joints3d[i];
      out += '[' + format_number(j.x) + ',' + format_number(j.y) + ',' + format_number(j.z) + ']';
    }
    out += "],\"handedness\":";
    out += quoted(handedness_name(hand.handedness));
    out += '}';
  }
  const PinholeCamera& c = scene.camera;
  out += "],\"camera\":{\"fx\":" + format_number(c.fx) + ",\"fy\":" + format_number(c.fy) +
         ",\"cx\":" + format_number(c.cx) + ",\"cy\":" + format_number(c.cy) +
         ",\"w\":" + format_number(c.width) + ",\"h\":" + format_number(c.height) + "}}";
  return out;
}

std::vector<HandScene> parse_scenes(std::istream& in) {
  std::vector<HandScene> scenes;
  parse_jsonl(in, "scenes", [&](const json& j, int line_no) {
    const std::string where = "line " + std::to_string(line_no);
    HandScene scene;
    scene.t_us = static_cast<int64_t>(number_field(j, "t_us", where));

    const json& cam = field(j, "camera", where);
    scene.camera = {number_field(cam, "fx", where),   number_field(cam, "fy", where),
                    number_field(cam, "cx", where),   number_field(cam, "cy", where),
                    number_field(cam, "w", where),    number_field(cam, "h", where)};

    const json& hands = field(j, "hands", where);
    if (!hands.is_array()) throw FormatError(where + ": 'hands' must be an array");
    for (const json& hj : hands) {
      HandScene::Hand hand;
      const json& joints = field(hj, "joints3d", where);
      if (!joints.is_array() || joints.size() != topo::kNumLandmarks) {
        throw FormatError(where + ": 'joints3d' must hold exactly 21 points");
      }
      for (int i = 0; i < topo::kNumLandmarks; ++i) {
        const json& p = joints[i];
        if (!p.is_array() || p.size() != 3) {
          throw FormatError(where + ": joint " + std::to_string(i) + " must be [x,y,z]");
        }
        hand.joints3d[i] = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
      }
      hand.handedness = handedness_from_json(field(hj, "handedness", where), where);
      scene.hands.push_back(hand);
    }
    scenes.push_back(std::move(scene));
  });
  return scenes;
}

// ---------------------------------------------------------------------------
// Tracking stream
// ---------------------------------------------------------------------------

TrackRecord to_track_record(const TrackStepReport& report) {
  TrackRecord rec;
  rec.t_us = report.t_us;
  rec.detector_ran = report.detector_ran;
  for (const auto& out : report.outputs) {
    TrackHandRecord hand;
    hand.id = out.id;
    hand.presence = out.landmarks.presence;
    hand.handedness = out.landmarks.handedness;
    hand.landmarks = out.landmarks.points;
    hand.gesture = gesture_label_name(out.gesture);
    rec.hands.push_back(std::move(hand));
  }
  return rec;
}

std::string track_header() { return header_line("track"); }

std::string track_line(const TrackRecord& record) {
  std::string out = "{\"t_us\":" + std::to_string(record.t_us) +
                    ",\"detector_ran\":" + (record.detector_ran ? "true" : "false") +
                    ",\"hands\":[";
  for (size_t h = 0; h < record.hands.size(); ++h) {
    if (h > 0) out += ',';
    const auto& hand = record.hands[h];
    out += "{\"id\":" + std::to_string(hand.id) +
           ",\"presence\":" + format_number(hand.presence) +
           ",\"handedness\":" + format_number(hand.handedness) + ",\"landmarks\":[";
    for (int i = 0; i < topo::kNumLandmarks; ++i) {
      if (i > 0) out += ',';
      const auto& p = hand.landmarks[i];
      out += '[' + format_number(p.x) + ',' + format_number(p.y) + ',' + format_number(p.z) + ']';
    }
    out += "],\"gesture\":" + quoted(hand.gesture) + '}';
  }
  out += "]}";
  return out;
}

std::string track_line(const TrackStepReport& report) {
  return track_line(to_track_record(report));
}

std::vector<TrackRecord> parse_track(std::istream& in) {
  std::vector<TrackRecord> records;
  parse_jsonl(in, "track", [&](const json& j, int line_no) {
    const std::string where = "line " + std::to_string(line_no);
    TrackRecord rec;
    rec.t_us = static_cast<int64_t>(number_field(j, "t_us", where));
    const json& ran = field(j, "detector_ran", where);
    if (!ran.is_boolean()) throw FormatError(where + ": 'detector_ran' must be a boolean");
    rec.detector_ran = ran.get<bool>();

    const json& hands = field(j, "hands", where);
    if (!hands.is_array()) throw FormatError(where + ": 'hands' must be an array");
    for (const json& hj : hands) {
      TrackHandRecord hand;
      hand.id = static_cast<int>(number_field(hj, "id", where));
      hand.presence = number_field(hj, "presence", where);
      hand.handedness = number_field(hj, "handedness", where);
      const json& lms = field(hj, "landmarks", where);
      if (!lms.is_array() || lms.size() != topo::kNumLandmarks) {
        throw FormatError(where + ": 'landmarks' must hold exactly 21 points");
      }
      for (int i = 0; i < topo::kNumLandmarks; ++i) {
        const json& p = lms[i];
        if (!p.is_array() || p.size() != 3) {
          throw FormatError(where + ": landmark " + std::to_string(i) + " must be [x,y,z]");
        }
        hand.landmarks[i] = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
      }
      const json& gesture = field(hj, "gesture", where);
      if (!gesture.is_string()) throw FormatError(where + ": 'gesture' must be a string");
      hand.gesture = gesture.get<std::string>();
      rec.hands.push_back(std::move(hand));
    }
    records.push_back(std::move(rec));
  });
  return records;
}

// ---------------------------------------------------------------------------
// Raw detector outputs
// ---------------------------------------------------------------------------

std::string raw_header() { return header_line("raw"); }

std::string raw_line(int64_t t_us, const RawDetectorOutput& raw) {
  std::string out = "{\"t_us\":" + std::to_string(t_us) + ",\"logits\":[";
  for (size_t i = 0; i < raw.logits.size(); ++i) {
    if (i > 0) out += ',';
    out += format_number(raw.logits[i]);
  }
  out += "],\"boxes\":[";
  for (size_t i = 0; i < raw.boxes.size(); ++i) {
    if (i > 0) out += ',';
    out += '[' + format_number(raw.boxes[i].dx) + ',' + format_number(raw.boxes[i].dy) + ',' +
           format_number(raw.boxes[i].ds) + ']';
  }
  out += "],\"keypoints\":[";
  for (size_t i = 0; i < raw.keypoints.size(); ++i) {
    if (i > 0) out += ',';
    out += '[';
    for (int k = 0; k < palm_kp::kNumKeypoints; ++k) {
      if (k > 0) out += ',';
      out += '[' + format_number(raw.keypoints[i][k].x) + ',' +
             format_number(raw.keypoints[i][k].y) + ']';
    }
    out += ']';
  }
  out += "]}";
  return out;
}

std::map<int64_t, RawDetectorOutput> parse_raw(std::istream& in) {
  std::map<int64_t, RawDetectorOutput> by_timestamp;
  parse_jsonl(in, "raw", [&](const json& j, int line_no) {
    const std::string where = "line " + std::to_string(line_no);
    const int64_t t_us = static_cast<int64_t>(number_field(j, "t_us", where));
    const json& logits = field(j, "logits", where);
    const json& boxes = field(j, "boxes", where);
    const json& keypoints = field(j, "keypoints", where);
    if (!logits.is_array() || !boxes.is_array() || !keypoints.is_array() ||
        logits.size() != boxes.size() || logits.size() != keypoints.size()) {
      throw FormatError(where + ": logits/boxes/keypoints must be arrays of equal length");
    }
    RawDetectorOutput raw;
    raw.resize(logits.size());
    for (size_t i = 0; i < logits.size(); ++i) {
      raw.logits[i] = logits[i].get<double>();
      const json& b = boxes[i];
      if (!b.is_array() || b.size() != 3) {
        throw FormatError(where + ": box offsets must be [dx,dy,ds]");
      }
      raw.boxes[i] = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>()};
      const json& kps = keypoints[i];
      if (!kps.is_array() || kps.size() != palm_kp::kNumKeypoints) {
        throw FormatError(where + ": each anchor needs 7 keypoint offsets");
      }
      for (int k = 0; k < palm_kp::kNumKeypoints; ++k) {
        raw.keypoints[i][k] = {kps[k][0].get<double>(), kps[k][1].get<double>()};
      }
    }
    by_timestamp[t_us] = std::move(raw);
  });
  return by_timestamp;
}

// ---------------------------------------------------------------------------
// Scripts
// ---------------------------------------------------------------------------

namespace {

constexpr double kDeg = M_PI / 180.0;

void apply_wrist_overrides(const json& kf, sim::PoseParams& pose, const std::string& where) {
  if (kf.contains("wrist_position")) {
    const json& p = kf["wrist_position"];
    if (!p.is_array() || p.size() != 3) {
      throw FormatError(where + ": 'wrist_position' must be [x,y,z] meters");
    }
    pose.wrist_position = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
  }
  if (kf.contains("roll_deg")) pose.roll = kf["roll_deg"].get<double>() * kDeg;
  if (kf.contains("tilt_x_deg")) pose.tilt_x = kf["tilt_x_deg"].get<double>() * kDeg;
  if (kf.contains("tilt_y_deg")) pose.tilt_y = kf["tilt_y_deg"].get<double>() * kDeg;
}

sim::PoseParams parse_explicit_pose(const json& pj, const std::string& where) {
  sim::PoseParams pose;
  const json& flex = field(pj, "flexion_deg", where);
  if (!flex.is_array() || flex.size() != topo::kNumFingers) {
    throw FormatError(where + ": 'flexion_deg' must list 5 fingers");
  }
  for (int f = 0; f < topo::kNumFingers; ++f) {
    const json& row = flex[f];
    if (!row.is_array() || row.size() != 3) {
      throw FormatError(where + ": 'flexion_deg' rows must hold 3 joint angles");
    }
    for (int j = 0; j < 3; ++j) pose.fingers[f].flexion[j] = row[j].get<double>() * kDeg;
  }
  if (pj.contains("abduction_deg")) {
    const json& abd = pj["abduction_deg"];
    if (!abd.is_array() || abd.size() != topo::kNumFingers) {
      throw FormatError(where + ": 'abduction_deg' must list 5 fingers");
    }
    for (int f = 0; f < topo::kNumFingers; ++f) {
      pose.fingers[f].abduction = abd[f].get<double>() * kDeg;
    }
  }
  apply_wrist_overrides(pj, pose, where);
  return pose;
}

}  // namespace

sim::SequenceScript parse_script(const std::string& json_text, uint64_t seed) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("script: ") + e.what());
  }
  check_header(doc, "script", 1);

  sim::SequenceScript script;
  script.fps = number_field(doc, "fps", "script");
  script.frames = static_cast<int>(number_field(doc, "frames", "script"));
  if (doc.contains("hand_model")) {
    const json& hm = doc["hand_model"];
    if (hm.contains("bone_lengths")) {
      const json& bones = hm["bone_lengths"];
      if (!bones.is_array() || bones.size() != topo::kNumFingers) {
        throw FormatError("script.hand_model: 'bone_lengths' must list 5 fingers");
      }
      for (int f = 0; f < topo::kNumFingers; ++f) {
        const json& row = bones[f];
        if (!row.is_array() || row.size() != 3) {
          throw FormatError("script.hand_model: each finger needs 3 bone lengths");
        }
        for (int j = 0; j < 3; ++j) {
          const double len = row[j].get<double>();
          if (len <= 0.0) throw FormatError("script.hand_model: bone lengths must be positive");
          script.model.fingers[f].bone_lengths[j] = len;
        }
      }
    }
    if (hm.contains("bases")) {
      const json& bases = hm["bases"];
      if (!bases.is_array() || bases.size() != topo::kNumFingers) {
        throw FormatError("script.hand_model: 'bases' must list 5 fingers");
      }
      for (int f = 0; f < topo::kNumFingers; ++f) {
        const json& p = bases[f];
        if (!p.is_array() || p.size() != 3) {
          throw FormatError("script.hand_model: base offsets must be [x,y,z] meters");
        }
        script.model.fingers[f].base = {p[0].get<double>(), p[1].get<double>(),
                                        p[2].get<double>()};
      }
    }
    if (hm.contains("palm_width")) script.model.palm_width = hm["palm_width"].get<double>();
    if (hm.contains("thumb_opposition_deg")) {
      script.model.thumb_opposition = hm["thumb_opposition_deg"].get<double>() * kDeg;
    }
  }
  if (doc.contains("camera")) {
    const json& cam = doc["camera"];
    script.camera = {number_field(cam, "fx", "script.camera"),
                     number_field(cam, "fy", "script.camera"),
                     number_field(cam, "cx", "script.camera"),
                     number_field(cam, "cy", "script.camera"),
                     number_field(cam, "w", "script.camera"),
                     number_field(cam, "h", "script.camera")};
  }

  if (!doc.contains("hands")) return script;
  const json& hands = doc["hands"];
  if (!hands.is_array()) throw FormatError("script: 'hands' must be an array");

  for (size_t h = 0; h < hands.size(); ++h) {
    const json& hj = hands[h];
    const std::string hand_where = "script hand " + std::to_string(h);
    sim::HandTrack track;
    const Handedness handedness =
        hj.contains("handedness")
            ? handedness_from_json(hj["handedness"], hand_where)
            : Handedness::kRight;
    if (hj.contains("initially_visible")) {
      track.initially_visible = hj["initially_visible"].get<bool>();
    }

    const json& keyframes = field(hj, "keyframes", hand_where);
    if (!keyframes.is_array() || keyframes.empty()) {
      throw FormatError(hand_where + ": 'keyframes' must be a non-empty array");
    }
    for (size_t k = 0; k < keyframes.size(); ++k) {
      const json& kf = keyframes[k];
      const std::string where = hand_where + " keyframe " + std::to_string(k);
      sim::PoseKeyframe keyframe;
      keyframe.frame = static_cast<int>(number_field(kf, "frame", where));
      if (kf.contains("family")) {
        const std::string name = kf["family"].get<std::string>();
        const auto family = sim::pose_family_from_name(name);
        if (!family) throw FormatError(where + ": unknown pose family '" + name + "'");
        keyframe.pose = sim::sample_pose(mix_u64(seed, mix_u64(h, k)), *family, script.model);
        apply_wrist_overrides(kf, keyframe.pose, where);
      } else if (kf.contains("pose")) {
        keyframe.pose = parse_explicit_pose(kf["pose"], where);
      } else {
        throw FormatError(where + ": needs either 'family' or 'pose'");
      }
      keyframe.pose.handedness = handedness;
      track.keyframes.push_back(std::move(keyframe));
    }

    if (hj.contains("events")) {
      const json& events = hj["events"];
      if (!events.is_array()) throw FormatError(hand_where + ": 'events' must be an array");
      for (const json& ev : events) {
        track.events.push_back({static_cast<int>(number_field(ev, "frame", hand_where)),
                                field(ev, "visible", hand_where).get<bool>()});
      }
    }
    script.hands.push_back(std::move(track));
  }
  return script;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

std::string render_svg(const TrackRecord& record, double width, double height) {
  char buf[256];
  std::string svg;
  std::snprintf(buf, sizeof(buf),
                "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 %.0f %.0f\">\n",
                width, height);
  svg += buf;
  std::snprintf(buf, sizeof(buf), "<rect width=\"%.0f\" height=\"%.0f\" fill=\"#101018\"/>\n",
                width, height);
  svg += buf;

  constexpr double kBaseRadius = 6.0;
  for (const auto& hand : record.hands) {
    for (const auto& edge : topo::kBoneEdges) {
      const auto& a = hand.landmarks[edge[0]];
      const auto& b = hand.landmarks[edge[1]];
      std::snprintf(buf, sizeof(buf),
                    "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" "
                    "stroke=\"#5a7d9a\" stroke-width=\"2\"/>\n",
                    a.x * width, a.y * height, b.x * width, b.y * height);
      svg += buf;
    }
    for (int i = 0; i < topo::kNumLandmarks; ++i) {
      const auto& p = hand.landmarks[i];
      // Closer landmarks (negative z) render larger and lighter.
      const double radius = std::clamp(kBaseRadius * (1.0 - p.z), 2.0, 24.0);
      const int lightness = static_cast<int>(std::clamp(65.0 - p.z * 30.0, 25.0, 95.0));
      std::snprintf(buf, sizeof(buf),
                    "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%.2f\" "
                    "fill=\"hsl(200,80%%,%d%%)\"/>\n",
                    p.x * width, p.y * height, radius, lightness);
      svg += buf;
    }
  }
  svg += "</svg>\n";
  return svg;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw FormatError("cannot open file: " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw FormatError("cannot write file: " + path);
  file << content;
}

}  // namespace handpipe::io
