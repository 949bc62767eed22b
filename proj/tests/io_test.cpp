#include <doctest.h>

#include <sstream>

#include "handpipe/error.hpp"
#include "handpipe/io.hpp"
#include "handpipe/rng.hpp"
#include "handpipe/simulator.hpp"

using namespace handpipe;

namespace {

std::string emit_scenes(const std::vector<HandScene>& scenes) {
  std::string out = io::scenes_header() + "\n";
  for (const auto& scene : scenes) out += io::scene_line(scene) + "\n";
  return out;
}

}  // namespace

TEST_CASE("format_number uses at most 9 significant digits") {
  CHECK(io::format_number(0.5) == "0.5");
  CHECK(io::format_number(300.0) == "300");
  CHECK(io::format_number(1.0 / 3.0) == "0.333333333");
  CHECK(io::format_number(-0.000123456789) == "-0.000123456789");
  CHECK_THROWS_AS(io::format_number(INFINITY), FormatError);
}

TEST_CASE("scenes stream: emit/parse round trip is byte-stable") {
  std::vector<HandScene> scenes;
  for (int f = 0; f < 5; ++f) {
    HandScene scene = sim::sample_scene(f + 1, 0, 2);
    scene.t_us = f * 33333;
    scenes.push_back(scene);
  }
  const std::string first = emit_scenes(scenes);
  std::istringstream in(first);
  const auto parsed = io::parse_scenes(in);
  REQUIRE(parsed.size() == scenes.size());
  CHECK(emit_scenes(parsed) == first);  // emit ∘ parse is a fixed point

  for (size_t f = 0; f < parsed.size(); ++f) {
    CHECK(parsed[f].t_us == scenes[f].t_us);
    REQUIRE(parsed[f].hands.size() == scenes[f].hands.size());
    for (size_t h = 0; h < parsed[f].hands.size(); ++h) {
      CHECK(parsed[f].hands[h].handedness == scenes[f].hands[h].handedness);
      for (int i = 0; i < topo::kNumLandmarks; ++i) {
        CHECK(parsed[f].hands[h].joints3d[i].x ==
              doctest::Approx(scenes[f].hands[h].joints3d[i].x).epsilon(1e-8));
      }
    }
  }
}

TEST_CASE("scenes stream: header and field diagnostics") {
  SUBCASE("missing header") {
    std::istringstream in("{\"t_us\":0,\"hands\":[],\"camera\":{}}\n");
    CHECK_THROWS_AS(io::parse_scenes(in), FormatError);
  }
  SUBCASE("wrong kind") {
    std::istringstream in("{\"schema\":\"handpipe/v1\",\"kind\":\"track\"}\n");
    CHECK_THROWS_AS(io::parse_scenes(in), FormatError);
  }
  SUBCASE("missing field names the line") {
    std::istringstream in(io::scenes_header() + "\n{\"t_us\":0,\"hands\":[]}\n");
    try {
      io::parse_scenes(in);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
      CHECK(std::string(e.what()).find("camera") != std::string::npos);
    }
  }
  SUBCASE("malformed json names the line") {
    std::istringstream in(io::scenes_header() + "\nnot json\n");
    try {
      io::parse_scenes(in);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}

TEST_CASE("track stream: emit/parse round trip is byte-stable") {
  TrackStepReport report;
  report.t_us = 123456;
  report.detector_ran = true;
  TrackedOutput out;
  out.id = 3;
  out.gesture = GestureLabel::kVictory;
  Rng rng(5);
  for (auto& p : out.landmarks.points) {
    p = {rng.uniform(), rng.uniform(), rng.uniform(-0.5, 0.5)};
  }
  out.landmarks.presence = 0.97;
  out.landmarks.handedness = 0.98;
  report.outputs.push_back(out);

  const std::string line = io::track_line(report);
  std::istringstream in(io::track_header() + "\n" + line + "\n");
  const auto parsed = io::parse_track(in);
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].t_us == 123456);
  CHECK(parsed[0].detector_ran);
  REQUIRE(parsed[0].hands.size() == 1);
  CHECK(parsed[0].hands[0].gesture == "VICTORY");
  CHECK(io::track_line(parsed[0]) == line);
}

TEST_CASE("raw stream: emit/parse round trip") {
  RawDetectorOutput raw;
  raw.resize(3);
  Rng rng(7);
  for (size_t i = 0; i < raw.size(); ++i) {
    raw.logits[i] = rng.uniform(-8, 8);
    raw.boxes[i] = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    for (auto& kp : raw.keypoints[i]) kp = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
  }
  const std::string text = io::raw_header() + "\n" + io::raw_line(77, raw) + "\n";
  std::istringstream in(text);
  const auto parsed = io::parse_raw(in);
  REQUIRE(parsed.size() == 1);
  REQUIRE(parsed.count(77) == 1);
  CHECK(io::raw_header() + "\n" + io::raw_line(77, parsed.at(77)) + "\n" == text);
}

TEST_CASE("script parsing") {
  const std::string text = R"({
    "schema":"handpipe/v1","kind":"script","fps":30,"frames":12,"seed":9,
    "hands":[{
      "handedness":"Left",
      "initially_visible":false,
      "keyframes":[
        {"frame":0,"family":"open","wrist_position":[0.0,0.0,0.6],"roll_deg":10},
        {"frame":11,"family":"fist"}
      ],
      "events":[{"frame":4,"visible":true}]
    }]
  })";

  const auto script = io::parse_script(text, 9);
  CHECK(script.frames == 12);
  REQUIRE(script.hands.size() == 1);
  CHECK_FALSE(script.hands[0].initially_visible);
  REQUIRE(script.hands[0].keyframes.size() == 2);
  CHECK(script.hands[0].keyframes[0].pose.handedness == Handedness::kLeft);
  CHECK(script.hands[0].keyframes[0].pose.wrist_position.z == doctest::Approx(0.6));
  CHECK(script.hands[0].keyframes[0].pose.roll == doctest::Approx(10 * M_PI / 180));

  SUBCASE("family resolution is deterministic in the seed") {
    const auto again = io::parse_script(text, 9);
    CHECK(again.hands[0].keyframes[1].pose.fingers[2].flexion[1] ==
          script.hands[0].keyframes[1].pose.fingers[2].flexion[1]);
    const auto different = io::parse_script(text, 10);
    CHECK(different.hands[0].keyframes[1].pose.fingers[2].flexion[1] !=
          script.hands[0].keyframes[1].pose.fingers[2].flexion[1]);
  }

  SUBCASE("runs end to end") {
    const auto scenes = sim::run_script(script);
    REQUIRE(scenes.size() == 12);
    CHECK(scenes[0].hands.empty());
    CHECK(scenes[4].hands.size() == 1);
  }

  SUBCASE("explicit pose form") {
    const std::string explicit_text = R"({
      "schema":"handpipe/v1","kind":"script","fps":30,"frames":1,
      "hands":[{"keyframes":[{"frame":0,"pose":{
        "flexion_deg":[[5,5,5],[0,0,0],[0,0,0],[0,0,0],[0,0,0]],
        "abduction_deg":[5,0,0,0,0],
        "wrist_position":[0,0,0.5]
      }}]}]
    })";
    const auto parsed = io::parse_script(explicit_text, 1);
    CHECK(parsed.hands[0].keyframes[0].pose.fingers[0].flexion[0] ==
          doctest::Approx(5 * M_PI / 180));
  }

  SUBCASE("hand-model parameters load from the script") {
    const std::string with_model = R"({
      "schema":"handpipe/v1","kind":"script","fps":30,"frames":1,
      "hand_model":{
        "bone_lengths":[[0.05,0.03,0.02],[0.05,0.03,0.02],[0.05,0.03,0.02],
                        [0.05,0.03,0.02],[0.05,0.03,0.02]],
        "palm_width":0.09,
        "thumb_opposition_deg":45
      },
      "hands":[{"keyframes":[{"frame":0,"pose":{
        "flexion_deg":[[0,0,0],[0,0,0],[0,0,0],[0,0,0],[0,0,0]],
        "wrist_position":[0,0,0.6]
      }}]}]
    })";
    const auto parsed = io::parse_script(with_model, 1);
    CHECK(parsed.model.fingers[2].bone_lengths[0] == doctest::Approx(0.05));
    CHECK(parsed.model.palm_width == doctest::Approx(0.09));
    const auto scenes = sim::run_script(parsed);
    // Middle fingertip now sits exactly 0.10 m past its MCP base.
    const auto& joints = scenes[0].hands[0].joints3d;
    CHECK((joints[topo::kMiddleTip] - joints[topo::kMiddleMcp]).norm() ==
          doctest::Approx(0.10).epsilon(1e-9));

    CHECK_THROWS_AS(
        io::parse_script(R"({"schema":"handpipe/v1","kind":"script","fps":30,"frames":0,
                             "hand_model":{"bone_lengths":[[0,0,0]]}})",
                         1),
        FormatError);
  }

  SUBCASE("unknown family is diagnosed with its location") {
    std::string bad = text;
    const auto at = bad.find("\"fist\"");
    bad.replace(at, 6, "\"wave\"");
    try {
      io::parse_script(bad, 9);
      FAIL("expected FormatError");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("keyframe 1") != std::string::npos);
      CHECK(std::string(e.what()).find("wave") != std::string::npos);
    }
  }
}

TEST_CASE("render_svg: closer landmarks draw larger and lighter") {
  io::TrackRecord record;
  record.t_us = 0;
  io::TrackHandRecord hand;
  hand.id = 0;
  hand.gesture = "OPEN_PALM";
  for (int i = 0; i < topo::kNumLandmarks; ++i) {
    hand.landmarks[i] = {0.1 + 0.03 * i, 0.5, 0.0};
  }
  hand.landmarks[topo::kIndexTip].z = -0.5;  // closer to the camera
  record.hands.push_back(hand);

  const std::string svg = io::render_svg(record);
  // Wrist at baseline radius 6, the z=-0.5 landmark strictly larger at 9.
  CHECK(svg.find("r=\"6.00\"") != std::string::npos);
  CHECK(svg.find("r=\"9.00\"") != std::string::npos);
  CHECK(svg.find("<line") != std::string::npos);
  CHECK(io::render_svg(record) == svg);  // deterministic bytes
}
