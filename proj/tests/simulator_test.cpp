#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "handpipe/detector.hpp"
#include "handpipe/error.hpp"
#include "handpipe/rng.hpp"
#include "handpipe/simulator.hpp"

using namespace handpipe;
using namespace handpipe::sim;

namespace {

PoseParams flat_pose() {
  PoseParams pose;
  pose.wrist_position = {0.0, 0.0, 0.6};
  return pose;
}

PoseParams uniform_flexion_pose(double deg, double thumb_deg) {
  PoseParams pose = flat_pose();
  for (int f = 0; f < topo::kNumFingers; ++f) {
    const double value = (f == topo::kThumb ? thumb_deg : deg) * M_PI / 180.0;
    pose.fingers[f].flexion = {value, value, value};
  }
  return pose;
}

double angle_between(const Vec3& a, const Vec3& b) {
  return std::acos(std::clamp(a.dot(b) / (a.norm() * b.norm()), -1.0, 1.0));
}

// 3D accumulated bend along a finger chain, straight from the joints.
double accumulated_3d_deg(const std::array<Vec3, 21>& joints, int finger) {
  const auto& chain = topo::kFingerChains[finger];
  double total = 0.0;
  for (int j = 1; j + 1 < topo::kChainLength; ++j) {
    const Vec3 a = joints[chain[j]] - joints[chain[j - 1]];
    const Vec3 b = joints[chain[j + 1]] - joints[chain[j]];
    total += angle_between(a, b);
  }
  return total * 180.0 / M_PI;
}

}  // namespace

TEST_CASE("forward_kinematics: zero angles give collinear chains of full length") {
  const auto& model = HandModel::average_adult();
  PoseParams pose;
  pose.wrist_position = {0, 0, 0};
  const auto joints = forward_kinematics(model, pose);

  for (int f = 0; f < topo::kNumFingers; ++f) {
    const auto& chain = topo::kFingerChains[f];
    const auto& geo = model.fingers[f];
    const double expected =
        geo.bone_lengths[0] + geo.bone_lengths[1] + geo.bone_lengths[2];
    const double tip_from_base = (joints[chain[4]] - joints[chain[1]]).norm();
    CHECK(tip_from_base == doctest::Approx(expected).epsilon(1e-12));
    CHECK(accumulated_3d_deg(joints, f) < 1e-4);  // acos roundoff near collinearity
  }
}

TEST_CASE("forward_kinematics: full flexion curls every fingertip inside its MCP") {
  const auto& model = HandModel::average_adult();
  PoseParams pose = flat_pose();
  for (int f = 0; f < topo::kNumFingers; ++f) {
    for (int j = 0; j < 3; ++j) pose.fingers[f].flexion[j] = model.fingers[f].limits[j].flex_max;
  }
  const auto joints = forward_kinematics(model, pose);
  const Vec3 wrist = joints[topo::kWrist];
  static constexpr std::array<int, topo::kNumFingers> kMcp = {
      topo::kThumbMcp, topo::kIndexMcp, topo::kMiddleMcp, topo::kRingMcp, topo::kPinkyMcp};
  for (int f = 0; f < topo::kNumFingers; ++f) {
    const auto& chain = topo::kFingerChains[f];
    CHECK((joints[chain[4]] - wrist).norm() < (joints[kMcp[f]] - wrist).norm());
  }
}

TEST_CASE("forward_kinematics: left hands mirror right hands exactly") {
  PoseParams pose = uniform_flexion_pose(35.0, 25.0);
  pose.wrist_position = {0, 0, 0};
  for (int f = 0; f < topo::kNumFingers; ++f) pose.fingers[f].abduction = 0.1;
  const auto right = forward_kinematics(HandModel::average_adult(), pose);
  pose.handedness = Handedness::kLeft;
  const auto left = forward_kinematics(HandModel::average_adult(), pose);
  for (int i = 0; i < topo::kNumLandmarks; ++i) {
    CHECK(left[i].x == doctest::Approx(-right[i].x).epsilon(1e-12));
    CHECK(left[i].y == doctest::Approx(right[i].y).epsilon(1e-12));
    CHECK(left[i].z == doctest::Approx(right[i].z).epsilon(1e-12));
  }
}

TEST_CASE("forward_kinematics: out-of-limit poses are rejected") {
  PoseParams pose = flat_pose();
  pose.fingers[topo::kIndex].flexion[1] = M_PI;  // way past the PIP limit
  CHECK_THROWS_AS(forward_kinematics(HandModel::average_adult(), pose),
                  std::invalid_argument);
}

TEST_CASE("project: optical-axis joint lands on the principal point, wrist z is zero") {
  HandScene scene;
  scene.camera = default_camera();
  HandScene::Hand hand;
  hand.joints3d = forward_kinematics(HandModel::average_adult(), flat_pose());
  hand.handedness = Handedness::kRight;
  scene.hands.push_back(hand);

  const auto projected = project(scene);
  REQUIRE(projected.size() == 1);
  // The wrist sits at (0,0,z): exactly the optical axis.
  CHECK(projected[0].landmarks.points[topo::kWrist].x == doctest::Approx(0.5));
  CHECK(projected[0].landmarks.points[topo::kWrist].y == doctest::Approx(0.5));
  CHECK(projected[0].landmarks.points[topo::kWrist].z == 0.0);

  SUBCASE("palm detection is square with score 1") {
    const Detection& palm = projected[0].palm;
    CHECK(palm.score == doctest::Approx(1.0));
    CHECK(std::abs(palm.box.width() - palm.box.height()) < 1e-9);
    CHECK(palm.keypoints[palm_kp::kWrist].x == doctest::Approx(0.5));
  }
}

TEST_CASE("project: doubling the distance halves the projected size") {
  const auto& model = HandModel::average_adult();
  auto scene_at = [&](double depth) {
    PoseParams pose = flat_pose();
    pose.wrist_position = {0.0, 0.0, depth};
    HandScene scene;
    scene.camera = default_camera();
    HandScene::Hand hand;
    hand.joints3d = forward_kinematics(model, pose);
    scene.hands.push_back(hand);
    return project(scene)[0];
  };
  const auto near = scene_at(0.5);
  const auto far = scene_at(1.0);
  auto size = [](const ProjectedHand& h) {
    const auto& w = h.landmarks.points[topo::kWrist];
    const auto& m = h.landmarks.points[topo::kMiddleMcp];
    return std::hypot(w.x - m.x, w.y - m.y);
  };
  CHECK(far.palm.box.width() == doctest::Approx(near.palm.box.width() / 2).epsilon(1e-6));
  CHECK(size(far) == doctest::Approx(size(near) / 2).epsilon(1e-6));
}

TEST_CASE("project: joints behind the camera are rejected") {
  HandScene scene;
  scene.camera = default_camera();
  HandScene::Hand hand;
  hand.joints3d = forward_kinematics(HandModel::average_adult(), flat_pose());
  hand.joints3d[4].z = -0.1;
  scene.hands.push_back(hand);
  CHECK_THROWS_AS(project(scene), std::invalid_argument);
}

TEST_CASE("sample_pose: deterministic and within joint limits") {
  const auto& model = HandModel::average_adult();
  for (PoseFamily family : {PoseFamily::kOpen, PoseFamily::kFist, PoseFamily::kPoint,
                            PoseFamily::kVictory, PoseFamily::kThumbsUp, PoseFamily::kOk,
                            PoseFamily::kRandom}) {
    for (uint64_t seed = 0; seed < 50; ++seed) {
      const PoseParams a = sample_pose(seed, family, model);
      const PoseParams b = sample_pose(seed, family, model);
      CHECK(a.wrist_position.x == b.wrist_position.x);
      CHECK(a.roll == b.roll);
      for (int f = 0; f < topo::kNumFingers; ++f) {
        CHECK(a.fingers[f].flexion[0] == b.fingers[f].flexion[0]);
        for (int j = 0; j < 3; ++j) {
          CHECK(a.fingers[f].flexion[j] >= model.fingers[f].limits[j].flex_min - 1e-9);
          CHECK(a.fingers[f].flexion[j] <= model.fingers[f].limits[j].flex_max + 1e-9);
        }
      }
      forward_kinematics(model, a);  // must not throw
    }
  }
}

TEST_CASE("sample_pose: open hands are nearly straight, fists are deeply bent") {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    const auto open = forward_kinematics(HandModel::average_adult(),
                                         sample_pose(seed, PoseFamily::kOpen));
    const auto fist = forward_kinematics(HandModel::average_adult(),
                                         sample_pose(seed, PoseFamily::kFist));
    for (int f = 0; f < topo::kNumFingers; ++f) {
      CHECK(accumulated_3d_deg(open, f) < 20.0);
      if (f != topo::kThumb) CHECK(accumulated_3d_deg(fist, f) > 150.0);
    }
  }
}

TEST_CASE("run_script: constant keyframes give constant scenes") {
  SequenceScript script;
  script.fps = 30;
  script.frames = 10;
  HandTrack track;
  track.keyframes = {{0, flat_pose()}, {9, flat_pose()}};
  script.hands.push_back(track);

  const auto scenes = run_script(script);
  REQUIRE(scenes.size() == 10);
  for (const auto& scene : scenes) {
    REQUIRE(scene.hands.size() == 1);
    for (int i = 0; i < topo::kNumLandmarks; ++i) {
      CHECK(scene.hands[0].joints3d[i].x == scenes[0].hands[0].joints3d[i].x);
    }
  }
  CHECK(scenes[3].t_us == 100000);
}

TEST_CASE("run_script: enter event hides the hand before its frame") {
  SequenceScript script;
  script.fps = 30;
  script.frames = 20;
  HandTrack track;
  track.initially_visible = false;
  track.keyframes = {{0, flat_pose()}};
  track.events = {{10, true}};
  script.hands.push_back(track);

  const auto scenes = run_script(script);
  for (int f = 0; f < 20; ++f) {
    CHECK(scenes[f].hands.size() == (f < 10 ? 0u : 1u));
  }
}

TEST_CASE("run_script: open-to-fist flexion grows monotonically") {
  PoseParams open = uniform_flexion_pose(2.0, 2.0);
  PoseParams fist = uniform_flexion_pose(65.0, 55.0);
  for (int f = 0; f < topo::kNumFingers; ++f) {
    open.fingers[f].abduction = fist.fingers[f].abduction = 0.02;
  }
  SequenceScript script;
  script.fps = 30;
  script.frames = 60;
  HandTrack track;
  track.keyframes = {{0, open}, {59, fist}};
  script.hands.push_back(track);

  const auto scenes = run_script(script);
  std::array<double, topo::kNumFingers> last{};
  for (size_t s = 0; s < scenes.size(); ++s) {
    for (int f = 0; f < topo::kNumFingers; ++f) {
      const double deg = accumulated_3d_deg(scenes[s].hands[0].joints3d, f);
      if (s > 0) CHECK(deg >= last[f] - 1e-9);
      last[f] = deg;
    }
  }
}

TEST_CASE("run_script: malformed keyframes are rejected") {
  SequenceScript script;
  script.fps = 30;
  script.frames = 10;
  HandTrack track;
  track.keyframes = {{5, flat_pose()}, {5, flat_pose()}};
  script.hands.push_back(track);
  CHECK_THROWS_AS(run_script(script), FormatError);
}

TEST_CASE("synthesize_raw_output: zero noise recovers the palm exactly") {
  const auto anchors = generate_anchors(AnchorConfig::defaults());

  HandScene scene = sample_scene(7, 1, 1);
  REQUIRE(scene.hands.size() == 1);
  const auto gt = project(scene)[0].palm;

  const auto raw = synthesize_raw_output(scene, anchors, 0.0);
  const auto dets = non_max_suppression(decode_boxes(raw, anchors, 0.5), 0.3);
  REQUIRE(dets.size() == 1);
  CHECK(box_iou(dets[0].box, gt.box) >= 0.99);
  CHECK(dets[0].score == doctest::Approx(0.95).epsilon(1e-9));
}

TEST_CASE("synthesize_raw_output: empty scenes stay silent") {
  const auto anchors = generate_anchors(AnchorConfig::defaults());
  HandScene scene;
  scene.camera = default_camera();
  const auto raw = synthesize_raw_output(scene, anchors, 0.0);
  for (double logit_value : raw.logits) {
    CHECK(sigmoid(logit_value) <= 0.05);
  }
  CHECK(non_max_suppression(decode_boxes(raw, anchors, 0.5), 0.3).empty());
}

TEST_CASE("synthesize_raw_output: two separated hands give two detections") {
  const auto anchors = generate_anchors(AnchorConfig::defaults());
  for (uint64_t seed = 0; seed < 20; ++seed) {
    HandScene scene = sample_scene(seed * 31 + 5, 2, 2);
    if (scene.hands.size() != 2) continue;  // placement can fail, skip crowded draws
    const auto projected = project(scene);
    const auto raw = synthesize_raw_output(scene, anchors, 0.0);
    const auto dets = non_max_suppression(decode_boxes(raw, anchors, 0.5), 0.3);
    REQUIRE(dets.size() == 2);
    // Each detection matches a distinct ground truth.
    const double iou00 = box_iou(dets[0].box, projected[0].palm.box);
    const double iou01 = box_iou(dets[0].box, projected[1].palm.box);
    const int first = iou00 > iou01 ? 0 : 1;
    CHECK(box_iou(dets[0].box, projected[first].palm.box) >= 0.99);
    CHECK(box_iou(dets[1].box, projected[1 - first].palm.box) >= 0.99);
  }
}

TEST_CASE("mirror_scene flips geometry and labels") {
  HandScene scene = sample_scene(13, 1, 1);
  REQUIRE(scene.hands.size() == 1);
  const HandScene mirrored = mirror_scene(scene);
  CHECK(mirrored.hands[0].handedness != scene.hands[0].handedness);
  for (int i = 0; i < topo::kNumLandmarks; ++i) {
    CHECK(mirrored.hands[0].joints3d[i].x == doctest::Approx(-scene.hands[0].joints3d[i].x));
  }
  // Centered principal point: normalized x reflects about one half.
  const auto a = project(scene)[0].landmarks;
  const auto b = project(mirrored)[0].landmarks;
  for (int i = 0; i < topo::kNumLandmarks; ++i) {
    CHECK(b.points[i].x == doctest::Approx(1.0 - a.points[i].x).epsilon(1e-9));
    CHECK(b.points[i].y == doctest::Approx(a.points[i].y).epsilon(1e-9));
    CHECK(b.points[i].z == doctest::Approx(a.points[i].z).epsilon(1e-9));
  }
}

TEST_CASE("sample_scene: framed and separated") {
  for (uint64_t seed = 0; seed < 100; ++seed) {
    const HandScene scene = sample_scene(seed, 0, 3);
    const auto projected = project(scene);
    for (size_t i = 0; i < projected.size(); ++i) {
      const auto& box = projected[i].palm.box;
      CHECK(box.xmin >= 0.03);
      CHECK(box.xmax <= 0.97);
      for (size_t j = i + 1; j < projected.size(); ++j) {
        CHECK(box_iou(box, projected[j].palm.box) < 0.1);
      }
    }
  }
}
