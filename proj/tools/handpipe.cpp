// Command-line entry point: simulate scenes, run the tracking pipeline,
// evaluate, benchmark, and render skeleton frames.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "handpipe/backend.hpp"
#include "handpipe/config.hpp"
#include "handpipe/error.hpp"
#include "handpipe/graph.hpp"
#include "handpipe/io.hpp"
#include "handpipe/log.hpp"
#include "handpipe/metrics.hpp"
#include "handpipe/simulator.hpp"
#include "handpipe/tracker.hpp"

namespace handpipe {
namespace {

namespace fs = std::filesystem;

struct CommonFlags {
  std::string config_path;
  std::optional<uint64_t> seed;
  std::optional<std::string> tier;
  std::optional<int> max_hands;
  bool no_gating = false;
  std::string graph_path;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "pipeline config JSON");
  cmd->add_option("--seed", flags.seed, "seed override (mandatory if the config has none)");
  cmd->add_option("--tier", flags.tier, "backend tier: light|full|heavy")
      ->check(CLI::IsMember({"light", "full", "heavy"}));
  cmd->add_option("--max-hands", flags.max_hands, "tracked-hand capacity");
  cmd->add_flag("--no-gating", flags.no_gating, "run the palm detector on every frame");
  cmd->add_option("--graph", flags.graph_path, "graph file (default: built-in)");
}

PipelineConfig resolve_config(const CommonFlags& flags) {
  PipelineConfig cfg = flags.config_path.empty()
                           ? PipelineConfig::defaults()
                           : parse_config(io::read_file(flags.config_path));
  if (flags.seed.has_value()) {
    cfg.seed = *flags.seed;
    cfg.seed_set = true;
  }
  if (!cfg.seed_set) {
    throw ConfigError("seed is mandatory: set it in the config file or pass --seed");
  }
  if (flags.tier.has_value()) {
    cfg.tier = *flags.tier == "light"   ? BackendTier::kLight
               : *flags.tier == "heavy" ? BackendTier::kHeavy
                                        : BackendTier::kFull;
  }
  if (flags.max_hands.has_value()) {
    if (*flags.max_hands < 1) throw ConfigError("--max-hands must be at least 1");
    cfg.tracker.max_hands = *flags.max_hands;
  }
  if (flags.no_gating) cfg.tracker.gating = false;
  if (!flags.graph_path.empty()) cfg.graph_path = flags.graph_path;
  return cfg;
}

std::vector<HandScene> read_scenes(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw FormatError("cannot open scenes file: " + path);
  return io::parse_scenes(file);
}

graph::GraphSpec make_graph(const PipelineConfig& cfg, const graph::PipelineNodes& nodes) {
  graph::GraphSpec spec = cfg.graph_path.empty()
                              ? graph::build_hand_tracking_graph(nodes)
                              : graph::load_graph_file(cfg.graph_path, nodes);
  const auto errors = graph::validate_graph(spec);
  if (!errors.empty()) {
    std::string joined = "graph validation failed:";
    for (const auto& e : errors) joined += "\n  " + e;
    throw ConfigError(joined);
  }
  return spec;
}

graph::PipelineNodes make_nodes(const PipelineConfig& cfg,
                                const std::string& raw_dets_path) {
  graph::PipelineNodes nodes;
  nodes.backend = std::make_shared<OracleLandmarkBackend>(cfg.backend_capability(),
                                                          cfg.tracker.crop, cfg.seed);
  if (raw_dets_path.empty()) {
    nodes.detector = std::make_shared<OraclePalmDetector>(cfg.detector_params(), cfg.seed);
  } else {
    std::ifstream file(raw_dets_path);
    if (!file) throw FormatError("cannot open raw detections file: " + raw_dets_path);
    nodes.detector =
        std::make_shared<FileRawPalmDetector>(io::parse_raw(file), cfg.detector_params());
  }
  nodes.tracker = cfg.tracker;
  return nodes;
}

// --- simulate ----------------------------------------------------------------

int cmd_simulate(const std::string& script_path, const std::string& out_path,
                 std::optional<uint64_t> seed_flag) {
  const std::string text = io::read_file(script_path);
  uint64_t seed = 1;
  bool seed_set = false;
  if (seed_flag.has_value()) {
    seed = *seed_flag;
    seed_set = true;
  } else {
    try {
      const auto doc = nlohmann::json::parse(text);
      if (doc.contains("seed")) {
        seed = doc["seed"].get<uint64_t>();
        seed_set = true;
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("script: ") + e.what());
    }
  }
  if (!seed_set) throw ConfigError("seed is mandatory: set it in the script or pass --seed");

  const sim::SequenceScript script = io::parse_script(text, seed);
  const auto scenes = sim::run_script(script);

  std::string out = io::scenes_header() + "\n";
  for (const auto& scene : scenes) out += io::scene_line(scene) + "\n";
  io::write_file(out_path, out);
  log::info("simulate: wrote " + std::to_string(scenes.size()) + " frames to " + out_path);
  return kExitOk;
}

// --- track --------------------------------------------------------------------

int cmd_track(const std::string& in_path, const std::string& out_path, const CommonFlags& flags,
              const std::string& raw_dets_path) {
  const PipelineConfig cfg = resolve_config(flags);
  const auto scenes = read_scenes(in_path);
  const auto nodes = make_nodes(cfg, raw_dets_path);
  const auto spec = make_graph(cfg, nodes);

  graph::RunOptions options;
  options.threads = 2;
  options.scheduler_seed = cfg.seed;
  const auto reports = graph::run_tracking_graph(spec, scenes, options);

  std::string out = io::track_header() + "\n";
  for (const auto& report : reports) out += io::track_line(report) + "\n";
  io::write_file(out_path, out);
  log::info("track: wrote " + std::to_string(reports.size()) + " frames to " + out_path);
  return kExitOk;
}

// --- eval ----------------------------------------------------------------------

HandLandmarks record_to_landmarks(const io::TrackHandRecord& rec) {
  HandLandmarks lm;
  lm.points = rec.landmarks;
  lm.presence = rec.presence;
  lm.handedness = rec.handedness;
  return lm;
}

int cmd_eval(const std::string& track_path, const std::string& scenes_path,
             const std::string& out_path) {
  std::ifstream track_file(track_path);
  if (!track_file) throw FormatError("cannot open track file: " + track_path);
  const auto track = io::parse_track(track_file);
  const auto scenes = read_scenes(scenes_path);

  if (track.size() != scenes.size()) {
    throw MismatchError("track has " + std::to_string(track.size()) + " frames but scenes has " +
                        std::to_string(scenes.size()));
  }
  for (size_t i = 0; i < track.size(); ++i) {
    if (track[i].t_us != scenes[i].t_us) {
      throw MismatchError("timestamp mismatch at frame " + std::to_string(i) + ": track " +
                          std::to_string(track[i].t_us) + " vs scenes " +
                          std::to_string(scenes[i].t_us));
    }
  }

  const CropConfig crop;  // defaults; documented in README
  std::vector<EvalRecord> records;
  records.reserve(track.size());
  for (size_t f = 0; f < track.size(); ++f) {
    EvalRecord record;
    record.t_us = track[f].t_us;
    record.detector_ran = track[f].detector_ran;
    for (const auto& hand : sim::project(scenes[f])) {
      record.gt_landmarks.push_back(hand.landmarks);
      record.gt_boxes.push_back(
          rect_bounds(rect_from_landmarks(hand.landmarks, crop.landmark_expand)));
    }
    for (const auto& rec : track[f].hands) {
      const HandLandmarks lm = record_to_landmarks(rec);
      record.pred_landmarks.push_back(lm);
      record.pred_boxes.push_back(
          {rect_bounds(rect_from_landmarks(lm, crop.landmark_expand)), rec.presence});
      record.pred_gestures.push_back(rec.gesture);
    }
    records.push_back(std::move(record));
  }

  const TrackingEvalReport r = evaluate_tracking(records, 0.5);

  std::string out = std::string("{\"schema\":\"") + io::kSchemaVersion +
                    "\",\"kind\":\"report\",\"frames\":" + std::to_string(r.frames) +
                    ",\"detection\":{\"average_precision\":" +
                    io::format_number(r.average_precision) +
                    ",\"iou_threshold\":" + io::format_number(r.ap_iou_threshold) + "}" +
                    ",\"landmarks\":{\"mean_normalized_mse\":" +
                    io::format_number(r.mean_normalized_mse) +
                    ",\"mean_normalized_mse_percent\":" +
                    io::format_number(r.mean_normalized_mse * 100.0) +
                    ",\"max_normalized_mse\":" + io::format_number(r.max_normalized_mse) +
                    ",\"matched_hands\":" + std::to_string(r.matched_hands) +
                    ",\"missed_gt\":" + std::to_string(r.missed_gt) +
                    ",\"spurious_tracks\":" + std::to_string(r.spurious_tracks) + "}" +
                    ",\"gating\":{\"detector_runs\":" + std::to_string(r.detector_runs) +
                    ",\"detector_rate\":" + io::format_number(r.detector_rate) + "}" +
                    ",\"gestures\":{";
  bool first = true;
  for (const auto& [name, count] : r.gesture_counts) {
    if (!first) out += ',';
    first = false;
    out += "\"" + name + "\":" + std::to_string(count);
  }
  out += "}}";

  if (out_path.empty()) {
    std::cout << out << "\n";
  } else {
    io::write_file(out_path, out + "\n");
  }
  return kExitOk;
}

// --- bench ----------------------------------------------------------------------

int cmd_bench(const std::string& in_path, const std::string& out_path, const CommonFlags& flags,
              int repetitions) {
  const PipelineConfig cfg = resolve_config(flags);
  const auto scenes = read_scenes(in_path);
  const auto nodes = make_nodes(cfg, "");
  const auto spec = make_graph(cfg, nodes);

  graph::RunOptions options;
  options.threads = 2;
  options.scheduler_seed = cfg.seed;
  const BenchReport report = bench_pipeline(spec, scenes, repetitions, options);

  std::string out = std::string("{\"schema\":\"") + io::kSchemaVersion +
                    "\",\"kind\":\"report\",\"bench\":{" +
                    "\"frames\":" + std::to_string(report.frames) +
                    ",\"repetitions\":" + std::to_string(report.repetitions) +
                    ",\"throughput_fps\":" + io::format_number(report.throughput_fps) +
                    ",\"detector_rate\":" + io::format_number(report.detector_rate) +
                    ",\"total_wall_s\":" + io::format_number(report.total_wall_s) + ",\"stages\":[";
  for (size_t i = 0; i < report.stages.size(); ++i) {
    if (i > 0) out += ',';
    const auto& s = report.stages[i];
    out += "{\"name\":\"" + s.name + "\",\"fires\":" + std::to_string(s.fires) +
           ",\"p50_us\":" + io::format_number(s.p50_us) +
           ",\"p95_us\":" + io::format_number(s.p95_us) + "}";
  }
  out += "]}}";

  if (out_path.empty()) {
    std::cout << out << "\n";
  } else {
    io::write_file(out_path, out + "\n");
  }
  return kExitOk;
}

// --- render ----------------------------------------------------------------------

int cmd_render(const std::string& track_path, const std::string& out_dir) {
  std::ifstream track_file(track_path);
  if (!track_file) throw FormatError("cannot open track file: " + track_path);
  const auto track = io::parse_track(track_file);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw FormatError("cannot create output directory: " + out_dir);

  for (size_t f = 0; f < track.size(); ++f) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%06zu.svg", f);
    io::write_file((fs::path(out_dir) / name).string(), io::render_svg(track[f]));
  }
  log::info("render: wrote " + std::to_string(track.size()) + " frames to " + out_dir);
  return kExitOk;
}

int run(int argc, char** argv) {
  CLI::App app{"handpipe: two-stage hand tracking pipeline on simulated scenes"};
  app.require_subcommand(1);

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a sequence script into a scenes stream");
  std::string script_path, sim_out;
  std::optional<uint64_t> sim_seed;
  simulate->add_option("--script", script_path, "sequence script JSON")->required();
  simulate->add_option("--out", sim_out, "output scenes JSONL")->required();
  simulate->add_option("--seed", sim_seed, "seed override");

  // track
  auto* track = app.add_subcommand("track", "run the tracking pipeline over a scenes stream");
  std::string track_in, track_out, raw_dets;
  CommonFlags track_flags;
  track->add_option("--in", track_in, "input scenes JSONL")->required();
  track->add_option("--out", track_out, "output track JSONL")->required();
  track->add_option("--raw-dets", raw_dets, "pre-recorded raw detector outputs JSONL");
  add_common_flags(track, track_flags);

  // eval
  auto* eval = app.add_subcommand("eval", "compare a track stream against ground-truth scenes");
  std::string eval_track, eval_scenes, eval_out;
  eval->add_option("--in", eval_track, "track JSONL")->required();
  eval->add_option("--scenes", eval_scenes, "ground-truth scenes JSONL")->required();
  eval->add_option("--out", eval_out, "report JSON (stdout if omitted)");

  // bench
  auto* bench = app.add_subcommand("bench", "benchmark the pipeline over a scenes stream");
  std::string bench_in, bench_out;
  int reps = 5;
  CommonFlags bench_flags;
  bench->add_option("--in", bench_in, "input scenes JSONL")->required();
  bench->add_option("--out", bench_out, "report JSON (stdout if omitted)");
  bench->add_option("--reps", reps, "repetitions");
  add_common_flags(bench, bench_flags);

  // render
  auto* render = app.add_subcommand("render", "render a track stream as per-frame SVGs");
  std::string render_in, render_dir;
  render->add_option("--in", render_in, "track JSONL")->required();
  render->add_option("--out", render_dir, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) return cmd_simulate(script_path, sim_out, sim_seed);
  if (track->parsed()) return cmd_track(track_in, track_out, track_flags, raw_dets);
  if (eval->parsed()) return cmd_eval(eval_track, eval_scenes, eval_out);
  if (bench->parsed()) return cmd_bench(bench_in, bench_out, bench_flags, reps);
  if (render->parsed()) return cmd_render(render_in, render_dir);
  return kExitOk;
}

}  // namespace
}  // namespace handpipe

int main(int argc, char** argv) {
  try {
    return handpipe::run(argc, argv);
  } catch (const handpipe::FormatError& e) {
    handpipe::log::error(e.what());
    return handpipe::kExitFormatError;
  } catch (const handpipe::graph::GraphError& e) {
    handpipe::log::error(e.what());
    return handpipe::kExitConfigError;
  } catch (const handpipe::ConfigError& e) {
    handpipe::log::error(e.what());
    return handpipe::kExitConfigError;
  } catch (const handpipe::MismatchError& e) {
    handpipe::log::error(e.what());
    return handpipe::kExitMismatchError;
  } catch (const std::exception& e) {
    handpipe::log::error(e.what());
    return 1;
  }
}
