#ifndef HANDPIPE_IO_HPP_
#define HANDPIPE_IO_HPP_

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "handpipe/detector.hpp"
#include "handpipe/simulator.hpp"
#include "handpipe/tracker.hpp"
#include "handpipe/types.hpp"

namespace handpipe::io {

// On-disk formats. Streams are JSONL: a {"schema":"handpipe/v1","kind":...}
// header line followed by one JSON object per record. Single-document files
// (scripts, configs, reports) embed the same schema/kind fields. Numbers are
// emitted with 9 significant digits so outputs are byte-testable.

inline constexpr const char* kSchemaVersion = "handpipe/v1";

std::string format_number(double v);

// --- scenes ---------------------------------------------------------------

std::string scenes_header();
std::string scene_line(const HandScene& scene);
std::vector<HandScene> parse_scenes(std::istream& in);

// --- tracking stream -------------------------------------------------------

struct TrackHandRecord {
  int id = 0;
  double presence = 0.0;
  double handedness = 0.5;
  std::array<Landmark25D, topo::kNumLandmarks> landmarks{};
  std::string gesture = "UNKNOWN";
};

struct TrackRecord {
  int64_t t_us = 0;
  bool detector_ran = false;
  std::vector<TrackHandRecord> hands;
};

TrackRecord to_track_record(const TrackStepReport& report);

std::string track_header();
std::string track_line(const TrackRecord& record);
std::string track_line(const TrackStepReport& report);
std::vector<TrackRecord> parse_track(std::istream& in);

// --- raw detector outputs ---------------------------------------------------

std::string raw_header();
std::string raw_line(int64_t t_us, const RawDetectorOutput& raw);
std::map<int64_t, RawDetectorOutput> parse_raw(std::istream& in);

// --- scripts ----------------------------------------------------------------

// Parses the script document and resolves pose-family keyframes into explicit
// poses with the given seed. Angles are degrees in the file, radians in
// memory. Throws FormatError with field diagnostics.
sim::SequenceScript parse_script(const std::string& json_text, uint64_t seed);

// --- rendering ---------------------------------------------------------------

// One SVG per frame: topology edges plus one circle per landmark. Circles
// grow and lighten as z goes negative (closer to the camera); the wrist
// carries the baseline radius.
std::string render_svg(const TrackRecord& record, double width = 640.0, double height = 640.0);

// --- files -------------------------------------------------------------------

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace handpipe::io

#endif  // HANDPIPE_IO_HPP_
