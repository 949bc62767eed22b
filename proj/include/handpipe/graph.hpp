#ifndef HANDPIPE_GRAPH_HPP_
#define HANDPIPE_GRAPH_HPP_

#include <any>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "handpipe/tracker.hpp"
#include "handpipe/types.hpp"

namespace handpipe::graph {

// Minimal calculator-graph runtime: nodes connected by typed, timestamped
// streams. A node fires at a timestamp once every non-back-edge input is
// settled there; required inputs must carry a packet, optional ones may be
// absent (a dropped packet still advances the stream so consumers do not
// stall). Back-edge inputs read the latest packet from an earlier timestamp,
// which is how per-frame state loops without a cycle.
//
// Nodes may run concurrently across timestamps and across independent nodes;
// each node processes its timestamps strictly in order, so pure calculators
// make the output streams a function of the inputs and the spec alone.

using PacketValue =
    std::variant<std::monostate, bool, int64_t, double, std::string, HandScene,
                 std::vector<Detection>, HandLandmarks, OrientedRect, TrackStepReport,
                 TrackerState, StepPhase1>;

enum class PayloadType : int {
  kAny = -1,
  kEmpty = 0,
  kBool,
  kInt,
  kReal,
  kText,
  kScene,
  kDetections,
  kLandmarks,
  kRect,
  kReport,
  kTrackerState,
  kInterim,
};

const char* payload_type_name(PayloadType type);

struct Packet {
  int64_t t_us = 0;
  std::shared_ptr<const PacketValue> value;

  template <typename T>
  static Packet make(int64_t t_us, T&& v) {
    return {t_us, std::make_shared<const PacketValue>(std::forward<T>(v))};
  }

  template <typename T>
  const T& get() const {
    return std::get<T>(*value);
  }

  PayloadType type() const {
    return value ? static_cast<PayloadType>(value->index()) : PayloadType::kEmpty;
  }
};

class GraphError : public std::runtime_error {
 public:
  GraphError(std::string node, int64_t t_us, const std::string& what)
      : std::runtime_error("node '" + node + "' at t=" + std::to_string(t_us) + ": " + what),
        node_(std::move(node)),
        t_us_(t_us) {}
  explicit GraphError(const std::string& what) : std::runtime_error(what), t_us_(-1) {}

  const std::string& node() const { return node_; }
  int64_t timestamp() const { return t_us_; }

 private:
  std::string node_;
  int64_t t_us_ = -1;
};

class CalcContext {
 public:
  virtual ~CalcContext() = default;
  virtual int64_t timestamp() const = 0;
  // Packet on input port i at the current timestamp; for back-edge ports the
  // latest packet from an earlier timestamp. nullopt when absent.
  virtual const std::optional<Packet>& input(size_t i) const = 0;
  // Emit on output port i at the current timestamp (at most once per port).
  virtual void emit(size_t i, PacketValue value) = 0;
  virtual void emit_packet(size_t i, const Packet& packet) = 0;  // payload pass-through
  virtual std::any& state() = 0;  // per-node state, accessed serially
};

class Calculator {
 public:
  virtual ~Calculator() = default;
  virtual void process(CalcContext& ctx) = 0;
};

enum class InputKind : int { kRequired = 0, kOptional = 1, kBack = 2 };

struct InputPort {
  std::string stream;
  InputKind kind = InputKind::kRequired;
  PayloadType type = PayloadType::kAny;
};

struct OutputPort {
  std::string stream;
  PayloadType type = PayloadType::kAny;
};

struct NodeSpec {
  std::string name;
  std::string type;  // calculator type name, for diagnostics and text graphs
  std::vector<InputPort> inputs;
  std::vector<OutputPort> outputs;
  std::shared_ptr<Calculator> calc;
};

struct GraphSpec {
  std::vector<std::string> inputs;   // graph input streams
  std::vector<std::string> outputs;  // graph output streams
  std::map<std::string, PayloadType> input_types;
  std::vector<NodeSpec> nodes;
};

// Structured diagnostics; empty result means the spec is valid. Detects
// cycles (excluding back-edges), dangling or doubly-produced streams, type
// mismatches, and unresolved calculators.
std::vector<std::string> validate_graph(const GraphSpec& spec);

struct RunOptions {
  int threads = 1;
  uint64_t scheduler_seed = 0;  // shuffles ready-task picks; must not affect results
  int max_in_flight = 4;       // timestamps in flight across the graph
  bool collect_timing = false;
};

struct NodeStats {
  int64_t fires = 0;
  int64_t skips = 0;  // settled timestamps without a required packet
  std::vector<double> durations_us;
};

struct RunResult {
  std::map<std::string, std::vector<Packet>> outputs;
  std::map<std::string, NodeStats> stats;
};

// Runs the graph over the given input streams (each strictly increasing in
// timestamp). Throws GraphError on validation failure or when a node throws.
RunResult run_graph(const GraphSpec& spec,
                    const std::map<std::string, std::vector<Packet>>& inputs,
                    const RunOptions& options = {});

// Free-standing gate: forwards data packets whose allow packet (same
// timestamp) is true. Throws GraphError when an allow packet is missing.
std::vector<Packet> gate_streams(const std::vector<Packet>& data,
                                 const std::vector<Packet>& allow);

// ---------------------------------------------------------------------------
// Calculators
// ---------------------------------------------------------------------------

std::shared_ptr<Calculator> make_identity_calculator();
std::shared_ptr<Calculator> make_gate_calculator();
std::shared_ptr<Calculator> make_lambda_calculator(std::function<void(CalcContext&)> fn);

// Shared context for the hand-tracking calculators.
struct PipelineNodes {
  std::shared_ptr<const LandmarkBackend> backend;
  std::shared_ptr<const PalmDetector> detector;
  TrackerConfig tracker;
};

// The Figure-5-shaped hand-tracking graph: landmark stage -> gate -> palm
// detector -> tracker update, with the tracker state looping back.
GraphSpec build_hand_tracking_graph(const PipelineNodes& nodes);

// Text graph format: `input NAME`, `output NAME`, and
// `node NAME TYPE [back:|opt:]IN... -> OUT...` lines; '#' comments.
GraphSpec load_graph_spec(const std::string& text, const PipelineNodes& nodes);
GraphSpec load_graph_file(const std::string& path, const PipelineNodes& nodes);

std::vector<Packet> scenes_to_packets(const std::vector<HandScene>& scenes);

// Convenience wrapper: run the hand-tracking graph over a scene sequence and
// return the per-frame reports.
std::vector<TrackStepReport> run_tracking_graph(const GraphSpec& spec,
                                                const std::vector<HandScene>& scenes,
                                                const RunOptions& options = {});

}  // namespace handpipe::graph

#endif  // HANDPIPE_GRAPH_HPP_
