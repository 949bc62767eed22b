#include "handpipe/graph.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "handpipe/error.hpp"
#include "handpipe/rng.hpp"

namespace handpipe::graph {

const char* payload_type_name(PayloadType type) {
  switch (type) {
    case PayloadType::kAny: return "any";
    case PayloadType::kEmpty: return "empty";
    case PayloadType::kBool: return "bool";
    case PayloadType::kInt: return "int";
    case PayloadType::kReal: return "real";
    case PayloadType::kText: return "text";
    case PayloadType::kScene: return "scene";
    case PayloadType::kDetections: return "detections";
    case PayloadType::kLandmarks: return "landmarks";
    case PayloadType::kRect: return "rect";
    case PayloadType::kReport: return "report";
    case PayloadType::kTrackerState: return "tracker_state";
    case PayloadType::kInterim: return "interim";
  }
  return "any";
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::vector<std::string> validate_graph(const GraphSpec& spec) {
  std::vector<std::string> errors;

  std::map<std::string, int> producer;  // stream -> node index, -1 = graph input
  std::map<std::string, PayloadType> stream_type;
  for (const auto& in : spec.inputs) {
    if (producer.count(in)) {
      errors.push_back("graph input '" + in + "' declared twice");
      continue;
    }
    producer[in] = -1;
    auto it = spec.input_types.find(in);
    stream_type[in] = it != spec.input_types.end() ? it->second : PayloadType::kAny;
  }

  std::map<std::string, int> node_index;
  for (size_t n = 0; n < spec.nodes.size(); ++n) {
    const NodeSpec& node = spec.nodes[n];
    if (node.name.empty()) errors.push_back("node without a name");
    if (node_index.count(node.name)) {
      errors.push_back("duplicate node name '" + node.name + "'");
    }
    node_index[node.name] = static_cast<int>(n);
    if (!node.calc) {
      errors.push_back("node '" + node.name + "' has no calculator instance");
    }
    for (const auto& out : node.outputs) {
      if (producer.count(out.stream)) {
        errors.push_back("stream '" + out.stream + "' has more than one producer");
      } else {
        producer[out.stream] = static_cast<int>(n);
        stream_type[out.stream] = out.type;
      }
    }
  }

  for (const NodeSpec& node : spec.nodes) {
    for (const auto& in : node.inputs) {
      auto it = producer.find(in.stream);
      if (it == producer.end()) {
        errors.push_back("node '" + node.name + "' reads dangling stream '" + in.stream + "'");
        continue;
      }
      const PayloadType produced = stream_type[in.stream];
      if (in.type != PayloadType::kAny && produced != PayloadType::kAny && in.type != produced) {
        errors.push_back("node '" + node.name + "' expects " + payload_type_name(in.type) +
                         " on stream '" + in.stream + "' but it carries " +
                         payload_type_name(produced));
      }
    }
  }

  for (const auto& out : spec.outputs) {
    if (!producer.count(out)) {
      errors.push_back("graph output '" + out + "' has no producer");
    }
  }

  // Cycle detection over non-back edges.
  const size_t n = spec.nodes.size();
  std::vector<std::vector<int>> adj(n);
  for (size_t i = 0; i < n; ++i) {
    for (const auto& in : spec.nodes[i].inputs) {
      if (in.kind == InputKind::kBack) continue;
      auto it = producer.find(in.stream);
      if (it != producer.end() && it->second >= 0) {
        adj[it->second].push_back(static_cast<int>(i));
      }
    }
  }
  std::vector<int> color(n, 0);  // 0 white, 1 gray, 2 black
  std::vector<int> stack;
  std::function<bool(int)> dfs = [&](int u) -> bool {
    color[u] = 1;
    stack.push_back(u);
    for (int v : adj[u]) {
      if (color[v] == 1) {
        auto at = std::find(stack.begin(), stack.end(), v);
        std::string cycle;
        for (auto it = at; it != stack.end(); ++it) {
          if (!cycle.empty()) cycle += " -> ";
          cycle += spec.nodes[*it].name;
        }
        errors.push_back("cycle without back-edge declaration: " + cycle + " -> " +
                         spec.nodes[v].name);
        return true;
      }
      if (color[v] == 0 && dfs(v)) return true;
    }
    stack.pop_back();
    color[u] = 2;
    return false;
  };
  for (size_t i = 0; i < n; ++i) {
    if (color[i] == 0 && dfs(static_cast<int>(i))) break;
  }

  return errors;
}

// ---------------------------------------------------------------------------
// Runtime
// ---------------------------------------------------------------------------

namespace {

struct EmittedPacket {
  size_t port = 0;
  Packet packet;
};

class ContextImpl : public CalcContext {
 public:
  ContextImpl(int64_t t_us, std::vector<std::optional<Packet>> inputs, size_t num_outputs,
              std::any* state)
      : t_us_(t_us), inputs_(std::move(inputs)), num_outputs_(num_outputs), state_(state) {}

  int64_t timestamp() const override { return t_us_; }

  const std::optional<Packet>& input(size_t i) const override {
    if (i >= inputs_.size()) throw std::out_of_range("input port index");
    return inputs_[i];
  }

  void emit(size_t i, PacketValue value) override {
    emit_packet(i, Packet{t_us_, std::make_shared<const PacketValue>(std::move(value))});
  }

  void emit_packet(size_t i, const Packet& packet) override {
    if (i >= num_outputs_) throw std::out_of_range("output port index");
    for (const auto& e : emitted_) {
      if (e.port == i) throw std::runtime_error("double emission on one output port");
    }
    emitted_.push_back({i, Packet{t_us_, packet.value}});
  }

  std::any& state() override { return *state_; }

  std::vector<EmittedPacket>& emitted() { return emitted_; }

 private:
  int64_t t_us_;
  std::vector<std::optional<Packet>> inputs_;
  size_t num_outputs_;
  std::any* state_;
  std::vector<EmittedPacket> emitted_;
};

struct StreamStore {
  int producer = -1;  // node index, -1 = graph input
  std::vector<std::optional<Packet>> slots;
};

}  // namespace

RunResult run_graph(const GraphSpec& spec,
                    const std::map<std::string, std::vector<Packet>>& inputs,
                    const RunOptions& options) {
  {
    const auto errors = validate_graph(spec);
    if (!errors.empty()) {
      std::string joined = "invalid graph:";
      for (const auto& e : errors) joined += "\n  " + e;
      throw GraphError(joined);
    }
  }
  for (const auto& [name, packets] : inputs) {
    if (std::find(spec.inputs.begin(), spec.inputs.end(), name) == spec.inputs.end()) {
      throw GraphError("unknown graph input stream '" + name + "'");
    }
    for (size_t i = 0; i < packets.size(); ++i) {
      if (packets[i].t_us < 0) throw GraphError("negative packet timestamp");
      if (i > 0 && packets[i].t_us <= packets[i - 1].t_us) {
        throw GraphError("input stream '" + name + "' timestamps must strictly increase");
      }
    }
  }

  // Timestamp ladder: sorted union of input timestamps. Every node processes
  // ladder indices in order; emission happens at the node's current index.
  std::vector<int64_t> ladder;
  for (const auto& [name, packets] : inputs) {
    for (const auto& p : packets) ladder.push_back(p.t_us);
  }
  std::sort(ladder.begin(), ladder.end());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
  const size_t num_steps = ladder.size();

  // Stream stores.
  std::map<std::string, int> stream_index;
  std::vector<StreamStore> streams;
  auto add_stream = [&](const std::string& name, int producer) {
    stream_index[name] = static_cast<int>(streams.size());
    streams.push_back({producer, std::vector<std::optional<Packet>>(num_steps)});
  };
  for (const auto& name : spec.inputs) add_stream(name, -1);
  for (size_t n = 0; n < spec.nodes.size(); ++n) {
    for (const auto& out : spec.nodes[n].outputs) add_stream(out.stream, static_cast<int>(n));
  }
  for (const auto& [name, packets] : inputs) {
    StreamStore& store = streams[stream_index.at(name)];
    for (const auto& p : packets) {
      const auto at = std::lower_bound(ladder.begin(), ladder.end(), p.t_us);
      store.slots[static_cast<size_t>(at - ladder.begin())] = p;
    }
  }

  const size_t num_nodes = spec.nodes.size();
  std::vector<std::atomic<size_t>> node_next(num_nodes);
  for (auto& a : node_next) a.store(0);
  std::vector<std::any> node_state(num_nodes);
  std::vector<NodeStats> stats(num_nodes);

  // Resolved input stream indices per node.
  std::vector<std::vector<int>> in_streams(num_nodes);
  for (size_t n = 0; n < num_nodes; ++n) {
    for (const auto& in : spec.nodes[n].inputs) {
      in_streams[n].push_back(stream_index.at(in.stream));
    }
  }

  std::mutex mu;
  std::condition_variable cv;
  std::atomic<bool> abort{false};
  std::exception_ptr failure;
  std::vector<char> node_busy(num_nodes, 0);
  if (num_steps == 0 || num_nodes == 0) {
    RunResult result;
    for (const auto& name : spec.outputs) result.outputs[name];
    for (size_t n = 0; n < num_nodes; ++n) result.stats[spec.nodes[n].name] = {};
    return result;
  }

  // A stream is settled at step k once its producer has completed k (graph
  // inputs are settled everywhere). Settled does not imply a packet exists.
  auto settled = [&](int stream, size_t k) {
    const int producer = streams[stream].producer;
    return producer < 0 || node_next[producer].load(std::memory_order_acquire) > k;
  };

  auto ready = [&](size_t n, size_t floor_k) -> bool {
    if (node_busy[n]) return false;
    const size_t k = node_next[n].load(std::memory_order_relaxed);
    if (k >= num_steps) return false;
    if (k >= floor_k + static_cast<size_t>(std::max(1, options.max_in_flight))) return false;
    const auto& node = spec.nodes[n];
    for (size_t i = 0; i < node.inputs.size(); ++i) {
      if (node.inputs[i].kind == InputKind::kBack) {
        if (k > 0 && !settled(in_streams[n][i], k - 1)) return false;
      } else {
        if (!settled(in_streams[n][i], k)) return false;
      }
    }
    return true;
  };

  Rng scheduler_rng(mix_u64(options.scheduler_seed, 0x736368ULL));

  auto worker = [&]() {
    std::unique_lock<std::mutex> lock(mu);
    while (true) {
      if (abort.load()) return;
      bool all_done = true;
      size_t floor_k = num_steps;
      for (size_t n = 0; n < num_nodes; ++n) {
        const size_t k = node_next[n].load(std::memory_order_relaxed);
        floor_k = std::min(floor_k, k);
        if (k < num_steps || node_busy[n]) all_done = false;
      }
      if (all_done) {
        cv.notify_all();
        return;
      }

      std::vector<size_t> candidates;
      for (size_t n = 0; n < num_nodes; ++n) {
        if (ready(n, floor_k)) candidates.push_back(n);
      }
      if (candidates.empty()) {
        cv.wait(lock);
        continue;
      }
      const size_t n = candidates[scheduler_rng.uniform_index(candidates.size())];
      const size_t k = node_next[n].load(std::memory_order_relaxed);
      // Claim the step by bumping next; inputs for k are already settled and
      // immutable, so the work itself can run unlocked.
      const NodeSpec& node = spec.nodes[n];

      std::vector<std::optional<Packet>> in_packets(node.inputs.size());
      bool required_missing = false;
      for (size_t i = 0; i < node.inputs.size(); ++i) {
        const StreamStore& store = streams[in_streams[n][i]];
        if (node.inputs[i].kind == InputKind::kBack) {
          for (size_t j = k; j-- > 0;) {
            if (store.slots[j].has_value()) {
              in_packets[i] = store.slots[j];
              break;
            }
          }
        } else {
          in_packets[i] = store.slots[k];
          if (node.inputs[i].kind == InputKind::kRequired && !in_packets[i].has_value()) {
            required_missing = true;
          }
        }
      }

      if (required_missing) {
        stats[n].skips++;
        node_next[n].store(k + 1, std::memory_order_release);
        cv.notify_all();
        continue;
      }

      node_busy[n] = 1;
      lock.unlock();
      ContextImpl ctx(ladder[k], std::move(in_packets), node.outputs.size(), &node_state[n]);
      const auto start = std::chrono::steady_clock::now();
      std::exception_ptr error;
      try {
        node.calc->process(ctx);
      } catch (...) {
        error = std::current_exception();
      }
      const double duration_us =
          std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start)
              .count();

      if (error) {
        lock.lock();
        node_busy[n] = 0;
        if (!failure) {
          try {
            std::rethrow_exception(error);
          } catch (const std::exception& e) {
            failure = std::make_exception_ptr(GraphError(node.name, ladder[k], e.what()));
          } catch (...) {
            failure = std::make_exception_ptr(GraphError(node.name, ladder[k], "unknown error"));
          }
        }
        abort.store(true);
        cv.notify_all();
        return;
      }

      for (auto& e : ctx.emitted()) {
        StreamStore& store = streams[stream_index.at(node.outputs[e.port].stream)];
        store.slots[k] = std::move(e.packet);
      }

      lock.lock();
      node_busy[n] = 0;
      stats[n].fires++;
      if (options.collect_timing) stats[n].durations_us.push_back(duration_us);
      node_next[n].store(k + 1, std::memory_order_release);
      cv.notify_all();
    }
  };

  const int num_threads = std::max(1, options.threads);
  std::vector<std::thread> pool;
  pool.reserve(num_threads);
  for (int i = 0; i < num_threads; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  if (failure) std::rethrow_exception(failure);

  RunResult result;
  for (const auto& name : spec.outputs) {
    auto& out = result.outputs[name];
    const StreamStore& store = streams[stream_index.at(name)];
    for (const auto& slot : store.slots) {
      if (slot.has_value()) out.push_back(*slot);
    }
  }
  for (size_t n = 0; n < num_nodes; ++n) result.stats[spec.nodes[n].name] = std::move(stats[n]);
  return result;
}

std::vector<Packet> gate_streams(const std::vector<Packet>& data,
                                 const std::vector<Packet>& allow) {
  std::map<int64_t, bool> allow_at;
  for (const auto& p : allow) allow_at[p.t_us] = p.get<bool>();
  std::vector<Packet> out;
  for (const auto& p : data) {
    auto it = allow_at.find(p.t_us);
    if (it == allow_at.end()) {
      throw GraphError("gate", p.t_us, "missing allow packet at data timestamp");
    }
    if (it->second) out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Calculators
// ---------------------------------------------------------------------------

namespace {

class IdentityCalculator : public Calculator {
 public:
  void process(CalcContext& ctx) override {
    if (ctx.input(0).has_value()) ctx.emit_packet(0, *ctx.input(0));
  }
};

class GateCalculator : public Calculator {
 public:
  void process(CalcContext& ctx) override {
    // Data port is required (the node is skipped without it); the allow port
    // is declared optional so its absence lands here as an error.
    if (!ctx.input(1).has_value()) {
      throw std::runtime_error("gate: missing allow packet at data timestamp");
    }
    if (ctx.input(1)->get<bool>()) ctx.emit_packet(0, *ctx.input(0));
  }
};

class LambdaCalculator : public Calculator {
 public:
  explicit LambdaCalculator(std::function<void(CalcContext&)> fn) : fn_(std::move(fn)) {}
  void process(CalcContext& ctx) override { fn_(ctx); }

 private:
  std::function<void(CalcContext&)> fn_;
};

class LandmarkStageCalculator : public Calculator {
 public:
  LandmarkStageCalculator(std::shared_ptr<const LandmarkBackend> backend, TrackerConfig config)
      : backend_(std::move(backend)), config_(std::move(config)) {}

  void process(CalcContext& ctx) override {
    const HandScene& scene = ctx.input(0)->get<HandScene>();
    const TrackerState state = ctx.input(1).has_value()
                                   ? ctx.input(1)->get<TrackerState>()
                                   : TrackerState::initial(config_);
    StepPhase1 p1 = track_phase1(state, scene, *backend_);
    const bool need = p1.detector_need;
    ctx.emit(0, std::move(p1));
    ctx.emit(1, need);
  }

 private:
  std::shared_ptr<const LandmarkBackend> backend_;
  TrackerConfig config_;
};

class PalmDetectorCalculator : public Calculator {
 public:
  explicit PalmDetectorCalculator(std::shared_ptr<const PalmDetector> detector)
      : detector_(std::move(detector)) {}

  void process(CalcContext& ctx) override {
    ctx.emit(0, detector_->detect(ctx.input(0)->get<HandScene>()));
  }

 private:
  std::shared_ptr<const PalmDetector> detector_;
};

class TrackerUpdateCalculator : public Calculator {
 public:
  explicit TrackerUpdateCalculator(std::shared_ptr<const LandmarkBackend> backend)
      : backend_(std::move(backend)) {}

  void process(CalcContext& ctx) override {
    StepPhase1 p1 = ctx.input(0)->get<StepPhase1>();
    std::optional<std::vector<Detection>> detections;
    if (ctx.input(1).has_value()) detections = ctx.input(1)->get<std::vector<Detection>>();
    auto [state, report] = track_phase2(std::move(p1), detections, *backend_);
    ctx.emit(0, std::move(state));
    ctx.emit(1, std::move(report));
  }

 private:
  std::shared_ptr<const LandmarkBackend> backend_;
};

}  // namespace

std::shared_ptr<Calculator> make_identity_calculator() {
  return std::make_shared<IdentityCalculator>();
}

std::shared_ptr<Calculator> make_gate_calculator() { return std::make_shared<GateCalculator>(); }

std::shared_ptr<Calculator> make_lambda_calculator(std::function<void(CalcContext&)> fn) {
  return std::make_shared<LambdaCalculator>(std::move(fn));
}

// ---------------------------------------------------------------------------
// Hand-tracking graph and text loader
// ---------------------------------------------------------------------------

namespace {

struct CalcTypeInfo {
  size_t num_inputs = 0;
  size_t num_outputs = 0;
  std::vector<InputKind> kinds;
  std::vector<PayloadType> input_types;
  std::vector<PayloadType> output_types;
  std::function<std::shared_ptr<Calculator>(const PipelineNodes&)> factory;
};

const std::map<std::string, CalcTypeInfo>& calculator_registry() {
  static const std::map<std::string, CalcTypeInfo> registry = {
      {"identity",
       {1,
        1,
        {InputKind::kRequired},
        {PayloadType::kAny},
        {PayloadType::kAny},
        [](const PipelineNodes&) { return make_identity_calculator(); }}},
      {"gate",
       {2,
        1,
        {InputKind::kRequired, InputKind::kOptional},
        {PayloadType::kAny, PayloadType::kBool},
        {PayloadType::kAny},
        [](const PipelineNodes&) { return make_gate_calculator(); }}},
      {"landmark_stage",
       {2,
        2,
        {InputKind::kRequired, InputKind::kBack},
        {PayloadType::kScene, PayloadType::kTrackerState},
        {PayloadType::kInterim, PayloadType::kBool},
        [](const PipelineNodes& nodes) {
          return std::make_shared<LandmarkStageCalculator>(nodes.backend, nodes.tracker);
        }}},
      {"palm_detector",
       {1,
        1,
        {InputKind::kRequired},
        {PayloadType::kScene},
        {PayloadType::kDetections},
        [](const PipelineNodes& nodes) {
          return std::make_shared<PalmDetectorCalculator>(nodes.detector);
        }}},
      {"tracker_update",
       {2,
        2,
        {InputKind::kRequired, InputKind::kOptional},
        {PayloadType::kInterim, PayloadType::kDetections},
        {PayloadType::kTrackerState, PayloadType::kReport},
        [](const PipelineNodes& nodes) {
          return std::make_shared<TrackerUpdateCalculator>(nodes.backend);
        }}},
  };
  return registry;
}

NodeSpec make_node(const std::string& name, const std::string& type,
                   const std::vector<std::string>& input_streams,
                   const std::vector<std::string>& output_streams, const PipelineNodes& nodes) {
  const auto& registry = calculator_registry();
  auto it = registry.find(type);
  if (it == registry.end()) {
    throw ConfigError("graph: unknown calculator type '" + type + "'");
  }
  const CalcTypeInfo& info = it->second;
  if (input_streams.size() != info.num_inputs || output_streams.size() != info.num_outputs) {
    throw ConfigError("graph: node '" + name + "' of type '" + type + "' expects " +
                      std::to_string(info.num_inputs) + " inputs and " +
                      std::to_string(info.num_outputs) + " outputs");
  }
  NodeSpec node;
  node.name = name;
  node.type = type;
  for (size_t i = 0; i < input_streams.size(); ++i) {
    node.inputs.push_back({input_streams[i], info.kinds[i], info.input_types[i]});
  }
  for (size_t i = 0; i < output_streams.size(); ++i) {
    node.outputs.push_back({output_streams[i], info.output_types[i]});
  }
  node.calc = info.factory(nodes);
  return node;
}

}  // namespace

GraphSpec build_hand_tracking_graph(const PipelineNodes& nodes) {
  GraphSpec spec;
  spec.inputs = {"scene"};
  spec.input_types["scene"] = PayloadType::kScene;
  spec.outputs = {"report"};
  spec.nodes.push_back(make_node("lm_stage", "landmark_stage", {"scene", "tracker_state"},
                                 {"interim", "detector_need"}, nodes));
  spec.nodes.push_back(
      make_node("detect_gate", "gate", {"scene", "detector_need"}, {"scene_gated"}, nodes));
  spec.nodes.push_back(make_node("palm_detect", "palm_detector", {"scene_gated"}, {"detections"},
                                 nodes));
  spec.nodes.push_back(make_node("update", "tracker_update", {"interim", "detections"},
                                 {"tracker_state", "report"}, nodes));
  return spec;
}

GraphSpec load_graph_spec(const std::string& text, const PipelineNodes& nodes) {
  GraphSpec spec;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream tokens(line);
    std::string word;
    if (!(tokens >> word)) continue;

    auto fail = [&](const std::string& msg) {
      throw ConfigError("graph file line " + std::to_string(line_no) + ": " + msg);
    };

    if (word == "input") {
      std::string name;
      if (!(tokens >> name)) fail("input needs a stream name");
      spec.inputs.push_back(name);
    } else if (word == "output") {
      std::string name;
      if (!(tokens >> name)) fail("output needs a stream name");
      spec.outputs.push_back(name);
    } else if (word == "node") {
      std::string name, type;
      if (!(tokens >> name >> type)) fail("node needs a name and a type");
      std::vector<std::string> ins, outs;
      bool after_arrow = false;
      while (tokens >> word) {
        if (word == "->") {
          after_arrow = true;
          continue;
        }
        // Strip the documentation prefixes; kinds come from the registry.
        if (word.rfind("back:", 0) == 0) word = word.substr(5);
        if (word.rfind("opt:", 0) == 0) word = word.substr(4);
        (after_arrow ? outs : ins).push_back(word);
      }
      if (!after_arrow) fail("node line is missing '->'");
      spec.nodes.push_back(make_node(name, type, ins, outs, nodes));
    } else {
      fail("unknown directive '" + word + "'");
    }
  }

  if (spec.inputs.size() == 1) spec.input_types[spec.inputs[0]] = PayloadType::kScene;
  return spec;
}

GraphSpec load_graph_file(const std::string& path, const PipelineNodes& nodes) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open graph file: " + path);
  std::stringstream buffer;
  buffer << file.rdbuf();
  return load_graph_spec(buffer.str(), nodes);
}

std::vector<Packet> scenes_to_packets(const std::vector<HandScene>& scenes) {
  std::vector<Packet> packets;
  packets.reserve(scenes.size());
  for (const auto& scene : scenes) packets.push_back(Packet::make(scene.t_us, scene));
  return packets;
}

std::vector<TrackStepReport> run_tracking_graph(const GraphSpec& spec,
                                                const std::vector<HandScene>& scenes,
                                                const RunOptions& options) {
  if (spec.inputs.size() != 1 || spec.outputs.empty()) {
    throw ConfigError("tracking graph must have one input stream and a report output");
  }
  std::map<std::string, std::vector<Packet>> inputs;
  inputs[spec.inputs[0]] = scenes_to_packets(scenes);
  RunResult result = run_graph(spec, inputs, options);
  std::vector<TrackStepReport> reports;
  for (const auto& packet : result.outputs.at(spec.outputs[0])) {
    reports.push_back(packet.get<TrackStepReport>());
  }
  return reports;
}

}  // namespace handpipe::graph
