#include "consol/config.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>

#include "consol/io.hpp"

namespace consol {

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

namespace {

using nlohmann::json;

/// Typed access to one JSON object, tracking the dotted path for errors and
/// which keys were consumed.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string path_of(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(path_of(key), "expected a number");
    return v.get<double>();
  }

  long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (v.is_number_integer()) return v.get<long long>();
    if (v.is_number_float()) {
      const double d = v.get<double>();
      if (std::floor(d) == d && std::abs(d) < 9e15) return static_cast<long long>(d);
    }
    throw ConfigError(path_of(key), "expected an integer");
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(path_of(key), "expected true or false");
    return v.get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(path_of(key), "expected a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> fallback = std::nullopt) {
    if (!has(key)) return require(key, fallback);
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(path_of(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(path_of(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Section child(const std::string& key) {
    if (!has(key)) return Section(empty_object(), path_of(key));
    return Section(raw(key), path_of(key));
  }

  void reject_unknown() const {
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) throw ConfigError(path_of(key), "unknown field");
    }
  }

 private:
  static const json& empty_object() {
    static const json empty = json::object();
    return empty;
  }

  template <class T>
  T require(const std::string& key, const std::optional<T>& fallback) const {
    if (!fallback) throw ConfigError(path_of(key), "required field is missing");
    return *fallback;
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

int positive_int(Section& s, const std::string& key, long long fallback, long long min_value = 1) {
  const long long v = s.integer(key, fallback);
  if (v < min_value || v > 1'000'000'000LL) {
    throw ConfigError(s.path_of(key), "must be an integer >= " + std::to_string(min_value));
  }
  return static_cast<int>(v);
}

TrainConfig parse_training(Section s, const TrainConfig& defaults) {
  TrainConfig c = defaults;
  c.epochs = positive_int(s, "epochs", defaults.epochs);
  c.learning_rate = s.number("learning_rate", defaults.learning_rate);
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) {
    throw ConfigError(s.path_of("learning_rate"), "must be positive");
  }
  c.beta1 = s.number("beta1", defaults.beta1);
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0)) throw ConfigError(s.path_of("beta1"), "must lie in [0, 1)");
  c.beta2 = s.number("beta2", defaults.beta2);
  if (!(c.beta2 >= 0.0 && c.beta2 < 1.0)) throw ConfigError(s.path_of("beta2"), "must lie in [0, 1)");
  c.epsilon = s.number("epsilon", defaults.epsilon);
  if (!(c.epsilon >= 0.0) || !std::isfinite(c.epsilon)) throw ConfigError(s.path_of("epsilon"), "must be >= 0");
  c.n_interior = positive_int(s, "n_interior", defaults.n_interior);
  c.n_boundary = positive_int(s, "n_boundary", defaults.n_boundary);
  c.n_initial = positive_int(s, "n_initial", defaults.n_initial);
  c.n_test = positive_int(s, "n_test", defaults.n_test);
  const long long seed = s.integer("seed", static_cast<long long>(defaults.seed));
  if (seed < 0) throw ConfigError(s.path_of("seed"), "must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.log_every = positive_int(s, "log_every", defaults.log_every);
  const std::vector<double> w = s.numbers(
      "loss_weights", std::vector<double>{defaults.loss_weights.pde, defaults.loss_weights.bc, defaults.loss_weights.ic});
  if (w.size() != 3) throw ConfigError(s.path_of("loss_weights"), "expected [pde, bc, ic]");
  for (double v : w) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw ConfigError(s.path_of("loss_weights"), "weights must be >= 0");
  }
  c.loss_weights = LossWeights{w[0], w[1], w[2]};
  s.reject_unknown();
  return c;
}

void check_times(const std::vector<double>& times, double t0, double t1, const std::string& path) {
  if (times.empty()) throw ConfigError(path, "need at least one snapshot time");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] >= t0 && times[i] <= t1)) {
      throw ConfigError(path + "[" + std::to_string(i) + "]", "outside the time interval");
    }
    if (i > 0 && !(times[i] > times[i - 1])) throw ConfigError(path, "times must be strictly increasing");
  }
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed document: ") + e.what());
  }
}

}  // namespace

ConsolidationProblem RunConfig::to_problem() const {
  return make_problem(problem.geometry, problem.time, Diffusivity{problem.c_v, problem.c_v}, problem.q,
                      problem.drainage, problem.lateral_drained);
}

std::vector<int> RunConfig::layer_sizes() const { return mlp_layer_sizes(network.hidden_layers, network.width); }

RunConfig parse_config(const json& document) {
  Section root(document, "");
  RunConfig cfg;

  Section p = root.child("problem");
  ProblemBlock& pb = cfg.problem;
  pb.geometry.x_min = p.number("x_min");
  pb.geometry.x_max = p.number("x_max");
  pb.geometry.z_min = p.number("z_min");
  pb.geometry.z_max = p.number("z_max");
  if (!(pb.geometry.x_min < pb.geometry.x_max)) throw ConfigError("problem.x_max", "must exceed x_min");
  if (!(pb.geometry.z_min < pb.geometry.z_max)) throw ConfigError("problem.z_max", "must exceed z_min");
  pb.time.t0 = p.number("t0", 0.0);
  pb.time.t1 = p.number("t1");
  if (!(pb.time.t0 < pb.time.t1)) throw ConfigError("problem.t1", "must exceed t0");
  pb.c_v = p.number("c_v");
  if (!(pb.c_v > 0.0) || !std::isfinite(pb.c_v)) throw ConfigError("problem.c_v", "must be positive");
  pb.q = p.number("q");
  if (!(pb.q >= 0.0) || !std::isfinite(pb.q)) throw ConfigError("problem.q", "must be >= 0");
  const std::string mode = p.string("drainage_mode", std::string("top"));
  if (mode == "top") {
    pb.drainage = DrainageMode::top;
  } else if (mode == "top_bottom") {
    pb.drainage = DrainageMode::top_bottom;
  } else {
    throw ConfigError("problem.drainage_mode", "expected \"top\" or \"top_bottom\"");
  }
  pb.lateral_drained = p.boolean("lateral_drained", true);
  p.reject_unknown();

  Section n = root.child("network");
  cfg.network.hidden_layers = positive_int(n, "hidden_layers", 5, 0);
  cfg.network.width = positive_int(n, "width", 32);
  cfg.network.activation = n.string("activation", std::string(kActivationTanh));
  if (cfg.network.activation != kActivationTanh) {
    throw ConfigError("network.activation", "only \"tanh\" is supported");
  }
  n.reject_unknown();

  cfg.training = parse_training(root.child("training"), TrainConfig{});

  Section e = root.child("evaluation");
  cfg.evaluation.grid_nx = positive_int(e, "grid_nx", 201, 3);
  cfg.evaluation.grid_nz = positive_int(e, "grid_nz", 101, 3);
  cfg.evaluation.n_test = positive_int(e, "n_test", cfg.training.n_test);
  const double span = pb.time.t1 - pb.time.t0;
  std::vector<double> defaults;
  for (double f : {0.05, 0.2, 0.5, 1.0}) defaults.push_back(f == 1.0 ? pb.time.t1 : pb.time.t0 + f * span);
  cfg.evaluation.snapshot_times = e.numbers("snapshot_times", defaults);
  check_times(cfg.evaluation.snapshot_times, pb.time.t0, pb.time.t1, "evaluation.snapshot_times");
  e.reject_unknown();

  root.reject_unknown();
  return cfg;
}

RunConfig parse_config_text(const std::string& text) { return parse_config(parse_document(text)); }

RunConfig load_config(const std::filesystem::path& path) { return parse_config_text(read_text_file(path)); }

nlohmann::json to_json(const TrainConfig& c) {
  return json{{"epochs", c.epochs},
              {"learning_rate", c.learning_rate},
              {"beta1", c.beta1},
              {"beta2", c.beta2},
              {"epsilon", c.epsilon},
              {"n_interior", c.n_interior},
              {"n_boundary", c.n_boundary},
              {"n_initial", c.n_initial},
              {"n_test", c.n_test},
              {"seed", c.seed},
              {"log_every", c.log_every},
              {"loss_weights", {c.loss_weights.pde, c.loss_weights.bc, c.loss_weights.ic}}};
}

nlohmann::json to_json(const RunConfig& c) {
  const ProblemBlock& p = c.problem;
  return json{
      {"problem",
       {{"x_min", p.geometry.x_min},
        {"x_max", p.geometry.x_max},
        {"z_min", p.geometry.z_min},
        {"z_max", p.geometry.z_max},
        {"t0", p.time.t0},
        {"t1", p.time.t1},
        {"c_v", p.c_v},
        {"q", p.q},
        {"drainage_mode", std::string(to_string(p.drainage))},
        {"lateral_drained", p.lateral_drained}}},
      {"network",
       {{"hidden_layers", c.network.hidden_layers},
        {"width", c.network.width},
        {"activation", c.network.activation}}},
      {"training", to_json(c.training)},
      {"evaluation",
       {{"grid_nx", c.evaluation.grid_nx},
        {"grid_nz", c.evaluation.grid_nz},
        {"snapshot_times", c.evaluation.snapshot_times},
        {"n_test", c.evaluation.n_test}}}};
}

ConsolidationProblem CaseStudyConfig::layer_problem(std::size_t layer) const {
  const double c = layers.at(layer).c_v;
  return make_problem(Rectangle{-half_width, half_width, 0.0, total_thickness()}, TimeInterval{0.0, duration},
                      Diffusivity{c, c}, u0, DrainageMode::top, true);
}

CaseStudyConfig parse_case_config(const json& document) {
  Section root(document, "");
  CaseStudyConfig cfg;

  if (!root.has("layers")) throw ConfigError("layers", "required field is missing");
  const json& layers = root.raw("layers");
  if (!layers.is_array() || layers.empty()) throw ConfigError("layers", "expected a nonempty array");
  double expected_top = 0.0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Section l(layers[i], "layers[" + std::to_string(i) + "]");
    CaseLayer layer;
    layer.name = l.string("name");
    if (layer.name.empty()) throw ConfigError(l.path_of("name"), "must not be empty");
    layer.thickness = l.number("thickness");
    if (!(layer.thickness > 0.0)) throw ConfigError(l.path_of("thickness"), "must be positive");
    layer.c_v = l.number("c_v");
    if (!(layer.c_v > 0.0) || !std::isfinite(layer.c_v)) throw ConfigError(l.path_of("c_v"), "must be positive");
    const std::vector<double> range = l.numbers("depth_range");
    if (range.size() != 2) throw ConfigError(l.path_of("depth_range"), "expected [top, bottom]");
    layer.depth_top = range[0];
    layer.depth_bottom = range[1];
    if (std::abs(layer.depth_top - expected_top) > 1e-9 * std::max(1.0, expected_top)) {
      throw ConfigError(l.path_of("depth_range"), "layers must be contiguous starting at depth 0");
    }
    if (std::abs((layer.depth_bottom - layer.depth_top) - layer.thickness) > 1e-9 * layer.thickness) {
      throw ConfigError(l.path_of("depth_range"), "does not match thickness");
    }
    for (const CaseLayer& other : cfg.layers) {
      if (other.name == layer.name) throw ConfigError(l.path_of("name"), "duplicate layer name");
    }
    expected_top = layer.depth_bottom;
    l.reject_unknown();
    cfg.layers.push_back(layer);
  }

  cfg.u0 = root.number("u0");
  if (!(cfg.u0 > 0.0) || !std::isfinite(cfg.u0)) throw ConfigError("u0", "must be positive");
  cfg.half_width = root.number("half_width");
  if (!(cfg.half_width > 0.0)) throw ConfigError("half_width", "must be positive");
  cfg.snapshot_times = root.numbers("snapshot_times");
  if (cfg.snapshot_times.empty()) throw ConfigError("snapshot_times", "need at least one snapshot time");
  cfg.duration = root.number("duration", *std::max_element(cfg.snapshot_times.begin(), cfg.snapshot_times.end()));
  if (!(cfg.duration > 0.0)) throw ConfigError("duration", "must be positive");
  check_times(cfg.snapshot_times, 0.0, cfg.duration, "snapshot_times");
  cfg.grid_nx = positive_int(root, "grid_nx", 101, 3);
  cfg.grid_nz = positive_int(root, "grid_nz", 81, 3);
  cfg.fd_nx = positive_int(root, "fd_nx", 41, 3);
  cfg.fd_nz = positive_int(root, "fd_nz", 41, 3);

  TrainConfig defaults;
  defaults.epochs = 50000;
  defaults.n_interior = 1000;
  defaults.n_boundary = 1000;
  defaults.n_initial = 1000;
  defaults.n_test = 1000;
  defaults.log_every = 500;
  cfg.training = parse_training(root.child("training"), defaults);
  root.reject_unknown();
  return cfg;
}

CaseStudyConfig load_case_config(const std::filesystem::path& path) {
  return parse_case_config(parse_document(read_text_file(path)));
}

nlohmann::json to_json(const CaseStudyConfig& c) {
  json layers = json::array();
  for (const CaseLayer& l : c.layers) {
    layers.push_back({{"name", l.name},
                      {"thickness", l.thickness},
                      {"c_v", l.c_v},
                      {"depth_range", {l.depth_top, l.depth_bottom}}});
  }
  return json{{"layers", layers},
              {"u0", c.u0},
              {"half_width", c.half_width},
              {"duration", c.duration},
              {"snapshot_times", c.snapshot_times},
              {"grid_nx", c.grid_nx},
              {"grid_nz", c.grid_nz},
              {"fd_nx", c.fd_nx},
              {"fd_nz", c.fd_nz},
              {"training", to_json(c.training)}};
}

}  // namespace consol
