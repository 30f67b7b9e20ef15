#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "consol/problem.hpp"
#include "consol/training.hpp"

namespace consol {

/// Invalid or malformed configuration. `path()` is the dotted location of
/// the offending field (e.g. "problem.c_v"), empty for document-level errors.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct ProblemBlock {
  Rectangle geometry;
  TimeInterval time;
  double c_v = 0.0;
  double q = 0.0;
  DrainageMode drainage = DrainageMode::top;
  bool lateral_drained = true;
};

struct NetworkBlock {
  int hidden_layers = 5;
  int width = 32;
  std::string activation = "tanh";
};

struct EvaluationBlock {
  int grid_nx = 201;
  int grid_nz = 101;
  std::vector<double> snapshot_times;
  int n_test = 1000;
};

struct RunConfig {
  ProblemBlock problem;
  NetworkBlock network;
  TrainConfig training;
  EvaluationBlock evaluation;

  ConsolidationProblem to_problem() const;
  std::vector<int> layer_sizes() const;
};

/// Parses and validates a run configuration.
///
/// problem: x_min, x_max, z_min, z_max, t1, c_v, q are required; t0 = 0,
///   drainage_mode = "top" ("top" | "top_bottom"), lateral_drained = true.
/// network: hidden_layers = 5, width = 32, activation = "tanh".
/// training: epochs = 10000, learning_rate = 1e-3, beta1 = 0.9,
///   beta2 = 0.999, epsilon = 1e-8, n_interior = 1000, n_boundary = 100,
///   n_initial = 100, n_test = 1000, seed = 42, log_every = 100,
///   loss_weights = [1, 1, 1] (pde, bc, ic).
/// evaluation: grid_nx = 201, grid_nz = 101, n_test = training.n_test,
///   snapshot_times = t0 + {0.05, 0.2, 0.5, 1.0} * (t1 - t0).
///
/// Unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& document);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const TrainConfig& config);

struct CaseLayer {
  std::string name;
  double thickness = 0.0;
  double c_v = 0.0;
  double depth_top = 0.0;
  double depth_bottom = 0.0;
};

/// Layered site: one model per layer, each trained on the full section with
/// that layer's coefficient, and reported on its own depth band.
///
/// Required: layers (name, thickness, c_v, depth_range [top, bottom]), u0,
/// half_width, snapshot_times. Optional: duration = max snapshot time,
/// grid_nx = 101, grid_nz = 81, fd_nx = 41, fd_nz = 41, training (same keys
/// as the run config; epochs = 50000 and 1000 points per set by default).
struct CaseStudyConfig {
  std::vector<CaseLayer> layers;
  double u0 = 0.0;
  double half_width = 0.0;
  double duration = 0.0;
  std::vector<double> snapshot_times;
  int grid_nx = 101;
  int grid_nz = 81;
  int fd_nx = 41;
  int fd_nz = 41;
  TrainConfig training;

  double total_thickness() const { return layers.empty() ? 0.0 : layers.back().depth_bottom; }
  /// Physical top-drained problem for one layer's coefficient.
  ConsolidationProblem layer_problem(std::size_t layer) const;
};

CaseStudyConfig parse_case_config(const nlohmann::json& document);
CaseStudyConfig load_case_config(const std::filesystem::path& path);

nlohmann::json to_json(const CaseStudyConfig& config);

}  // namespace consol
