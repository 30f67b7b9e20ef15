#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "consol/network_params.hpp"
#include "consol/problem.hpp"

namespace consol {

struct LossWeights {
  double pde = 1.0;
  double bc = 1.0;
  double ic = 1.0;

  bool operator==(const LossWeights&) const = default;
};

struct TrainConfig {
  int epochs = 10000;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int n_interior = 1000;
  int n_boundary = 100;
  int n_initial = 100;
  int n_test = 1000;
  std::uint64_t seed = 42;
  int log_every = 100;
  LossWeights loss_weights;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const TrainConfig& config);

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  explicit AdamState(std::size_t parameter_count = 0) : m(parameter_count, 0.0), v(parameter_count, 0.0) {}
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               const TrainConfig& config);

struct LossBreakdown {
  double mse_f = 0.0;  ///< PDE residual
  double mse_b = 0.0;  ///< boundary conditions
  double mse_u = 0.0;  ///< initial condition
  double total = 0.0;
};

/// The fixed point sets a model is trained (or tested) on.
struct CollocationSet {
  std::vector<Point> interior;
  std::vector<Point> boundary;
  std::vector<BoundaryCondition> boundary_bcs;
  std::vector<Point> initial;
};

/// Samples a collocation set with the given counts from independent streams
/// of `seed`; `test` selects the test streams instead of the training ones.
CollocationSet sample_collocation(const ConsolidationProblem& problem, std::size_t n_interior,
                                  std::size_t n_boundary, std::size_t n_initial, std::uint64_t seed,
                                  bool test = false);

LossBreakdown compute_loss(const NetworkParams& params, const CollocationSet& points,
                           const ConsolidationProblem& problem, const LossWeights& weights = {});

struct LossAndGradient {
  LossBreakdown loss;
  ParamGradient grad;
};

LossAndGradient loss_and_gradient(const NetworkParams& params, const CollocationSet& points,
                                  const ConsolidationProblem& problem, const LossWeights& weights = {});

/// ||predicted - reference||_2 / ||reference||_2. Throws on length mismatch
/// or a zero reference.
double relative_l2(std::span<const double> predicted, std::span<const double> reference);

struct HistoryRecord {
  int epoch = 0;
  LossBreakdown loss;
  double test_metric = 0.0;
};

struct TrainHistory {
  std::vector<HistoryRecord> records;
};

/// Thrown when a loss term stops being finite.
class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(int epoch, std::string term);
  int epoch() const { return epoch_; }
  const std::string& term() const { return term_; }

 private:
  int epoch_;
  std::string term_;
};

/// Reference pressure used for the test metric (problem units).
using ReferenceField = std::function<std::vector<double>(std::span<const Point>)>;

struct TrainResult {
  NetworkParams params;
  TrainHistory history;
  LossBreakdown final_loss;  ///< on the training set after the last step
  LossBreakdown test_loss;   ///< same loss on an independent set of equal size
  double test_metric = 0.0;  ///< relative L2 against the reference on n_test points
};

/// Called after each history record is appended.
using ProgressCallback = std::function<void(const HistoryRecord&)>;

/// Full-batch Adam on fixed collocation sets. Records the state before the
/// first step and after every log_every steps (and after the final step).
/// Without a reference the test metric is NaN.
TrainResult train(const ConsolidationProblem& problem, NetworkParams initial, const TrainConfig& config,
                  const ReferenceField& reference = {}, const ProgressCallback& progress = {});

}  // namespace consol
