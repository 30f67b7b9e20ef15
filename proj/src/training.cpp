#include "consol/training.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <utility>

#if defined(__GLIBC__)
#include <malloc.h>
#endif

#include "consol/network.hpp"
#include "consol/random.hpp"

namespace consol {

void validate(const TrainConfig& c) {
  auto fail = [](const std::string& what) { throw std::invalid_argument(what); };
  if (c.epochs < 1) fail("epochs must be >= 1");
  if (!(c.learning_rate > 0.0) || !std::isfinite(c.learning_rate)) fail("learning_rate must be positive");
  if (!(c.beta1 >= 0.0 && c.beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
  if (!(c.beta2 >= 0.0 && c.beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
  if (!(c.epsilon >= 0.0) || !std::isfinite(c.epsilon)) fail("epsilon must be >= 0");
  if (c.n_interior < 1) fail("n_interior must be >= 1");
  if (c.n_boundary < 1) fail("n_boundary must be >= 1");
  if (c.n_initial < 1) fail("n_initial must be >= 1");
  if (c.n_test < 1) fail("n_test must be >= 1");
  if (c.log_every < 1) fail("log_every must be >= 1");
  const LossWeights& w = c.loss_weights;
  if (!(w.pde >= 0.0) || !(w.bc >= 0.0) || !(w.ic >= 0.0)) fail("loss_weights must be >= 0");
}

void adam_step(std::span<double> params, std::span<const double> grad, AdamState& state,
               const TrainConfig& config) {
  if (grad.size() != params.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw std::invalid_argument("adam_step: size mismatch");
  }
  ++state.step;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const auto step = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(b1, step);
  const double c2 = 1.0 - std::pow(b2, step);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    params[i] -= config.learning_rate * m_hat / (std::sqrt(v_hat) + config.epsilon);
  }
}

CollocationSet sample_collocation(const ConsolidationProblem& problem, std::size_t n_interior,
                                  std::size_t n_boundary, std::size_t n_initial, std::uint64_t seed,
                                  bool test) {
  Rng interior = make_rng(seed, test ? RngStream::test_interior : RngStream::interior);
  Rng boundary = make_rng(seed, test ? RngStream::test_boundary : RngStream::boundary);
  Rng initial = make_rng(seed, test ? RngStream::test_initial : RngStream::initial);
  CollocationSet set;
  set.interior = sample_interior(problem, n_interior, interior);
  for (const BoundarySample& s : sample_boundary(problem, n_boundary, boundary)) {
    set.boundary.push_back(s.point);
    set.boundary_bcs.push_back(s.bc);
  }
  set.initial = sample_initial(problem, n_initial, initial);
  return set;
}

namespace {

struct LossTerms {
  Var mse_f;
  Var mse_b;
  Var mse_u;
  Var total;
};

std::array<JetBatchRequest, 3> requests_for(const CollocationSet& points, const ConsolidationProblem& problem) {
  return {JetBatchRequest{points.interior, ChannelSet::full()},
          JetBatchRequest{points.boundary, boundary_channels(problem)},
          JetBatchRequest{points.initial, ChannelSet::value_only()}};
}

LossTerms build_loss(std::span<const std::vector<JetVar>> jets, const CollocationSet& points,
                     const ConsolidationProblem& problem, const LossWeights& w) {
  std::vector<Var> sq;
  sq.reserve(points.interior.size());
  for (const JetVar& j : jets[0]) sq.push_back(square(pde_residual(j, problem.c_v)));
  const Var mse_f = mean(sq);

  sq.clear();
  for (std::size_t i = 0; i < jets[1].size(); ++i) sq.push_back(square(bc_residual(jets[1][i], points.boundary_bcs[i])));
  const Var mse_b = mean(sq);

  sq.clear();
  for (const JetVar& j : jets[2]) sq.push_back(square(j.val - problem.q));
  const Var mse_u = mean(sq);

  const Var total = w.pde * mse_f + w.bc * mse_b + w.ic * mse_u;
  return {mse_f, mse_b, mse_u, total};
}

LossBreakdown to_breakdown(const LossTerms& t) {
  return {t.mse_f.value(), t.mse_b.value(), t.mse_u.value(), t.total.value()};
}

void check_points(const CollocationSet& points) {
  if (points.interior.empty() || points.boundary.empty() || points.initial.empty()) {
    throw std::invalid_argument("collocation batches must be nonempty");
  }
  if (points.boundary.size() != points.boundary_bcs.size()) {
    throw std::invalid_argument("every boundary point needs a boundary condition");
  }
}

}  // namespace

LossBreakdown compute_loss(const NetworkParams& params, const CollocationSet& points,
                           const ConsolidationProblem& problem, const LossWeights& weights) {
  check_points(points);
  const auto requests = requests_for(points, problem);
  LossTerms terms;
  evaluate_loss(params, requests, [&](Tape&, std::span<const std::vector<JetVar>> jets) {
    terms = build_loss(jets, points, problem, weights);
    return terms.total;
  });
  return to_breakdown(terms);
}

LossAndGradient loss_and_gradient(const NetworkParams& params, const CollocationSet& points,
                                  const ConsolidationProblem& problem, const LossWeights& weights) {
  check_points(points);
  const auto requests = requests_for(points, problem);
  LossTerms terms;
  GradientResult r = param_gradient(params, requests, [&](Tape&, std::span<const std::vector<JetVar>> jets) {
    terms = build_loss(jets, points, problem, weights);
    return terms.total;
  });
  return {to_breakdown(terms), std::move(r.grad)};
}

double relative_l2(std::span<const double> predicted, std::span<const double> reference) {
  if (predicted.size() != reference.size()) throw std::invalid_argument("relative_l2: length mismatch");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - reference[i];
    num += d * d;
    den += reference[i] * reference[i];
  }
  if (!(den > 0.0)) throw std::invalid_argument("relative_l2: reference has zero norm");
  return std::sqrt(num) / std::sqrt(den);
}

TrainingDiverged::TrainingDiverged(int epoch, std::string term)
    : std::runtime_error("non-finite " + term + " at epoch " + std::to_string(epoch)),
      epoch_(epoch),
      term_(std::move(term)) {}

namespace {

// Each epoch allocates and frees the same few megabyte-sized jet matrices.
// glibc serves those with mmap by default, which makes the kernel zero fresh
// pages every epoch; keeping them on the heap halves training time.
void keep_large_blocks_on_heap() {
#if defined(__GLIBC__)
  static const bool done = [] {
    mallopt(M_MMAP_THRESHOLD, 256 << 20);
    mallopt(M_TRIM_THRESHOLD, 512 << 20);
    return true;
  }();
  (void)done;
#endif
}

void check_finite(const LossBreakdown& l, int epoch) {
  const std::pair<double, const char*> terms[] = {
      {l.mse_f, "mse_f"}, {l.mse_b, "mse_b"}, {l.mse_u, "mse_u"}, {l.total, "total"}};
  for (const auto& [v, name] : terms) {
    if (!std::isfinite(v)) throw TrainingDiverged(epoch, name);
  }
}

}  // namespace

TrainResult train(const ConsolidationProblem& problem, NetworkParams initial, const TrainConfig& config,
                  const ReferenceField& reference, const ProgressCallback& progress) {
  validate(problem);
  validate(config);
  keep_large_blocks_on_heap();
  const auto n_int = static_cast<std::size_t>(config.n_interior);
  const auto n_bc = static_cast<std::size_t>(config.n_boundary);
  const auto n_ic = static_cast<std::size_t>(config.n_initial);
  const CollocationSet train_set = sample_collocation(problem, n_int, n_bc, n_ic, config.seed);

  std::vector<Point> test_points;
  std::vector<double> test_reference;
  if (reference) {
    Rng rng = make_rng(config.seed, RngStream::test);
    test_points = sample_interior(problem, static_cast<std::size_t>(config.n_test), rng);
    test_reference = reference(test_points);
  }
  const auto test_metric = [&](const NetworkParams& p) {
    if (test_points.empty()) return std::numeric_limits<double>::quiet_NaN();
    return relative_l2(evaluate(p, test_points), test_reference);
  };

  TrainResult result{std::move(initial), {}, {}, {}, 0.0};
  NetworkParams& params = result.params;
  AdamState adam(params.parameter_count());

  auto record = [&](int epoch, const LossBreakdown& loss) {
    result.history.records.push_back({epoch, loss, test_metric(params)});
    if (progress) progress(result.history.records.back());
  };

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    LossAndGradient lg = loss_and_gradient(params, train_set, problem, config.loss_weights);
    check_finite(lg.loss, epoch);
    if (epoch % config.log_every == 0) record(epoch, lg.loss);
    adam_step(params.flat(), lg.grad, adam, config);
  }

  result.final_loss = compute_loss(params, train_set, problem, config.loss_weights);
  check_finite(result.final_loss, config.epochs);
  record(config.epochs, result.final_loss);
  result.test_metric = result.history.records.back().test_metric;

  const CollocationSet test_set = sample_collocation(problem, n_int, n_bc, n_ic, config.seed, true);
  result.test_loss = compute_loss(params, test_set, problem, config.loss_weights);
  return result;
}

}  // namespace consol
