#include "consol/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

namespace consol {

namespace {

void check_series_problem(const ConsolidationProblem& problem, const SeriesSpec& spec) {
  if (spec.truncation < 1 || spec.truncation % 2 == 0) {
    throw std::invalid_argument("series truncation must be a positive odd integer");
  }
  for (const BoundaryCondition& bc : problem.bcs) {
    if (bc.value != 0.0) throw std::invalid_argument("series solution needs homogeneous boundary data");
  }
  if (!problem.laterally_drained() || problem.bc(Edge::top).kind != BcKind::dirichlet) {
    throw std::invalid_argument("series solution needs drained surface and sides");
  }
}

// (4/pi) sum_{k odd <= N} sin(k pi s / L) exp(-c (k pi / L)^2 t) / k, with an
// exact zero where every sine vanishes.
double sine_sum(double s, double L, double c, double t, int truncation, bool zero_at_end) {
  if (s == 0.0 || (zero_at_end && s == L)) return 0.0;
  double total = 0.0;
  for (int k = 1; k <= truncation; k += 2) {
    const double wave = k * std::numbers::pi / L;
    total += std::sin(wave * s) * std::exp(-(c * (wave * wave)) * t) / k;
  }
  return 4.0 / std::numbers::pi * total;
}

struct SeriesFactors {
  double width;
  double depth_period;
  bool base_drained;
};

SeriesFactors factors_for(const ConsolidationProblem& problem) {
  const bool base_drained = problem.bc(Edge::bottom).kind == BcKind::dirichlet;
  const double h = problem.geometry.thickness();
  return {problem.geometry.width(), base_drained ? h : 2.0 * h, base_drained};
}

double x_factor(const ConsolidationProblem& p, const SeriesFactors& f, double x, double t, int n) {
  return sine_sum(x - p.geometry.x_min, f.width, p.c_v.x, t, n, true);
}

double z_factor(const ConsolidationProblem& p, const SeriesFactors& f, double z, double t, int n) {
  return sine_sum(z - p.geometry.z_min, f.depth_period, p.c_v.z, t, n, f.base_drained);
}

}  // namespace

bool series_applicable(const ConsolidationProblem& problem) {
  try {
    check_series_problem(problem, SeriesSpec{});
    return true;
  } catch (const std::invalid_argument&) {
    return false;
  }
}

double series_solution(const ConsolidationProblem& problem, const Point& p, SeriesSpec spec) {
  check_series_problem(problem, spec);
  if (!problem.geometry.contains(p)) throw std::invalid_argument("series_solution: point outside geometry");
  if (!(p.t >= problem.time.t0)) throw std::invalid_argument("series_solution: time before t0");
  const SeriesFactors f = factors_for(problem);
  const double t = p.t - problem.time.t0;
  return problem.q * x_factor(problem, f, p.x, t, spec.truncation) *
         z_factor(problem, f, p.z, t, spec.truncation);
}

FieldGrid series_grid(const ConsolidationProblem& problem, const std::vector<double>& x,
                      const std::vector<double>& z, double t, SeriesSpec spec) {
  check_series_problem(problem, spec);
  const Rectangle& g = problem.geometry;
  for (double xi : x) {
    if (xi < g.x_min || xi > g.x_max) throw std::invalid_argument("series_grid: x outside geometry");
  }
  for (double zj : z) {
    if (zj < g.z_min || zj > g.z_max) throw std::invalid_argument("series_grid: z outside geometry");
  }
  const SeriesFactors f = factors_for(problem);
  const double tau = t - problem.time.t0;
  std::vector<double> xs(x.size());
  std::vector<double> zs(z.size());
  for (std::size_t i = 0; i < x.size(); ++i) xs[i] = x_factor(problem, f, x[i], tau, spec.truncation);
  for (std::size_t j = 0; j < z.size(); ++j) zs[j] = z_factor(problem, f, z[j], tau, spec.truncation);

  FieldGrid grid{x, z, t, Eigen::MatrixXd(static_cast<Eigen::Index>(z.size()), static_cast<Eigen::Index>(x.size()))};
  for (std::size_t j = 0; j < z.size(); ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      grid.u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = problem.q * xs[i] * zs[j];
    }
  }
  return grid;
}

std::vector<double> uniform_axis(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("uniform_axis: need at least 2 points");
  std::vector<double> axis(static_cast<std::size_t>(n));
  const double h = (hi - lo) / (n - 1);
  for (int i = 0; i < n; ++i) axis[static_cast<std::size_t>(i)] = lo + h * i;
  axis.back() = hi;
  return axis;
}

FdSolver::FdSolver(const ConsolidationProblem& problem, int nx, int nz) : problem_(problem) {
  validate(problem_);
  if (nx < 3 || nz < 3) throw std::invalid_argument("fd grid needs at least 3 nodes per axis");
  const Rectangle& g = problem_.geometry;
  x_ = uniform_axis(g.x_min, g.x_max, nx);
  z_ = uniform_axis(g.z_min, g.z_max, nz);
  dx_ = g.width() / (nx - 1);
  dz_ = g.thickness() / (nz - 1);
  dt_ = 0.9 / (2.0 * (problem_.c_v.x / (dx_ * dx_) + problem_.c_v.z / (dz_ * dz_)));
  t_ = problem_.time.t0;
  u_ = Eigen::MatrixXd::Constant(nz, nx, problem_.q);
  next_ = u_;
  pin_dirichlet();
}

void FdSolver::pin_dirichlet() {
  const Eigen::Index nz = u_.rows();
  const Eigen::Index nx = u_.cols();
  if (problem_.bc(Edge::left).kind == BcKind::dirichlet) u_.col(0).setConstant(problem_.bc(Edge::left).value);
  if (problem_.bc(Edge::right).kind == BcKind::dirichlet) {
    u_.col(nx - 1).setConstant(problem_.bc(Edge::right).value);
  }
  if (problem_.bc(Edge::top).kind == BcKind::dirichlet) u_.row(0).setConstant(problem_.bc(Edge::top).value);
  if (problem_.bc(Edge::bottom).kind == BcKind::dirichlet) {
    u_.row(nz - 1).setConstant(problem_.bc(Edge::bottom).value);
  }
}

void FdSolver::step(double dt) {
  const Eigen::Index nz = u_.rows();
  const Eigen::Index nx = u_.cols();
  const BoundaryCondition& top = problem_.bc(Edge::top);
  const BoundaryCondition& bottom = problem_.bc(Edge::bottom);
  const BoundaryCondition& left = problem_.bc(Edge::left);
  const BoundaryCondition& right = problem_.bc(Edge::right);

  // Initial data that disagrees with a Dirichlet value is discontinuous at
  // that edge; start from the mean of the two sides.
  Eigen::MatrixXd first;
  const Eigen::MatrixXd* src = &u_;
  if (steps_ == 0) {
    first = u_;
    const double q = problem_.q;
    if (left.kind == BcKind::dirichlet) first.col(0).setConstant(0.5 * (q + left.value));
    if (right.kind == BcKind::dirichlet) first.col(nx - 1).setConstant(0.5 * (q + right.value));
    if (top.kind == BcKind::dirichlet) first.row(0).setConstant(0.5 * (q + top.value));
    if (bottom.kind == BcKind::dirichlet) first.row(nz - 1).setConstant(0.5 * (q + bottom.value));
    src = &first;
  }
  const Eigen::MatrixXd& u = *src;

  const double rx = problem_.c_v.x * dt / (dx_ * dx_);
  const double rz = problem_.c_v.z * dt / (dz_ * dz_);
  for (Eigen::Index i = 0; i < nx; ++i) {
    for (Eigen::Index j = 0; j < nz; ++j) {
      const double c = u(j, i);
      double west, east, above, below;
      if (i == 0) {
        west = u(j, 1) - 2.0 * dx_ * left.value;
      } else {
        west = u(j, i - 1);
      }
      if (i == nx - 1) {
        east = u(j, nx - 2) + 2.0 * dx_ * right.value;
      } else {
        east = u(j, i + 1);
      }
      if (j == 0) {
        above = u(1, i) - 2.0 * dz_ * top.value;
      } else {
        above = u(j - 1, i);
      }
      if (j == nz - 1) {
        below = u(nz - 2, i) + 2.0 * dz_ * bottom.value;
      } else {
        below = u(j + 1, i);
      }
      next_(j, i) = c + rx * (west - 2.0 * c + east) + rz * (above - 2.0 * c + below);
    }
  }
  u_.swap(next_);
  pin_dirichlet();
  ++steps_;
}

void FdSolver::advance_to(double t) {
  const double span = problem_.time.t1 - problem_.time.t0;
  const double slack = 1e-12 * std::max(1.0, std::abs(span));
  if (t < t_ - slack) throw std::invalid_argument("FdSolver::advance_to: target precedes current time");
  if (t > problem_.time.t1 + slack) throw std::invalid_argument("FdSolver::advance_to: target past t1");
  while (t - t_ > slack) {
    const double remaining = t - t_;
    if (remaining <= dt_ * (1.0 + 1e-12)) {
      step(remaining);
      t_ = t;
    } else {
      step(dt_);
      t_ += dt_;
    }
  }
}

FieldGrid FdSolver::snapshot() const { return FieldGrid{x_, z_, t_, u_}; }

double FdSolver::interpolate(double x, double z) const {
  const Eigen::Index nx = u_.cols();
  const Eigen::Index nz = u_.rows();
  const double fx = std::clamp((x - x_.front()) / dx_, 0.0, static_cast<double>(nx - 1));
  const double fz = std::clamp((z - z_.front()) / dz_, 0.0, static_cast<double>(nz - 1));
  const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(fx), nx - 2);
  const auto j = std::min<Eigen::Index>(static_cast<Eigen::Index>(fz), nz - 2);
  const double ax = fx - static_cast<double>(i);
  const double az = fz - static_cast<double>(j);
  return (1.0 - az) * ((1.0 - ax) * u_(j, i) + ax * u_(j, i + 1)) +
         az * ((1.0 - ax) * u_(j + 1, i) + ax * u_(j + 1, i + 1));
}

std::vector<FieldGrid> fd_solve(const ConsolidationProblem& problem, int nx, int nz,
                                std::span<const double> t_targets) {
  for (std::size_t k = 0; k < t_targets.size(); ++k) {
    const double t = t_targets[k];
    if (!(t >= problem.time.t0 && t <= problem.time.t1)) {
      throw std::invalid_argument("fd_solve: target time " + std::to_string(t) + " outside [t0, t1]");
    }
    if (k > 0 && t < t_targets[k - 1]) throw std::invalid_argument("fd_solve: target times must be sorted");
  }
  FdSolver solver(problem, nx, nz);
  std::vector<FieldGrid> out;
  out.reserve(t_targets.size());
  for (double t : t_targets) {
    solver.advance_to(t);
    FieldGrid g = solver.snapshot();
    g.t = t;
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<double> fd_sample(const ConsolidationProblem& problem, int nx, int nz,
                              std::span<const Point> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return points[a].t < points[b].t; });
  FdSolver solver(problem, nx, nz);
  std::vector<double> values(points.size());
  for (std::size_t idx : order) {
    const Point& p = points[idx];
    if (!(p.t >= problem.time.t0 && p.t <= problem.time.t1)) {
      throw std::invalid_argument("fd_sample: point time outside [t0, t1]");
    }
    solver.advance_to(p.t);
    values[idx] = solver.interpolate(p.x, p.z);
  }
  return values;
}

Consolidation degree_of_consolidation(const FieldGrid& grid, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("degree_of_consolidation: q must be positive");
  const double raw = 1.0 - grid.mean() / q;
  return {raw, std::clamp(raw, 0.0, 1.0)};
}

}  // namespace consol
