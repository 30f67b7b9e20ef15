#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "consol/jet_batch.hpp"
#include "consol/problem.hpp"

namespace consol {

struct SeriesSpec {
  /// Largest (odd) index kept in both sine sums.
  int truncation = 199;
};

/// Eigenfunction-expansion solution for a uniformly loaded layer with drained
/// sides. With xi = x - x_min, zeta = z - z_min, W = x_max - x_min and
/// H = z_max - z_min:
///
///   u = (16 q / pi^2) sum_{n odd} sum_{m odd} 1/(n m)
///         sin(n pi xi / W) sin(m pi zeta / L)
///         exp(-[c_x (n pi / W)^2 + c_z (m pi / L)^2] t)
///
/// where L = 2H when the base is impervious (quarter-wave modes) and L = H
/// when it drains. The double sum factorises into the product of the two
/// one-dimensional sums, which is how it is evaluated.
///
/// Throws std::invalid_argument for problems it does not cover (impervious
/// sides, non-zero boundary data), for points outside the rectangle and for
/// an even or non-positive truncation.
double series_solution(const ConsolidationProblem& problem, const Point& p, SeriesSpec spec = {});

/// True when series_solution covers the problem's boundary conditions.
bool series_applicable(const ConsolidationProblem& problem);

/// Pressure sampled on a uniform grid at one time. Row index runs along z,
/// column index along x.
struct FieldGrid {
  std::vector<double> x;
  std::vector<double> z;
  double t = 0.0;
  Eigen::MatrixXd u;

  double mean() const { return u.mean(); }
  double max() const { return u.maxCoeff(); }
};

/// Uniform axis of n points from lo to hi inclusive.
std::vector<double> uniform_axis(double lo, double hi, int n);

/// Explicit forward-time centred-space solver on an nx x nz node grid.
///
/// The step is 0.9 of the stability limit 1 / (2 (c_x/dx^2 + c_z/dz^2));
/// the last step before each target is shortened to land on it exactly.
/// Dirichlet nodes are pinned after every step; Neumann edges use mirrored
/// ghost nodes. Where the initial pressure jumps to a different Dirichlet
/// value, the first step starts from the average of the two, the value a
/// Fourier expansion takes at the jump.
class FdSolver {
 public:
  FdSolver(const ConsolidationProblem& problem, int nx, int nz);

  double time() const { return t_; }
  double time_step() const { return dt_; }
  std::size_t steps_taken() const { return steps_; }

  /// Marches to `t`; throws if t lies before the current time or past t1.
  void advance_to(double t);

  FieldGrid snapshot() const;

  /// Bilinear interpolation of the current field.
  double interpolate(double x, double z) const;

 private:
  void step(double dt);
  void pin_dirichlet();

  ConsolidationProblem problem_;
  std::vector<double> x_;
  std::vector<double> z_;
  double dx_;
  double dz_;
  double dt_;
  double t_;
  std::size_t steps_ = 0;
  Eigen::MatrixXd u_;
  Eigen::MatrixXd next_;
};

/// Snapshots at each target time (sorted, within the problem's interval).
std::vector<FieldGrid> fd_solve(const ConsolidationProblem& problem, int nx, int nz,
                                std::span<const double> t_targets);

/// FD solution interpolated at arbitrary space-time points, in input order.
std::vector<double> fd_sample(const ConsolidationProblem& problem, int nx, int nz,
                              std::span<const Point> points);

/// Series solution on the nodes of a grid.
FieldGrid series_grid(const ConsolidationProblem& problem, const std::vector<double>& x,
                      const std::vector<double>& z, double t, SeriesSpec spec = {});

struct Consolidation {
  double raw = 0.0;      ///< 1 - mean(u) / q
  double clamped = 0.0;  ///< raw limited to [0, 1]
};

/// Degree of consolidation of a field relative to the initial pressure q (> 0).
Consolidation degree_of_consolidation(const FieldGrid& grid, double q);

}  // namespace consol
