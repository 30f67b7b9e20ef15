#pragma once

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include "consol/jet.hpp"
#include "consol/jet_batch.hpp"
#include "consol/network.hpp"
#include "consol/random.hpp"

namespace consol {

/// Plane-strain soil section. z grows downward: z_min is the ground surface
/// and z_max the base of the layer.
struct Rectangle {
  double x_min = 0.0;
  double x_max = 0.0;
  double z_min = 0.0;
  double z_max = 0.0;

  double width() const { return x_max - x_min; }
  double thickness() const { return z_max - z_min; }
  bool contains(const Point& p) const {
    return p.x >= x_min && p.x <= x_max && p.z >= z_min && p.z <= z_max;
  }
  bool operator==(const Rectangle&) const = default;
};

struct TimeInterval {
  double t0 = 0.0;
  double t1 = 1.0;

  bool operator==(const TimeInterval&) const = default;
};

enum class Edge { top, bottom, left, right };
enum class BcKind { dirichlet, neumann };
enum class DrainageMode { top, top_bottom };

std::string_view to_string(Edge e);
std::string_view to_string(DrainageMode m);

/// Dirichlet: u = value. Neumann: the coordinate derivative normal to the
/// edge (du/dz on top/bottom, du/dx on left/right) equals value.
struct BoundaryCondition {
  Edge edge = Edge::top;
  BcKind kind = BcKind::dirichlet;
  double value = 0.0;

  bool operator==(const BoundaryCondition&) const = default;
};

/// Consolidation coefficient per axis. The two entries coincide in physical
/// units and differ only after anisotropic rescaling.
struct Diffusivity {
  double x = 0.0;
  double z = 0.0;

  bool operator==(const Diffusivity&) const = default;
};

struct ConsolidationProblem {
  Rectangle geometry;
  TimeInterval time;
  Diffusivity c_v;
  double q = 0.0;
  /// Indexed by Edge.
  std::array<BoundaryCondition, 4> bcs;
  DrainageMode drainage = DrainageMode::top;

  const BoundaryCondition& bc(Edge e) const { return bcs[static_cast<std::size_t>(e)]; }
  bool laterally_drained() const;
};

/// Checks every invariant of a problem; throws std::invalid_argument.
void validate(const ConsolidationProblem& problem);

/// Builds a problem on an arbitrary rectangle. Lateral edges are drained
/// (u = 0) or impervious (du/dx = 0); the surface is always drained and the
/// base is drained only for DrainageMode::top_bottom.
ConsolidationProblem make_problem(const Rectangle& geometry, const TimeInterval& time,
                                  Diffusivity c_v, double q, DrainageMode drainage,
                                  bool lateral_drained = true);

/// Layer on [-A, A] x [0, H] draining through the surface and both sides,
/// impervious base, initial pressure q.
ConsolidationProblem make_top_drained(double A, double H, double c_v, double q, double t1);

/// Layer on [-A, A] x [0, 2 H_half] draining through surface, base and sides.
ConsolidationProblem make_double_drained(double A, double H_half, double c_v, double q, double t1);

/// Equivalent problem on x in [-1, 1], z in [0, 1], t in [0, 1] with unit
/// initial pressure, and the map back to physical units. Per-axis
/// coefficients become c * T / Lx^2 and c * T / Lz^2.
struct ScaledProblem {
  ConsolidationProblem unit;
  Scaling scaling;
};
ScaledProblem rescale_to_unit(const ConsolidationProblem& physical);

struct BoundarySample {
  Point point;
  BoundaryCondition bc;
};

/// Uniform points strictly inside the rectangle with t in (t0, t1).
std::vector<Point> sample_interior(const ConsolidationProblem& problem, std::size_t n, Rng& rng);

/// Uniform points along the perimeter (edges weighted by length), each
/// tagged with its edge's condition.
std::vector<BoundarySample> sample_boundary(const ConsolidationProblem& problem, std::size_t n, Rng& rng);

/// Uniform points over the rectangle at t = t0. Their target is problem.q.
std::vector<Point> sample_initial(const ConsolidationProblem& problem, std::size_t n, Rng& rng);

template <class T>
T pde_residual(const BasicJet<T>& jet, Diffusivity c_v) {
  return jet.d_t - (c_v.x * jet.d_xx + c_v.z * jet.d_zz);
}

template <class T>
T pde_residual(const BasicJet<T>& jet, double c_v) {
  return pde_residual(jet, Diffusivity{c_v, c_v});
}

template <class T>
T bc_residual(const BasicJet<T>& jet, const BoundaryCondition& bc) {
  if (bc.kind == BcKind::dirichlet) return jet.val - bc.value;
  const bool horizontal = bc.edge == Edge::top || bc.edge == Edge::bottom;
  return (horizontal ? jet.d_z : jet.d_x) - bc.value;
}

/// Channels bc_residual reads for the conditions of `problem`.
ChannelSet boundary_channels(const ConsolidationProblem& problem);

}  // namespace consol
