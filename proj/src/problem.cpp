#include "consol/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace consol {

std::string_view to_string(Edge e) {
  switch (e) {
    case Edge::top: return "top";
    case Edge::bottom: return "bottom";
    case Edge::left: return "left";
    case Edge::right: return "right";
  }
  return "?";
}

std::string_view to_string(DrainageMode m) { return m == DrainageMode::top ? "top" : "top_bottom"; }

bool ConsolidationProblem::laterally_drained() const {
  return bc(Edge::left).kind == BcKind::dirichlet && bc(Edge::right).kind == BcKind::dirichlet;
}

void validate(const ConsolidationProblem& p) {
  const auto finite = [](double v) { return std::isfinite(v); };
  const Rectangle& g = p.geometry;
  if (!finite(g.x_min) || !finite(g.x_max) || !(g.x_min < g.x_max)) {
    throw std::invalid_argument("geometry: need finite x_min < x_max");
  }
  if (!finite(g.z_min) || !finite(g.z_max) || !(g.z_min < g.z_max)) {
    throw std::invalid_argument("geometry: need finite z_min < z_max");
  }
  if (!finite(p.time.t0) || !finite(p.time.t1) || !(p.time.t0 < p.time.t1)) {
    throw std::invalid_argument("time: need finite t0 < t1");
  }
  if (!(p.c_v.x > 0.0) || !(p.c_v.z > 0.0) || !finite(p.c_v.x) || !finite(p.c_v.z)) {
    throw std::invalid_argument("c_v must be positive and finite");
  }
  if (!(p.q >= 0.0) || !finite(p.q)) throw std::invalid_argument("q must be finite and >= 0");
  for (std::size_t i = 0; i < p.bcs.size(); ++i) {
    if (p.bcs[i].edge != static_cast<Edge>(i)) {
      throw std::invalid_argument("boundary conditions must cover each edge exactly once");
    }
    if (!finite(p.bcs[i].value)) throw std::invalid_argument("boundary value must be finite");
  }
}

ConsolidationProblem make_problem(const Rectangle& geometry, const TimeInterval& time, Diffusivity c_v,
                                  double q, DrainageMode drainage, bool lateral_drained) {
  ConsolidationProblem p;
  p.geometry = geometry;
  p.time = time;
  p.c_v = c_v;
  p.q = q;
  p.drainage = drainage;
  const BcKind lateral = lateral_drained ? BcKind::dirichlet : BcKind::neumann;
  const BcKind base = drainage == DrainageMode::top_bottom ? BcKind::dirichlet : BcKind::neumann;
  p.bcs = {BoundaryCondition{Edge::top, BcKind::dirichlet, 0.0}, BoundaryCondition{Edge::bottom, base, 0.0},
           BoundaryCondition{Edge::left, lateral, 0.0}, BoundaryCondition{Edge::right, lateral, 0.0}};
  validate(p);
  return p;
}

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
}

}  // namespace

ConsolidationProblem make_top_drained(double A, double H, double c_v, double q, double t1) {
  require_positive(A, "A");
  require_positive(H, "H");
  require_positive(c_v, "c_v");
  require_positive(t1, "t1");
  return make_problem(Rectangle{-A, A, 0.0, H}, TimeInterval{0.0, t1}, Diffusivity{c_v, c_v}, q,
                      DrainageMode::top);
}

ConsolidationProblem make_double_drained(double A, double H_half, double c_v, double q, double t1) {
  require_positive(A, "A");
  require_positive(H_half, "H_half");
  require_positive(c_v, "c_v");
  require_positive(t1, "t1");
  return make_problem(Rectangle{-A, A, 0.0, 2.0 * H_half}, TimeInterval{0.0, t1},
                      Diffusivity{c_v, c_v}, q, DrainageMode::top_bottom);
}

ScaledProblem rescale_to_unit(const ConsolidationProblem& physical) {
  validate(physical);
  const Rectangle& g = physical.geometry;
  Scaling s;
  s.x = AxisMap{0.5 * (g.x_min + g.x_max), 0.5 * g.width()};
  s.z = AxisMap{g.z_min, g.thickness()};
  s.t = AxisMap{physical.time.t0, physical.time.t1 - physical.time.t0};
  s.u = AxisMap{0.0, physical.q > 0.0 ? physical.q : 1.0};

  ConsolidationProblem unit = physical;
  unit.geometry = Rectangle{-1.0, 1.0, 0.0, 1.0};
  unit.time = TimeInterval{0.0, 1.0};
  unit.c_v = Diffusivity{physical.c_v.x * s.t.scale / (s.x.scale * s.x.scale),
                         physical.c_v.z * s.t.scale / (s.z.scale * s.z.scale)};
  unit.q = physical.q / s.u.scale;
  for (BoundaryCondition& bc : unit.bcs) {
    if (bc.kind == BcKind::dirichlet) {
      bc.value /= s.u.scale;
    } else {
      const bool horizontal = bc.edge == Edge::top || bc.edge == Edge::bottom;
      bc.value *= (horizontal ? s.z.scale : s.x.scale) / s.u.scale;
    }
  }
  return {unit, s};
}

std::vector<Point> sample_interior(const ConsolidationProblem& problem, std::size_t n, Rng& rng) {
  const Rectangle& g = problem.geometry;
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(g.x_min, g.x_max);
    const double z = rng.uniform(g.z_min, g.z_max);
    const double t = rng.uniform(problem.time.t0, problem.time.t1);
    pts.push_back({x, z, t});
  }
  return pts;
}

std::vector<BoundarySample> sample_boundary(const ConsolidationProblem& problem, std::size_t n, Rng& rng) {
  const Rectangle& g = problem.geometry;
  const double w = g.width();
  const double h = g.thickness();
  const double perimeter = 2.0 * (w + h);
  std::vector<BoundarySample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = rng.uniform(0.0, perimeter);
    const double t = rng.uniform(problem.time.t0, problem.time.t1);
    Point p{0.0, 0.0, t};
    Edge e;
    if (s < w) {
      e = Edge::top;
      p.x = g.x_min + s;
      p.z = g.z_min;
    } else if ((s -= w) < w) {
      e = Edge::bottom;
      p.x = g.x_min + s;
      p.z = g.z_max;
    } else if ((s -= w) < h) {
      e = Edge::left;
      p.x = g.x_min;
      p.z = g.z_min + s;
    } else {
      s -= h;
      e = Edge::right;
      p.x = g.x_max;
      p.z = g.z_min + std::min(s, h);
    }
    p.x = std::min(std::max(p.x, g.x_min), g.x_max);
    p.z = std::min(std::max(p.z, g.z_min), g.z_max);
    out.push_back({p, problem.bc(e)});
  }
  return out;
}

std::vector<Point> sample_initial(const ConsolidationProblem& problem, std::size_t n, Rng& rng) {
  const Rectangle& g = problem.geometry;
  std::vector<Point> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(g.x_min, g.x_max);
    const double z = rng.uniform(g.z_min, g.z_max);
    pts.push_back({x, z, problem.time.t0});
  }
  return pts;
}

ChannelSet boundary_channels(const ConsolidationProblem& problem) {
  ChannelSet set;
  for (const BoundaryCondition& bc : problem.bcs) {
    if (bc.kind != BcKind::neumann) continue;
    set.add(bc.edge == Edge::top || bc.edge == Edge::bottom ? Channel::d_z : Channel::d_x);
  }
  return set;
}

}  // namespace consol
