#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "consol/jet.hpp"
#include "consol/jet_batch.hpp"
#include "consol/network_params.hpp"

namespace consol {

/// Glorot-uniform weights on [-L, L], L = sqrt(6 / (n_in + n_out)), zero
/// biases. The same seed always produces the same parameters.
NetworkParams init_glorot(const std::vector<int>& layer_sizes, std::uint64_t seed);

/// Network output at one point. Runs the jet path and keeps the value, so it
/// agrees bit-for-bit with forward_jet(...).val.
double forward(const NetworkParams& params, const Point& point);

/// Output jet at one point (all channels).
Jet forward_jet(const NetworkParams& params, const Point& point);

/// Output values for many points at once (value channel only).
std::vector<double> evaluate(const NetworkParams& params, std::span<const Point> points);

/// Affine change of variable: physical = offset + scale * unit.
struct AxisMap {
  double offset = 0.0;
  double scale = 1.0;

  double to_unit(double physical) const { return (physical - offset) / scale; }
  double to_physical(double unit) const { return offset + scale * unit; }

  bool operator==(const AxisMap&) const = default;
};

/// Maps physical coordinates and pressure to the network's working units.
struct Scaling {
  AxisMap x;
  AxisMap z;
  AxisMap t;
  AxisMap u;

  bool is_identity() const { return *this == Scaling{}; }
  Point to_unit(const Point& p) const { return {x.to_unit(p.x), z.to_unit(p.z), t.to_unit(p.t)}; }

  bool operator==(const Scaling&) const = default;
};

inline constexpr const char* kActivationTanh = "tanh";

/// Trained network plus the transform between physical and network units.
/// `domain` records the physical geometry and time window it was trained on.
struct Model {
  NetworkParams params;
  Scaling scaling;
  std::string activation = kActivationTanh;
  double x_min = 0.0, x_max = 0.0, z_min = 0.0, z_max = 0.0, t0 = 0.0, t1 = 0.0;

  /// Pressure at physical points.
  std::vector<double> predict(std::span<const Point> physical) const;
  double predict(const Point& physical) const;
};

}  // namespace consol
