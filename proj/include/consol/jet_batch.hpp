#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "consol/jet.hpp"
#include "consol/network_params.hpp"
#include "consol/tape.hpp"

namespace consol {

/// A space-time location (x, z, t).
struct Point {
  double x = 0.0;
  double z = 0.0;
  double t = 0.0;

  bool operator==(const Point&) const = default;
};

/// Subset of jet channels to propagate. The value channel is always present,
/// and d_xx / d_zz pull in d_x / d_z because tanh's second-order rule needs
/// them.
class ChannelSet {
 public:
  ChannelSet() = default;
  ChannelSet(std::initializer_list<Channel> channels);

  static ChannelSet value_only() { return {}; }
  static ChannelSet full();

  ChannelSet& add(Channel c);
  bool contains(Channel c) const { return (bits_ >> static_cast<unsigned>(c)) & 1u; }
  std::size_t count() const;
  /// Position of `c` among the active channels; `c` must be active.
  std::size_t slot(Channel c) const;
  std::vector<Channel> channels() const;

  bool operator==(const ChannelSet&) const = default;

 private:
  std::uint8_t bits_ = 1u;
};

/// Jets of the network output for every point, propagating only the
/// requested channels. Inactive channels are zero in the result.
std::vector<Jet> propagate_jets(const NetworkParams& params, std::span<const Point> points,
                                ChannelSet channels);

/// Forward pass over a batch that keeps every intermediate needed to pull
/// cotangents of the output jets back to the parameters.
///
/// Storage layout: every per-layer matrix has one row per unit and
/// `channels.count() * points` columns, one contiguous block of columns per
/// active channel in canonical channel order.
class JetTrace {
 public:
  JetTrace(const NetworkParams& params, std::span<const Point> points, ChannelSet channels);

  std::size_t size() const { return n_points_; }
  const ChannelSet& channels() const { return channels_; }

  /// Output jets (one per point).
  std::vector<Jet> outputs() const;

  /// Accumulates into `grad` the parameter gradient of sum_i <cotangent_i,
  /// output_i>, where each cotangent holds d(loss)/d(channel) per channel.
  void backward(std::span<const Jet> cotangents, ParamGradient& grad) const;

 private:
  const NetworkParams* params_;
  ChannelSet channels_;
  std::size_t n_points_;
  // inputs_[l]: layer l input; pre_[l]: layer l pre-activation;
  // act_[l]: tanh of the value block of pre_[l] (hidden layers only).
  std::vector<Eigen::MatrixXd> inputs_;
  std::vector<Eigen::MatrixXd> pre_;
  std::vector<Eigen::ArrayXXd> act_;
};

/// A set of points whose output jets enter a loss, with the channels that
/// loss reads.
struct JetBatchRequest {
  std::span<const Point> points;
  ChannelSet channels;
};

/// Builds a scalar loss on `tape` from the output jets of each requested
/// batch (same order as the requests). Channels a request did not ask for
/// arrive as constant zero.
using LossBuilder = std::function<Var(Tape& tape, std::span<const std::vector<JetVar>> jets)>;

struct GradientResult {
  double loss = 0.0;
  ParamGradient grad;
};

/// Loss value and its exact gradient with respect to every parameter: the
/// jets are propagated forward through the network, the loss head is
/// recorded on a scalar tape and reversed, and the resulting jet cotangents
/// are pulled back layer by layer.
GradientResult param_gradient(const NetworkParams& params, std::span<const JetBatchRequest> batches,
                              const LossBuilder& loss);

/// Loss value only (same forward path as param_gradient).
double evaluate_loss(const NetworkParams& params, std::span<const JetBatchRequest> batches,
                     const LossBuilder& loss);

}  // namespace consol
