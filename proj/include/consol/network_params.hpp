#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace consol {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Storage for anything mapped as Eigen matrices. A fixed base alignment
/// keeps Eigen's loop peeling, and hence rounding, independent of where the
/// allocator happened to place the buffer.
using AlignedVector = std::vector<double, Eigen::aligned_allocator<double>>;

/// Weights and biases of a fully connected network with inputs (x, z, t)
/// and a single output.
///
/// Canonical flat layout: layers in order; for each layer the weight matrix
/// (n_out x n_in, row-major) followed by its n_out biases.
class NetworkParams {
 public:
  /// Zero-initialised parameters. Throws std::invalid_argument unless the
  /// sizes start at 3, end at 1 and are all positive.
  explicit NetworkParams(std::vector<int> layer_sizes);
  NetworkParams(std::vector<int> layer_sizes, std::vector<double> flat);

  const std::vector<int>& layer_sizes() const { return layer_sizes_; }
  /// Number of affine layers (one less than the number of sizes).
  std::size_t layer_count() const { return layer_sizes_.size() - 1; }
  std::size_t parameter_count() const { return flat_.size(); }

  int fan_in(std::size_t layer) const { return layer_sizes_[layer]; }
  int fan_out(std::size_t layer) const { return layer_sizes_[layer + 1]; }

  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const {
    return offsets_[layer] + static_cast<std::size_t>(fan_in(layer) * fan_out(layer));
  }

  Eigen::Map<const RowMatrix> weights(std::size_t layer) const;
  Eigen::Map<RowMatrix> weights(std::size_t layer);
  Eigen::Map<const Eigen::VectorXd> biases(std::size_t layer) const;
  Eigen::Map<Eigen::VectorXd> biases(std::size_t layer);

  std::span<const double> flat() const { return flat_; }
  std::span<double> flat() { return flat_; }

  bool operator==(const NetworkParams&) const = default;

 private:
  std::vector<int> layer_sizes_;
  std::vector<std::size_t> offsets_;
  AlignedVector flat_;
};

/// Sum over layers of n_in * n_out + n_out.
std::size_t parameter_count_for(std::span<const int> layer_sizes);

/// Throws std::invalid_argument describing the first violated constraint.
void validate_layer_sizes(std::span<const int> layer_sizes);

/// Sizes [3, width x hidden_layers, 1].
std::vector<int> mlp_layer_sizes(int hidden_layers, int width);

/// Flat vector of d(loss)/d(parameter), aligned with NetworkParams::flat().
using ParamGradient = AlignedVector;

}  // namespace consol
