#include "consol/network_params.hpp"

#include <stdexcept>
#include <string>
#include <utility>

namespace consol {

void validate_layer_sizes(std::span<const int> layer_sizes) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("layer_sizes: need at least 2 entries");
  if (layer_sizes.front() != 3) throw std::invalid_argument("layer_sizes: first entry must be 3");
  if (layer_sizes.back() != 1) throw std::invalid_argument("layer_sizes: last entry must be 1");
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    if (layer_sizes[i] <= 0) {
      throw std::invalid_argument("layer_sizes[" + std::to_string(i) + "] must be positive");
    }
  }
}

std::size_t parameter_count_for(std::span<const int> layer_sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const auto in = static_cast<std::size_t>(layer_sizes[l]);
    const auto out = static_cast<std::size_t>(layer_sizes[l + 1]);
    n += in * out + out;
  }
  return n;
}

std::vector<int> mlp_layer_sizes(int hidden_layers, int width) {
  if (hidden_layers < 0) throw std::invalid_argument("hidden_layers must be >= 0");
  if (width <= 0) throw std::invalid_argument("width must be positive");
  std::vector<int> sizes{3};
  for (int i = 0; i < hidden_layers; ++i) sizes.push_back(width);
  sizes.push_back(1);
  return sizes;
}

namespace {

std::vector<double> zeros_for(std::span<const int> layer_sizes) {
  validate_layer_sizes(layer_sizes);
  return std::vector<double>(parameter_count_for(layer_sizes), 0.0);
}

}  // namespace

NetworkParams::NetworkParams(std::vector<int> layer_sizes)
    : NetworkParams(layer_sizes, zeros_for(layer_sizes)) {}

NetworkParams::NetworkParams(std::vector<int> layer_sizes, std::vector<double> flat)
    : layer_sizes_(std::move(layer_sizes)), flat_(flat.begin(), flat.end()) {
  validate_layer_sizes(layer_sizes_);
  const std::size_t expected = parameter_count_for(layer_sizes_);
  if (flat_.size() != expected) {
    throw std::invalid_argument("parameter vector has " + std::to_string(flat_.size()) +
                                " entries, layer sizes require " + std::to_string(expected));
  }
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layer_count(); ++l) {
    offsets_.push_back(offset);
    offset += static_cast<std::size_t>(fan_in(l) * fan_out(l) + fan_out(l));
  }
}

Eigen::Map<const RowMatrix> NetworkParams::weights(std::size_t layer) const {
  return {flat_.data() + weight_offset(layer), fan_out(layer), fan_in(layer)};
}

Eigen::Map<RowMatrix> NetworkParams::weights(std::size_t layer) {
  return {flat_.data() + weight_offset(layer), fan_out(layer), fan_in(layer)};
}

Eigen::Map<const Eigen::VectorXd> NetworkParams::biases(std::size_t layer) const {
  return {flat_.data() + bias_offset(layer), fan_out(layer)};
}

Eigen::Map<Eigen::VectorXd> NetworkParams::biases(std::size_t layer) {
  return {flat_.data() + bias_offset(layer), fan_out(layer)};
}

}  // namespace consol
