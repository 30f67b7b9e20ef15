#include "consol/network.hpp"

#include <cmath>

#include "consol/random.hpp"

namespace consol {

NetworkParams init_glorot(const std::vector<int>& layer_sizes, std::uint64_t seed) {
  NetworkParams params(layer_sizes);
  Rng rng = make_rng(seed, RngStream::init);
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    const double limit = std::sqrt(6.0 / static_cast<double>(params.fan_in(l) + params.fan_out(l)));
    auto w = params.weights(l);
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = rng.uniform(-limit, limit);
    }
  }
  return params;
}

Jet forward_jet(const NetworkParams& params, const Point& point) {
  return propagate_jets(params, std::span<const Point>(&point, 1), ChannelSet::full()).front();
}

double forward(const NetworkParams& params, const Point& point) { return forward_jet(params, point).val; }

std::vector<double> evaluate(const NetworkParams& params, std::span<const Point> points) {
  const std::vector<Jet> jets = propagate_jets(params, points, ChannelSet::value_only());
  std::vector<double> out;
  out.reserve(jets.size());
  for (const Jet& j : jets) out.push_back(j.val);
  return out;
}

std::vector<double> Model::predict(std::span<const Point> physical) const {
  std::vector<Point> unit;
  unit.reserve(physical.size());
  for (const Point& p : physical) unit.push_back(scaling.to_unit(p));
  std::vector<double> u = evaluate(params, unit);
  for (double& v : u) v = scaling.u.to_physical(v);
  return u;
}

double Model::predict(const Point& physical) const {
  return predict(std::span<const Point>(&physical, 1)).front();
}

}  // namespace consol
