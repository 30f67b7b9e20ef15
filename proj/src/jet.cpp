#include "consol/jet.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace consol {

SeedJets jet_from_input(double x, double z, double t) {
  return SeedJets{
      .x = Jet{.val = x, .d_x = 1.0},
      .z = Jet{.val = z, .d_z = 1.0},
      .t = Jet{.val = t, .d_t = 1.0},
  };
}

Jet jet_affine(std::span<const double> weights, double bias, std::span<const Jet> inputs) {
  if (weights.size() != inputs.size()) {
    throw std::invalid_argument("jet_affine: " + std::to_string(weights.size()) +
                                " weights for " + std::to_string(inputs.size()) + " inputs");
  }
  Jet out;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double w = weights[i];
    const Jet& in = inputs[i];
    out.val += w * in.val;
    out.d_x += w * in.d_x;
    out.d_z += w * in.d_z;
    out.d_t += w * in.d_t;
    out.d_xx += w * in.d_xx;
    out.d_zz += w * in.d_zz;
  }
  out.val += bias;
  return out;
}

Jet jet_tanh(const Jet& input) {
  const double s = std::tanh(input.val);
  const double p = 1.0 - s * s;
  Jet out;
  out.val = s;
  out.d_x = p * input.d_x;
  out.d_z = p * input.d_z;
  out.d_t = p * input.d_t;
  out.d_xx = p * input.d_xx - 2.0 * s * p * input.d_x * input.d_x;
  out.d_zz = p * input.d_zz - 2.0 * s * p * input.d_z * input.d_z;
  return out;
}

}  // namespace consol
