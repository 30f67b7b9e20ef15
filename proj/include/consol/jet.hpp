#pragma once

#include <array>
#include <cstddef>
#include <span>

namespace consol {

/// Channels carried by a jet, in canonical storage order.
enum class Channel : std::size_t { val = 0, d_x, d_z, d_t, d_xx, d_zz };

inline constexpr std::size_t kChannelCount = 6;

inline constexpr std::array<Channel, kChannelCount> kAllChannels = {
    Channel::val, Channel::d_x, Channel::d_z, Channel::d_t, Channel::d_xx, Channel::d_zz};

/// Value of a scalar field together with its first partials in (x, z, t)
/// and its pure second partials in x and z. Mixed partials and d_tt are
/// never needed by the diffusion residual and are not carried.
///
/// The scalar type is a template parameter so the same residual code runs
/// on plain doubles and on tape variables.
template <class T>
struct BasicJet {
  T val{};
  T d_x{};
  T d_z{};
  T d_t{};
  T d_xx{};
  T d_zz{};

  T& operator[](Channel c) {
    switch (c) {
      case Channel::val: return val;
      case Channel::d_x: return d_x;
      case Channel::d_z: return d_z;
      case Channel::d_t: return d_t;
      case Channel::d_xx: return d_xx;
      case Channel::d_zz: return d_zz;
    }
    return val;
  }
  const T& operator[](Channel c) const { return const_cast<BasicJet&>(*this)[c]; }

  bool operator==(const BasicJet&) const = default;
};

using Jet = BasicJet<double>;

struct SeedJets {
  Jet x;
  Jet z;
  Jet t;
};

/// Seeds for the three network inputs: each carries a unit derivative in
/// its own direction.
SeedJets jet_from_input(double x, double z, double t);

/// Jet of a constant (all derivative channels zero).
inline Jet constant_jet(double value) { return Jet{.val = value}; }

/// sum_i weights[i] * inputs[i] + bias, channel-wise. The bias only enters
/// the value channel. Throws std::invalid_argument on a length mismatch.
Jet jet_affine(std::span<const double> weights, double bias, std::span<const Jet> inputs);

/// tanh applied through the chain rule up to second order.
Jet jet_tanh(const Jet& input);

}  // namespace consol
