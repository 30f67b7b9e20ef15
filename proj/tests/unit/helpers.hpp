#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "consol/network_params.hpp"

namespace testing {

/// Plain-loop evaluation of a tanh MLP from the flat parameter layout.
/// Independent of the library's batched path.
inline double reference_forward(const std::vector<int>& sizes, const std::vector<double>& flat, double x,
                                double z, double t) {
  std::vector<double> a = {x, z, t};
  std::size_t off = 0;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int n_in = sizes[l];
    const int n_out = sizes[l + 1];
    std::vector<double> out(static_cast<std::size_t>(n_out));
    for (int o = 0; o < n_out; ++o) {
      double s = flat[off + static_cast<std::size_t>(n_in * n_out + o)];
      for (int i = 0; i < n_in; ++i) s += flat[off + static_cast<std::size_t>(o * n_in + i)] * a[i];
      out[o] = (l + 2 < sizes.size()) ? std::tanh(s) : s;
    }
    off += static_cast<std::size_t>(n_in * n_out + n_out);
    a = std::move(out);
  }
  return a[0];
}

/// Random parameters (including biases) for derivative checks.
inline consol::NetworkParams random_params(const std::vector<int>& sizes, std::uint64_t seed, double scale = 1.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(-scale, scale);
  std::vector<double> flat(consol::parameter_count_for(sizes));
  for (double& v : flat) v = d(gen);
  return consol::NetworkParams(sizes, flat);
}

inline std::vector<double> to_vector(std::span<const double> s) { return {s.begin(), s.end()}; }

inline bool rel_close(double a, double b, double rel, double abs_floor = 0.0) {
  return std::abs(a - b) <= std::max(rel * std::abs(b), abs_floor);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("consol_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace testing
