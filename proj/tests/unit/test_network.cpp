#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"

#include "consol/network.hpp"
#include "consol/network_params.hpp"

using namespace consol;

TEST_CASE("layer sizes and parameter layout") {
  const std::vector<int> sizes = mlp_layer_sizes(5, 32);
  CHECK(sizes == std::vector<int>{3, 32, 32, 32, 32, 32, 1});
  CHECK(parameter_count_for(sizes) == 3 * 32 + 32 + 4 * (32 * 32 + 32) + 32 + 1);

  const NetworkParams p(sizes);
  CHECK(p.layer_count() == 6);
  CHECK(p.parameter_count() == 4385);
  CHECK(p.bias_offset(0) == 96);
  CHECK(p.weight_offset(1) == 128);

  CHECK_THROWS_AS(NetworkParams({2, 4, 1}), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParams({3, 4, 2}), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParams({3, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParams({3}), std::invalid_argument);
  CHECK_THROWS_AS(NetworkParams({3, 1}, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("init_glorot") {
  const std::vector<int> sizes = mlp_layer_sizes(5, 32);
  const NetworkParams a = init_glorot(sizes, 42);
  const NetworkParams b = init_glorot(sizes, 42);
  CHECK(a == b);
  CHECK_FALSE(a == init_glorot(sizes, 43));

  for (std::size_t l = 0; l < a.layer_count(); ++l) {
    CHECK(a.biases(l).isZero(0.0));
    const double limit = std::sqrt(6.0 / (a.fan_in(l) + a.fan_out(l)));
    CHECK(a.weights(l).cwiseAbs().maxCoeff() <= limit);
  }

  // 32 x 32 layer: standard deviation of the uniform law on [-L, L] is L / sqrt(3).
  const auto w = a.weights(2);
  const double mean = w.mean();
  const double sd = std::sqrt((w.array() - mean).square().sum() / (w.size() - 1));
  CHECK(std::abs(sd - std::sqrt(2.0 / 64)) < 0.15 * std::sqrt(2.0 / 64));

  CHECK_THROWS_AS(init_glorot({3, 5}, 1), std::invalid_argument);
}

TEST_CASE("forward") {
  NetworkParams p(mlp_layer_sizes(5, 32));
  p.biases(5)(0) = 1.25;
  CHECK(forward(p, {0.3, 0.1, 0.9}) == 1.25);
  CHECK(forward(p, {-1, 1, 0}) == 1.25);

  const Jet flat = forward_jet(p, {0.3, 0.1, 0.9});
  for (Channel c : kAllChannels) {
    if (c != Channel::val) CHECK(flat[c] == 0.0);
  }

  const NetworkParams r = testing::random_params(mlp_layer_sizes(5, 32), 11, 0.5);
  const std::vector<double> flat_r = testing::to_vector(r.flat());
  const std::vector<Point> pts = {{0.3, 0.4, 0.5}, {-0.9, 0.05, 0.95}, {0.0, 1.0, 0.0}};
  const std::vector<double> batch = evaluate(r, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Point& pt = pts[i];
    CHECK(forward(r, pt) == forward_jet(r, pt).val);
    CHECK(forward(r, pt) == forward(r, pt));
    const double ref = testing::reference_forward(r.layer_sizes(), flat_r, pt.x, pt.z, pt.t);
    CHECK(std::abs(forward(r, pt) - ref) < 1e-13);
    CHECK(std::abs(batch[i] - ref) < 1e-13);
  }
}

TEST_CASE("forward_jet on a one-unit network") {
  NetworkParams p({3, 1, 1});
  p.weights(0)(0, 0) = 1.0;
  p.weights(1)(0, 0) = 1.0;
  const Jet j = forward_jet(p, {0.5, 0.0, 0.0});
  CHECK(std::abs(j.val - 0.462117) < 1e-5);
  CHECK(std::abs(j.d_x - 0.786448) < 1e-5);
  CHECK(std::abs(j.d_xx - -0.726869) < 1e-5);
  CHECK(j.d_z == 0.0);
  CHECK(j.d_zz == 0.0);
}

TEST_CASE("forward_jet derivatives match central differences") {
  const std::vector<int> sizes = mlp_layer_sizes(5, 32);
  for (std::uint64_t seed = 100; seed < 105; ++seed) {
    const NetworkParams p = init_glorot(sizes, seed);
    const std::vector<double> flat = testing::to_vector(p.flat());
    const auto f = [&](double x, double z, double t) { return testing::reference_forward(sizes, flat, x, z, t); };
    const double x = 0.37, z = 0.61, t = 0.44, e = 1e-4;
    const Jet j = forward_jet(p, {x, z, t});
    CHECK(testing::rel_close(j.d_x, (f(x + e, z, t) - f(x - e, z, t)) / (2 * e), 1e-6));
    CHECK(testing::rel_close(j.d_z, (f(x, z + e, t) - f(x, z - e, t)) / (2 * e), 1e-6));
    CHECK(testing::rel_close(j.d_t, (f(x, z, t + e) - f(x, z, t - e)) / (2 * e), 1e-6));
    const double f0 = f(x, z, t);
    CHECK(testing::rel_close(j.d_xx, (f(x + e, z, t) - 2 * f0 + f(x - e, z, t)) / (e * e), 1e-5));
    CHECK(testing::rel_close(j.d_zz, (f(x, z + e, t) - 2 * f0 + f(x, z - e, t)) / (e * e), 1e-5));
  }
}

TEST_CASE("jets stay finite for extreme inputs") {
  const NetworkParams p = testing::random_params(mlp_layer_sizes(3, 16), 5, 3.0);
  for (double v : {-1e6, -50.0, 0.0, 50.0, 1e6}) {
    const Jet j = forward_jet(p, {v, -v, v});
    for (Channel c : kAllChannels) CHECK(std::isfinite(j[c]));
  }
}

TEST_CASE("Model applies the scaling") {
  const NetworkParams p = testing::random_params(mlp_layer_sizes(2, 4), 9);
  Model m{p, Scaling{{0.0, 182.5}, {0.0, 20.0}, {0.0, 1e7}, {0.0, 80.0}}};
  const Point phys{91.25, 5.0, 2.5e6};
  CHECK(m.predict(phys) == doctest::Approx(80.0 * forward(p, {0.5, 0.25, 0.25})).epsilon(1e-14));
  const Point pts[] = {phys};
  CHECK(m.predict(pts)[0] == m.predict(phys));
}
