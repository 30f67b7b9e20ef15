#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

#include "consol/jet.hpp"
#include "consol/jet_batch.hpp"
#include "consol/network.hpp"

using namespace consol;

TEST_CASE("jet_from_input seeds one unit derivative per coordinate") {
  const SeedJets zero = jet_from_input(0, 0, 0);
  CHECK(zero.x == Jet{.val = 0, .d_x = 1});

  const SeedJets s = jet_from_input(1.5, 0.2, 0.7);
  CHECK(s.z == Jet{.val = 0.2, .d_z = 1});
  CHECK(s.x == Jet{.val = 1.5, .d_x = 1});
  CHECK(s.t == Jet{.val = 0.7, .d_t = 1});
  CHECK(s.t.d_xx == 0.0);
  CHECK(s.t.d_zz == 0.0);
}

TEST_CASE("jet_affine") {
  const Jet in{.val = 3, .d_x = 0.5, .d_xx = 0.25};
  const double one[] = {1.0};
  CHECK(jet_affine(one, 0.0, std::span(&in, 1)) == in);

  const double two[] = {2.0};
  CHECK(jet_affine(two, 1.0, std::span(&in, 1)) == Jet{.val = 7, .d_x = 1.0, .d_xx = 0.5});

  const SeedJets s = jet_from_input(2, 5, 0);
  const Jet xz[] = {s.x, s.z};
  const double w[] = {1.0, 1.0};
  CHECK(jet_affine(w, 0.0, xz) == Jet{.val = 7, .d_x = 1, .d_z = 1});

  SUBCASE("length mismatch is rejected") {
    const double three[] = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS(jet_affine(three, 0.0, xz), std::invalid_argument);
  }

  SUBCASE("linear in the input jets") {
    const Jet j1{.val = 0.3, .d_x = -1.2, .d_z = 0.7, .d_t = 2.5, .d_xx = 0.01, .d_zz = -4.0};
    const Jet j2{.val = -2.0, .d_x = 0.4, .d_z = 1.1, .d_t = -0.3, .d_xx = 3.3, .d_zz = 0.2};
    const double a = 1.7, b = -0.6;
    const double wv[] = {0.9, -1.3};
    Jet mix;
    for (Channel c : kAllChannels) mix[c] = a * j1[c] + b * j2[c];
    const Jet in_mix[] = {mix, mix};
    const Jet in1[] = {j1, j1};
    const Jet in2[] = {j2, j2};
    const Jet left = jet_affine(wv, 0.0, in_mix);
    const Jet r1 = jet_affine(wv, 0.0, in1);
    const Jet r2 = jet_affine(wv, 0.0, in2);
    for (Channel c : kAllChannels) CHECK(std::abs(left[c] - (a * r1[c] + b * r2[c])) <= 1e-12);
  }
}

TEST_CASE("jet_tanh") {
  const Jet id = jet_tanh(Jet{.val = 0, .d_x = 1});
  CHECK(id == Jet{.val = 0, .d_x = 1});

  const Jet out = jet_tanh(Jet{.val = 1, .d_x = 2, .d_xx = 3});
  CHECK(std::abs(out.val - 0.761594) < 1e-5);
  CHECK(std::abs(out.d_x - 0.839949) < 1e-5);
  CHECK(std::abs(out.d_xx - -1.298878) < 1e-5);
  CHECK(out.d_z == 0.0);
  CHECK(out.d_t == 0.0);
  CHECK(out.d_zz == 0.0);

  SUBCASE("matches finite differences of tanh(g(x)) for g quadratic") {
    // g(x) = 1 + 2 (x - x0) + 1.5 (x - x0)^2 has the jet {1, 2, 3} at x0.
    const auto f = [](double h) { return std::tanh(1 + 2 * h + 1.5 * h * h); };
    const double h = 1e-4;
    CHECK(std::abs((f(h) - f(-h)) / (2 * h) - out.d_x) < 1e-7);
    CHECK(std::abs((f(h) - 2 * f(0) + f(-h)) / (h * h) - out.d_xx) < 1e-5);
  }

  const Jet c = jet_tanh(constant_jet(5.0));
  CHECK(c.val == std::tanh(5.0));
  for (Channel ch : kAllChannels) {
    if (ch != Channel::val) CHECK(c[ch] == 0.0);
  }
}

TEST_CASE("constant jets stay constant through a random network") {
  const NetworkParams p = testing::random_params(mlp_layer_sizes(3, 8), 7);
  std::vector<Jet> layer = {constant_jet(0.3), constant_jet(-0.2), constant_jet(0.9)};
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    std::vector<Jet> next;
    for (int o = 0; o < p.fan_out(l); ++o) {
      std::vector<double> row(static_cast<std::size_t>(p.fan_in(l)));
      for (int i = 0; i < p.fan_in(l); ++i) row[static_cast<std::size_t>(i)] = p.weights(l)(o, i);
      Jet z = jet_affine(row, p.biases(l)(o), layer);
      next.push_back(l + 1 < p.layer_count() ? jet_tanh(z) : z);
    }
    layer = std::move(next);
  }
  for (Channel ch : kAllChannels) {
    if (ch != Channel::val) CHECK(layer[0][ch] == 0.0);
  }
}

TEST_CASE("ChannelSet") {
  ChannelSet v = ChannelSet::value_only();
  CHECK(v.count() == 1);
  CHECK(v.contains(Channel::val));
  v.add(Channel::d_zz);
  CHECK(v.contains(Channel::d_z));
  CHECK(v.count() == 3);
  CHECK(v.slot(Channel::d_zz) == 2);
  CHECK(ChannelSet::full().count() == kChannelCount);
  CHECK(ChannelSet{Channel::d_t}.channels() == std::vector<Channel>{Channel::val, Channel::d_t});
}

TEST_CASE("batched jets agree with scalar jets for every channel subset") {
  const NetworkParams p = testing::random_params(mlp_layer_sizes(2, 6), 3);
  const std::vector<Point> pts = {{0.1, 0.2, 0.3}, {-0.7, 0.9, 0.05}, {0.5, 0.5, 1.0}};
  const ChannelSet sets[] = {ChannelSet::value_only(), ChannelSet::full(), ChannelSet{Channel::d_z},
                             ChannelSet{Channel::d_xx, Channel::d_t}};
  for (const ChannelSet& cs : sets) {
    const std::vector<Jet> batch = propagate_jets(p, pts, cs);
    const std::vector<Jet> traced = JetTrace(p, pts, cs).outputs();
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Jet scalar = forward_jet(p, pts[i]);
      for (Channel c : kAllChannels) {
        const double want = cs.contains(c) ? scalar[c] : 0.0;
        CHECK(std::abs(batch[i][c] - want) <= 1e-13 * std::max(1.0, std::abs(want)));
        CHECK(traced[i][c] == batch[i][c]);
      }
    }
  }
}
