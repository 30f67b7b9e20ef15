#include <cmath>

#include "doctest.h"
#include "helpers.hpp"

#include "consol/config.hpp"
#include "consol/io.hpp"
#include "consol/network.hpp"
#include "consol/oracles.hpp"

using namespace consol;
using nlohmann::json;

namespace {

const std::filesystem::path kConfigs = std::filesystem::path(CONSOL_SOURCE_DIR) / "configs";

json minimal() {
  return json{{"problem",
               {{"x_min", -1}, {"x_max", 1}, {"z_min", 0}, {"z_max", 1}, {"t1", 1}, {"c_v", 0.01}, {"q", 5}}}};
}

std::string error_path(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<accepted>";
}

}  // namespace

TEST_CASE("shipped problem configs") {
  const RunConfig p1 = load_config(kConfigs / "problem1.json");
  CHECK(p1.problem.geometry == Rectangle{-1, 1, 0, 1});
  CHECK(p1.problem.c_v == 0.01);
  CHECK(p1.problem.q == 5.0);
  CHECK(p1.training.epochs == 10000);
  CHECK(p1.layer_sizes() == mlp_layer_sizes(5, 32));
  const ConsolidationProblem prob = p1.to_problem();
  CHECK(prob.bc(Edge::bottom).kind == BcKind::neumann);
  CHECK(p1.evaluation.snapshot_times == std::vector<double>{0.05, 0.2, 0.5, 1.0});

  const RunConfig p2 = load_config(kConfigs / "problem2.json");
  CHECK(p2.problem.geometry == Rectangle{-1, 1, 0, 2});
  CHECK(p2.to_problem().bc(Edge::bottom).kind == BcKind::dirichlet);
}

TEST_CASE("config defaults") {
  json doc = minimal();
  doc["training"] = json::object();
  const RunConfig c = parse_config(doc);
  CHECK(c.training.learning_rate == 1e-3);
  CHECK(c.training.seed == 42);
  CHECK(c.training.n_interior == 1000);
  CHECK(c.training.n_boundary == 100);
  CHECK(c.training.n_initial == 100);
  CHECK(c.training.n_test == 1000);
  CHECK(c.problem.time.t0 == 0.0);
  CHECK(c.problem.drainage == DrainageMode::top);
  CHECK(c.problem.lateral_drained);
  CHECK(c.network.hidden_layers == 5);
  CHECK(c.network.width == 32);
  CHECK(c.evaluation.snapshot_times == std::vector<double>{0.05, 0.2, 0.5, 1.0});
}

TEST_CASE("config errors name the field") {
  json doc = minimal();
  doc["problem"]["c_v"] = -1;
  CHECK(error_path(doc) == "problem.c_v");

  doc = minimal();
  doc["problem"].erase("q");
  CHECK(error_path(doc) == "problem.q");

  doc = minimal();
  doc["training"] = {{"epochs", 0}};
  CHECK(error_path(doc) == "training.epochs");

  doc = minimal();
  doc["training"] = {{"learning_rate", "fast"}};
  CHECK(error_path(doc) == "training.learning_rate");

  doc = minimal();
  doc["problem"]["colour"] = "red";
  CHECK(error_path(doc) == "problem.colour");

  doc = minimal();
  doc["evaluation"] = {{"snapshot_times", {0.5, 2.0}}};
  CHECK(error_path(doc) == "evaluation.snapshot_times[1]");

  doc = minimal();
  doc["problem"]["drainage_mode"] = "bottom";
  CHECK(error_path(doc) == "problem.drainage_mode");

  doc = minimal();
  doc["network"] = {{"activation", "relu"}};
  CHECK(error_path(doc) == "network.activation");

  CHECK_THROWS_AS(parse_config_text("{ not json"), ConfigError);
}

TEST_CASE("config round trip") {
  const RunConfig a = load_config(kConfigs / "problem2.json");
  const RunConfig b = parse_config(to_json(a));
  CHECK(to_json(a) == to_json(b));
  CHECK(b.problem.geometry == a.problem.geometry);
  CHECK(b.training.seed == a.training.seed);
}

TEST_CASE("case-study config") {
  const CaseStudyConfig c = load_case_config(kConfigs / "tianjin.json");
  REQUIRE(c.layers.size() == 3);
  CHECK(c.layers[0].c_v == 2.25e-3);
  CHECK(c.layers[1].c_v == 2.59e-3);
  CHECK(c.layers[2].c_v == 2.68e-3);
  CHECK(c.total_thickness() == 20.0);
  CHECK(c.u0 == 80.0);
  CHECK(c.half_width == 182.5);
  CHECK(c.duration == 1e7);
  CHECK(c.training.epochs == 50000);
  CHECK(c.training.n_interior == 1000);
  CHECK(c.training.n_boundary == 1000);
  CHECK(c.training.n_initial == 1000);
  const ConsolidationProblem p = c.layer_problem(1);
  CHECK(p.geometry == Rectangle{-182.5, 182.5, 0, 20});
  CHECK(p.c_v.z == 2.59e-3);
  CHECK(p.q == 80.0);
  CHECK(to_json(parse_case_config(to_json(c))) == to_json(c));

  json doc = to_json(c);
  doc["layers"][1]["depth_range"] = {9.0, 17.0};
  CHECK_THROWS_AS(parse_case_config(doc), ConfigError);
  doc = to_json(c);
  doc["u0"] = 0;
  CHECK_THROWS_AS(parse_case_config(doc), ConfigError);
  doc = to_json(c);
  doc["layers"][2]["thickness"] = -4;
  CHECK_THROWS_AS(parse_case_config(doc), ConfigError);
  doc = to_json(c);
  doc.erase("layers");
  CHECK_THROWS_AS(parse_case_config(doc), ConfigError);
}

TEST_CASE("format_double round trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) CHECK(std::stod(format_double(v)) == v);
  CHECK(format_double(std::nan("")) == "nan");
}

TEST_CASE("model document round trip") {
  const NetworkParams p = testing::random_params(mlp_layer_sizes(5, 32), 21);
  const Model m{p, Scaling{{0, 182.5}, {0, 20}, {0, 1e7}, {0, 80}}, kActivationTanh, -182.5, 182.5, 0, 20, 0, 1e7};
  const auto dir = testing::scratch_dir("model");
  write_model(dir / "m.json", m);
  const Model r = read_model(dir / "m.json");
  CHECK(r.params == m.params);
  CHECK(r.scaling == m.scaling);
  CHECK(r.z_max == 20.0);
  CHECK(r.t1 == 1e7);
  const Point pt{10.0, 3.0, 5e5};
  CHECK(r.predict(pt) == m.predict(pt));

  json doc = model_to_json(m);
  doc["parameters"].erase(0);
  CHECK_THROWS_AS(model_from_json(doc), std::invalid_argument);
  doc = model_to_json(m);
  doc["format"] = "something-else";
  CHECK_THROWS_AS(model_from_json(doc), std::invalid_argument);
  CHECK_THROWS_AS(read_model(dir / "missing.json"), IoError);
}

TEST_CASE("grid and history tables round trip") {
  FieldGrid g{uniform_axis(-1, 1, 4), uniform_axis(0, 1, 3), 0.2, Eigen::MatrixXd(3, 4)};
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 4; ++i) g.u(j, i) = std::sin(0.3 * i + 1.7 * j) / 3.0;
  const std::string text = grid_csv(g);
  CHECK(text.rfind("x,z,t,u\n-1,0,0.2,", 0) == 0);
  const FieldGrid back = parse_grid_csv(text);
  CHECK(back.x == g.x);
  CHECK(back.z == g.z);
  CHECK(back.t == g.t);
  CHECK(back.u == g.u);
  CHECK_THROWS_AS(parse_grid_csv("x,z,u\n"), std::invalid_argument);

  TrainHistory h;
  h.records.push_back({0, {1.0 / 3, 0.25, 7.0, 7.5833}, 0.9});
  h.records.push_back({100, {1e-5, 2e-6, 3e-7, 1.23e-5}, std::nan("")});
  const std::string ht = history_csv(h);
  CHECK(ht.rfind("epoch,mse_f,mse_b,mse_u,total,test_metric\n", 0) == 0);
  const TrainHistory hb = parse_history_csv(ht);
  REQUIRE(hb.records.size() == 2);
  CHECK(hb.records[0].loss.mse_f == 1.0 / 3);
  CHECK(hb.records[1].epoch == 100);
  CHECK(std::isnan(hb.records[1].test_metric));
}
