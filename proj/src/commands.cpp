#include "consol/commands.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "consol/config.hpp"
#include "consol/io.hpp"
#include "consol/network.hpp"
#include "consol/oracles.hpp"
#include "consol/problem.hpp"
#include "consol/random.hpp"
#include "consol/training.hpp"

namespace consol {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kCaseHiddenLayers = 5;
constexpr int kCaseWidth = 32;

/// Runs `body`, translating the library's exception types into exit codes.
template <class F>
int guarded(std::ostream& log, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    log << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const TrainingDiverged& e) {
    log << "training aborted: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const std::invalid_argument& e) {
    log << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    log << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
}

// Fails early on an unwritable output directory rather than after training.
void prepare_output_dir(const fs::path& dir) {
  ensure_directory(dir);
  const fs::path probe = dir / ".write_probe";
  write_text_file(probe, "");
  std::error_code ec;
  fs::remove(probe, ec);
}

ConsolidationProblem problem_from(const RunConfig& cfg) {
  try {
    return cfg.to_problem();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("problem", e.what());
  }
}

ReferenceField reference_for(const ConsolidationProblem& problem, int nx, int nz) {
  if (series_applicable(problem)) {
    return [problem](std::span<const Point> pts) {
      std::vector<double> v;
      v.reserve(pts.size());
      for (const Point& p : pts) v.push_back(series_solution(problem, p));
      return v;
    };
  }
  return [problem, nx, nz](std::span<const Point> pts) { return fd_sample(problem, nx, nz, pts); };
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double relative_l2_or_nan(std::span<const double> predicted, std::span<const double> reference) {
  double norm = 0.0;
  for (double r : reference) norm += r * r;
  if (!(norm > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return relative_l2(predicted, reference);
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> flatten(const FieldGrid& g) {
  std::vector<double> v;
  v.reserve(static_cast<std::size_t>(g.u.size()));
  for (Eigen::Index j = 0; j < g.u.rows(); ++j) {
    for (Eigen::Index i = 0; i < g.u.cols(); ++i) v.push_back(g.u(j, i));
  }
  return v;
}

FieldGrid predict_grid(const Model& model, const std::vector<double>& x, const std::vector<double>& z, double t) {
  std::vector<Point> nodes;
  nodes.reserve(x.size() * z.size());
  for (double zj : z) {
    for (double xi : x) nodes.push_back({xi, zj, t});
  }
  const std::vector<double> u = model.predict(nodes);
  FieldGrid g{x, z, t, Eigen::MatrixXd(static_cast<Eigen::Index>(z.size()), static_cast<Eigen::Index>(x.size()))};
  for (std::size_t j = 0; j < z.size(); ++j) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      g.u(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = u[j * x.size() + i];
    }
  }
  return g;
}

std::vector<FieldGrid> oracle_grids(const ConsolidationProblem& problem, OracleMethod method, int nx, int nz,
                                    const std::vector<double>& times) {
  if (method == OracleMethod::fd) return fd_solve(problem, nx, nz, times);
  if (!series_applicable(problem)) {
    throw ConfigError("problem", "series oracle needs drained sides and surface with zero boundary data");
  }
  const Rectangle& g = problem.geometry;
  const std::vector<double> x = uniform_axis(g.x_min, g.x_max, nx);
  const std::vector<double> z = uniform_axis(g.z_min, g.z_max, nz);
  std::vector<FieldGrid> out;
  for (double t : times) out.push_back(series_grid(problem, x, z, t));
  return out;
}

std::string method_name(OracleMethod m) { return m == OracleMethod::fd ? "fd" : "series"; }

void log_record(std::ostream& log, const std::string& prefix, const HistoryRecord& r) {
  log << fmt::format("{}epoch {:>6}  total {:.4e}  (pde {:.3e}, bc {:.3e}, ic {:.3e})  test {:.4e}\n", prefix,
                     r.epoch, r.loss.total, r.loss.mse_f, r.loss.mse_b, r.loss.mse_u, r.test_metric);
  log.flush();
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

}  // namespace

std::optional<OracleMethod> parse_oracle_method(const std::string& name) {
  if (name == "fd") return OracleMethod::fd;
  if (name == "series") return OracleMethod::series;
  return std::nullopt;
}

int cmd_train(const fs::path& config_path, const fs::path& out_dir, std::optional<std::uint64_t> seed,
              std::ostream& log) {
  return guarded(log, [&] {
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.training.seed = *seed;
    const ConsolidationProblem problem = problem_from(cfg);
    prepare_output_dir(out_dir);

    const auto start = std::chrono::steady_clock::now();
    const TrainResult result =
        train(problem, init_glorot(cfg.layer_sizes(), cfg.training.seed), cfg.training,
              reference_for(problem, cfg.evaluation.grid_nx, cfg.evaluation.grid_nz),
              [&](const HistoryRecord& r) { log_record(log, "", r); });
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const Rectangle& g = problem.geometry;
    const Model model{result.params, Scaling{}, kActivationTanh, g.x_min, g.x_max, g.z_min, g.z_max,
                      problem.time.t0, problem.time.t1};
    write_model(out_dir / "model.json", model);
    write_text_file(out_dir / "history.csv", history_csv(result.history));
    const json summary{{"final_loss", to_json(result.final_loss)},
                       {"test_loss", to_json(result.test_loss)},
                       {"test_metric", number_or_null(result.test_metric)},
                       {"epochs", cfg.training.epochs},
                       {"seed", cfg.training.seed},
                       {"parameter_count", result.params.parameter_count()},
                       {"wall_time_s", wall}};
    write_text_file(out_dir / "summary.json", summary.dump(2) + "\n");
    log << fmt::format("final loss {:.4e}, test metric {:.4e}, {:.1f} s\n", result.final_loss.total,
                       result.test_metric, wall);
    return static_cast<int>(kExitOk);
  });
}

int cmd_oracle(const fs::path& config_path, OracleMethod method, const fs::path& out_dir, std::ostream& log) {
  return guarded(log, [&] {
    const RunConfig cfg = load_config(config_path);
    const ConsolidationProblem problem = problem_from(cfg);
    const std::vector<FieldGrid> grids =
        oracle_grids(problem, method, cfg.evaluation.grid_nx, cfg.evaluation.grid_nz, cfg.evaluation.snapshot_times);
    prepare_output_dir(out_dir);
    for (std::size_t k = 0; k < grids.size(); ++k) {
      const fs::path file = out_dir / fmt::format("{}_{:03}.csv", method_name(method), k);
      write_text_file(file, grid_csv(grids[k]));
      log << "wrote " << file.string() << " (t = " << format_double(grids[k].t) << ")\n";
    }
    return static_cast<int>(kExitOk);
  });
}

int cmd_compare(const fs::path& model_path, const fs::path& config_path, OracleMethod oracle,
                const fs::path& report_path, std::optional<std::uint64_t> seed, std::ostream& log) {
  return guarded(log, [&] {
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.training.seed = *seed;
    const ConsolidationProblem problem = problem_from(cfg);
    const Model model = read_model(model_path);

    const Rectangle& g = problem.geometry;
    if (!close(model.x_min, g.x_min) || !close(model.x_max, g.x_max) || !close(model.z_min, g.z_min) ||
        !close(model.z_max, g.z_max) || !close(model.t0, problem.time.t0) || !close(model.t1, problem.time.t1)) {
      throw ConfigError("problem", "model was trained on a different domain than the config describes");
    }

    Rng rng = make_rng(cfg.training.seed, RngStream::compare);
    const std::vector<Point> pts = sample_interior(problem, static_cast<std::size_t>(cfg.evaluation.n_test), rng);
    std::vector<double> reference;
    if (oracle == OracleMethod::fd) {
      reference = fd_sample(problem, cfg.evaluation.grid_nx, cfg.evaluation.grid_nz, pts);
    } else {
      if (!series_applicable(problem)) throw ConfigError("problem", "series oracle does not cover this problem");
      for (const Point& p : pts) reference.push_back(series_solution(problem, p));
    }
    const std::vector<double> predicted = model.predict(pts);

    const std::vector<FieldGrid> grids = oracle_grids(problem, oracle, cfg.evaluation.grid_nx,
                                                      cfg.evaluation.grid_nz, cfg.evaluation.snapshot_times);
    json snapshots = json::array();
    for (const FieldGrid& ref : grids) {
      const FieldGrid pred = predict_grid(model, ref.x, ref.z, ref.t);
      const std::vector<double> a = flatten(pred);
      const std::vector<double> b = flatten(ref);
      json entry{{"t", ref.t},
                 {"relative_l2", number_or_null(relative_l2_or_nan(a, b))},
                 {"max_abs_error", max_abs_diff(a, b)},
                 {"mean_model", pred.mean()},
                 {"mean_oracle", ref.mean()}};
      if (problem.q > 0.0) {
        entry["degree_of_consolidation_model"] = degree_of_consolidation(pred, problem.q).raw;
        entry["degree_of_consolidation_oracle"] = degree_of_consolidation(ref, problem.q).raw;
      }
      snapshots.push_back(entry);
    }

    const double rel = relative_l2_or_nan(predicted, reference);
    const json report{{"oracle", method_name(oracle)},
                      {"n_points", pts.size()},
                      {"seed", cfg.training.seed},
                      {"relative_l2", number_or_null(rel)},
                      {"max_abs_error", max_abs_diff(predicted, reference)},
                      {"snapshots", snapshots}};
    if (report_path.has_parent_path()) ensure_directory(report_path.parent_path());
    write_text_file(report_path, report.dump(2) + "\n");
    log << fmt::format("relative L2 vs {} oracle: {:.4e}\n", method_name(oracle), rel);
    return static_cast<int>(kExitOk);
  });
}

int cmd_case_study(const fs::path& config_path, const fs::path& out_dir, std::optional<std::uint64_t> seed,
                   std::ostream& log) {
  return guarded(log, [&] {
    CaseStudyConfig cfg = load_case_config(config_path);
    if (seed) cfg.training.seed = *seed;
    prepare_output_dir(out_dir);

    const double depth = cfg.total_thickness();
    const std::vector<double> x = uniform_axis(-cfg.half_width, cfg.half_width, cfg.grid_nx);
    const std::vector<double> z = uniform_axis(0.0, depth, cfg.grid_nz);
    const std::vector<int> sizes = mlp_layer_sizes(kCaseHiddenLayers, kCaseWidth);

    std::vector<std::vector<FieldGrid>> layer_grids;
    json layer_summaries = json::array();
    for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
      const CaseLayer& layer = cfg.layers[i];
      const ConsolidationProblem physical = cfg.layer_problem(i);
      const ScaledProblem scaled = rescale_to_unit(physical);
      log << fmt::format("layer {} (c_v = {}): working coefficients c_x = {:.6g}, c_z = {:.6g}\n", layer.name,
                         layer.c_v, scaled.unit.c_v.x, scaled.unit.c_v.z);

      TrainResult result = [&] {
        try {
          return train(scaled.unit, init_glorot(sizes, cfg.training.seed), cfg.training,
                       reference_for(scaled.unit, cfg.fd_nx, cfg.fd_nz),
                       [&](const HistoryRecord& r) { log_record(log, "[" + layer.name + "] ", r); });
        } catch (const TrainingDiverged& e) {
          throw TrainingDiverged(e.epoch(), e.term() + " in layer '" + layer.name + "'");
        }
      }();

      const Model model{result.params, scaled.scaling, kActivationTanh, -cfg.half_width, cfg.half_width, 0.0,
                        depth, 0.0, cfg.duration};
      const fs::path dir = out_dir / ("layer_" + layer.name);
      ensure_directory(dir);
      write_model(dir / "model.json", model);
      write_text_file(dir / "history.csv", history_csv(result.history));

      std::vector<FieldGrid> grids;
      for (std::size_t k = 0; k < cfg.snapshot_times.size(); ++k) {
        grids.push_back(predict_grid(model, x, z, cfg.snapshot_times[k]));
        write_text_file(dir / fmt::format("grid_{:03}.csv", k), grid_csv(grids.back()));
      }
      layer_grids.push_back(std::move(grids));

      // Finite-difference cross-check in working units.
      std::vector<double> unit_times;
      for (double t : cfg.snapshot_times) unit_times.push_back(scaled.scaling.t.to_unit(t));
      const std::vector<FieldGrid> fd = fd_solve(scaled.unit, cfg.fd_nx, cfg.fd_nz, unit_times);
      json checks = json::array();
      for (std::size_t k = 0; k < fd.size(); ++k) {
        std::vector<double> fx, fz;
        for (double v : fd[k].x) fx.push_back(scaled.scaling.x.to_physical(v));
        for (double v : fd[k].z) fz.push_back(scaled.scaling.z.to_physical(v));
        const std::vector<double> pred = flatten(predict_grid(model, fx, fz, cfg.snapshot_times[k]));
        std::vector<double> ref = flatten(fd[k]);
        for (double& v : ref) v = scaled.scaling.u.to_physical(v);
        checks.push_back({{"t", cfg.snapshot_times[k]},
                          {"relative_l2", number_or_null(relative_l2_or_nan(pred, ref))},
                          {"max_abs_error", max_abs_diff(pred, ref)}});
      }

      const json summary{{"name", layer.name},
                         {"c_v", layer.c_v},
                         {"working_c_v", {scaled.unit.c_v.x, scaled.unit.c_v.z}},
                         {"final_loss", to_json(result.final_loss)},
                         {"test_loss", to_json(result.test_loss)},
                         {"test_metric", number_or_null(result.test_metric)},
                         {"epochs", cfg.training.epochs},
                         {"seed", cfg.training.seed},
                         {"fd_check", checks}};
      write_text_file(dir / "summary.json", summary.dump(2) + "\n");
      layer_summaries.push_back(summary);
    }

    std::string table = "t,mean_u,max_u,degree_of_consolidation\n";
    for (std::size_t k = 0; k < cfg.snapshot_times.size(); ++k) {
      FieldGrid stitched{x, z, cfg.snapshot_times[k], Eigen::MatrixXd(cfg.grid_nz, cfg.grid_nx)};
      for (std::size_t j = 0; j < z.size(); ++j) {
        std::size_t owner = cfg.layers.size() - 1;
        for (std::size_t l = 0; l < cfg.layers.size(); ++l) {
          if (z[j] < cfg.layers[l].depth_bottom) {
            owner = l;
            break;
          }
        }
        stitched.u.row(static_cast<Eigen::Index>(j)) = layer_grids[owner][k].u.row(static_cast<Eigen::Index>(j));
      }
      write_text_file(out_dir / fmt::format("stitched_{:03}.csv", k), grid_csv(stitched));
      table += fmt::format("{},{},{},{}\n", format_double(stitched.t), format_double(stitched.mean()),
                           format_double(stitched.max()),
                           format_double(degree_of_consolidation(stitched, cfg.u0).raw));
    }
    write_text_file(out_dir / "dissipation.csv", table);
    write_text_file(out_dir / "case_summary.json",
                    json{{"config", to_json(cfg)}, {"layers", layer_summaries}}.dump(2) + "\n");
    log << "wrote case study to " << out_dir.string() << "\n";
    return static_cast<int>(kExitOk);
  });
}

}  // namespace consol
