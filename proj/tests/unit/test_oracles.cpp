#include <cmath>

#include "doctest.h"

#include "consol/oracles.hpp"
#include "consol/problem.hpp"

using namespace consol;

namespace {

const ConsolidationProblem kTop = make_top_drained(1, 1, 0.01, 5, 1);
const ConsolidationProblem kDouble = make_double_drained(1, 1, 0.01, 5, 1);

}  // namespace

TEST_CASE("uniform_axis") {
  const std::vector<double> a = uniform_axis(-1, 1, 5);
  CHECK(a == std::vector<double>{-1, -0.5, 0, 0.5, 1});
  CHECK(uniform_axis(0, 20, 81).back() == 20.0);
  CHECK_THROWS_AS(uniform_axis(0, 1, 1), std::invalid_argument);
}

TEST_CASE("series_solution boundary values and decay") {
  for (double t : {0.0, 0.1, 0.7}) {
    for (double z : {0.0, 0.3, 1.0}) {
      CHECK(series_solution(kTop, {1.0, z, t}) == 0.0);
      CHECK(series_solution(kTop, {-1.0, z, t}) == 0.0);
      CHECK(series_solution(kDouble, {1.0, 2 * z, t}) == 0.0);
    }
    CHECK(series_solution(kTop, {0.4, 0.0, t}) == 0.0);
    CHECK(series_solution(kDouble, {0.4, 2.0, t}) == 0.0);
  }
  CHECK(std::abs(series_solution(kTop, {0.0, 1.0, 1000.0})) < 1e-9 * kTop.q);
  CHECK(std::abs(series_solution(kTop, {0.0, 1.0, 0.0}) - 5.0) < 0.01 * 5.0);
  // Symmetric about the centre line and about mid-depth for double drainage.
  CHECK(series_solution(kTop, {0.3, 0.4, 0.2}) == doctest::Approx(series_solution(kTop, {-0.3, 0.4, 0.2})));
  CHECK(series_solution(kDouble, {0.3, 0.4, 0.2}) == doctest::Approx(series_solution(kDouble, {0.3, 1.6, 0.2})));
}

TEST_CASE("series_solution truncation convergence at the base centre") {
  double previous = 0;
  for (int n : {49, 99, 199, 399}) {
    const double u = series_solution(kTop, {0.0, 1.0, 0.0}, {n});
    if (n > 49) CHECK(std::abs(u - 5.0) <= std::abs(previous - 5.0) + 1e-12);
    previous = u;
  }
}

TEST_CASE("series_solution depends on c_v t only") {
  ConsolidationProblem doubled = kTop;
  doubled.c_v = {0.02, 0.02};
  for (const Point& p : {Point{0.2, 0.5, 0.8}, Point{-0.7, 0.9, 0.3}, Point{0.05, 0.1, 1.0}}) {
    const double a = series_solution(kTop, p);
    const double b = series_solution(doubled, {p.x, p.z, p.t / 2});
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  }
}

TEST_CASE("series_solution rejects what it cannot represent") {
  CHECK_THROWS_AS(series_solution(kTop, {1.5, 0.5, 0.1}), std::invalid_argument);
  CHECK_THROWS_AS(series_solution(kTop, {0, 0.5, -0.1}), std::invalid_argument);
  CHECK_THROWS_AS(series_solution(kTop, {0, 0.5, 0.1}, {10}), std::invalid_argument);
  const ConsolidationProblem closed =
      make_problem({-1, 1, 0, 1}, {0, 1}, {0.01, 0.01}, 5, DrainageMode::top, false);
  CHECK_FALSE(series_applicable(closed));
  CHECK(series_applicable(kTop));
  CHECK_THROWS_AS(series_solution(closed, {0, 0.5, 0.1}), std::invalid_argument);
}

TEST_CASE("fd_solve with zero load stays zero") {
  ConsolidationProblem p = kTop;
  p.q = 0;
  const double times[] = {0.1, 0.5};
  for (const FieldGrid& g : fd_solve(p, 21, 11, times)) CHECK(g.u.isZero(0.0));
}

TEST_CASE("fd_solve physics on the validation problems") {
  const double times[] = {0.05, 0.2, 0.5, 1.0};
  for (const ConsolidationProblem* p : {&kTop, &kDouble}) {
    const std::vector<FieldGrid> grids = fd_solve(*p, 201, 101, times);
    REQUIRE(grids.size() == 4);
    double prev_mean = p->q;
    for (std::size_t k = 0; k < grids.size(); ++k) {
      const FieldGrid& g = grids[k];
      CHECK(g.t == times[k]);
      CHECK(g.u.rows() == 101);
      CHECK(g.u.cols() == 201);
      CHECK(g.u.minCoeff() >= 0.0);
      CHECK(g.u.maxCoeff() <= p->q);
      CHECK(g.u.row(0).cwiseAbs().maxCoeff() < 1e-9 * p->q);
      CHECK(g.u.col(0).cwiseAbs().maxCoeff() < 1e-9 * p->q);
      CHECK(g.u.col(200).cwiseAbs().maxCoeff() < 1e-9 * p->q);
      if (p->bc(Edge::bottom).kind == BcKind::dirichlet) {
        CHECK(g.u.row(100).cwiseAbs().maxCoeff() < 1e-9 * p->q);
      } else {
        const double dz = g.z[100] - g.z[99];
        const double slope = ((g.u.row(100) - g.u.row(99)) / dz).cwiseAbs().maxCoeff();
        CHECK(slope < 0.01 * p->q / p->geometry.thickness());
      }
      CHECK(g.mean() <= prev_mean + 1e-9 * p->q);
      prev_mean = g.mean();
    }
  }
}

TEST_CASE("fd_solve agrees with the series") {
  const double times[] = {0.1};
  const FieldGrid fd = fd_solve(kTop, 201, 101, times)[0];
  const FieldGrid series = series_grid(kTop, fd.x, fd.z, 0.1);
  CHECK((fd.u - series.u).cwiseAbs().maxCoeff() < 0.01 * kTop.q);
}

TEST_CASE("fd_solve input checks and stepping") {
  const double late[] = {2.0};
  CHECK_THROWS_AS(fd_solve(kTop, 21, 11, late), std::invalid_argument);
  const double unsorted[] = {0.5, 0.2};
  CHECK_THROWS_AS(fd_solve(kTop, 21, 11, unsorted), std::invalid_argument);
  CHECK_THROWS_AS(FdSolver(kTop, 2, 11), std::invalid_argument);

  FdSolver s(kTop, 21, 11);
  const double dx = 0.1, dz = 0.1;
  CHECK(s.time_step() == doctest::Approx(0.9 / (2 * 0.01 * (1 / (dx * dx) + 1 / (dz * dz)))));
  s.advance_to(0.33);
  CHECK(s.time() == 0.33);
  CHECK_THROWS_AS(s.advance_to(0.2), std::invalid_argument);
  const FieldGrid g = s.snapshot();
  CHECK(s.interpolate(g.x[7], g.z[4]) == g.u(4, 7));
  CHECK(s.interpolate(0.5 * (g.x[7] + g.x[8]), g.z[4]) == doctest::Approx(0.5 * (g.u(4, 7) + g.u(4, 8))));

  const Point pts[] = {{0.1, 0.5, 0.9}, {0.1, 0.5, 0.2}};
  const std::vector<double> v = fd_sample(kTop, 41, 21, pts);
  CHECK(v[0] < v[1]);
}

TEST_CASE("degree_of_consolidation") {
  FieldGrid g{{0, 1}, {0, 1}, 0.0, Eigen::MatrixXd::Constant(2, 2, 5.0)};
  CHECK(degree_of_consolidation(g, 5).raw == 0.0);
  g.u.setZero();
  CHECK(degree_of_consolidation(g, 5).raw == 1.0);
  g.u.setConstant(2.5);
  CHECK(degree_of_consolidation(g, 5).raw == 0.5);
  g.u.setConstant(6.0);
  CHECK(degree_of_consolidation(g, 5).clamped == 0.0);
  CHECK(degree_of_consolidation(g, 5).raw < 0.0);
  CHECK_THROWS_AS(degree_of_consolidation(g, 0), std::invalid_argument);
}
