#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "limitdyn/errors.hpp"
#include "limitdyn/examples.hpp"

using namespace ld;

TEST_CASE("toy data") {
  const ToyOracle t1 = toy1();
  CHECK(max_abs(t1.problem.a_mats[0] - from_rows(2, {0, 1, 1, -1})) == 0.0);
  CHECK(t1.problem.b(0) == 0.0);
  CHECK(max_abs(t1.problem.c - from_rows(2, {0, 0, 0, 1})) == 0.0);

  const ToyOracle t3 = toy3();
  CHECK(t3.problem.m == 15);
  CHECK(t3.problem.b(0) == 6.0);
  CHECK(t3.problem.b.tail(14).norm() == 0.0);
  CHECK(max_abs(t3.problem.a_mats[0] - SymMatrix::Identity(6, 6)) == 0.0);
  CHECK(max_abs(t3.anchor(2.0).z_bar_caller() -
                SymMatrix((Vec(6) << 6, 0, 0, 0, 0, -6).finished().asDiagonal())) < 1e-13);
}

TEST_CASE("closed-form limit maps") {
  CHECK(max_abs(toy1().oracle_psi({1, 1}, 1).z - from_rows(2, {2, -4.0 / 3, -4.0 / 3, 4.0 / 3})) <
        1e-15);
  CHECK(max_abs(toy1().oracle_psi({0, 1}, 1).z - from_rows(2, {2, 0, 0, 0})) < 1e-15);
  CHECK(max_abs(toy2().oracle_psi({0.4, 0, 1}, 2).z -
                SymMatrix(Eigen::Vector3d(-0.5, 0.5, 0).asDiagonal())) < 1e-15);
  CHECK_THROWS_AS(toy1().oracle_psi({-1, 1}, 1), AssumptionError);
  CHECK_THROWS_AS(toy2().h_bar({0, -1, 0}), AssumptionError);
  CHECK_THROWS_AS(toy3().oracle_psi({1, -0.1}, 1), AssumptionError);
  CHECK_THROWS_AS(toy3().h_bar({1}), AssumptionError);
  CHECK_THROWS_AS(toy_by_id(4), AssumptionError);
}

TEST_CASE("oracle parts split the limit") {
  for (int id = 1; id <= 3; ++id) {
    const ToyOracle t = toy_by_id(id);
    for (double s : {0.5, 2.0}) {
      const PsiTriple o = t.oracle_psi(t.default_params, s);
      CHECK(max_abs(o.z - (o.x - s * o.s)) < 1e-14);
      CHECK(apply_A(t.problem, o.x).norm() < 1e-13);
      CHECK(max_abs(project_rangeA_perp(t.problem, o.s)) < 1e-13);
    }
  }
}

TEST_CASE("engine reproduces the oracles on a parameter grid") {
  const double r2 = std::sqrt(2.0);
  std::vector<std::pair<int, std::vector<double>>> grid;
  for (double av : {0.0, 0.5, 1.0, 2.0})
    for (double b : {-1.0, 0.0, 0.5, 1.0, 3.0}) grid.push_back({1, {av, b}});
  for (double h12 : {-1.0, 1.0})
    for (double h22 : {0.0, 1.0, 2.0})
      for (double h23 : {-1.0, 0.0, 0.5, 2.0}) grid.push_back({2, {h12, h22, h23}});
  for (double h : {-2.0, -r2 - 1e-3, 0.0, 1.0, r2 - 1e-3, r2 + 1e-3, 2.0, 3.0})
    for (double e : {0.0, 1e-3, 0.2}) grid.push_back({3, {h, e}});
  for (double s : {0.5, 1.0, 3.0})
    for (const auto& [id, prm] : grid) {
      const ToyOracle t = toy_by_id(id);
      const PsiTriple o = t.oracle_psi(prm, s);
      const LimitMapResult r = limit_map_decoupled(t.anchor(s), t.h_bar(prm));
      const double scale = std::max(1.0, o.z.norm());
      CHECK((r.psi_z - o.z).norm() <= 1e-6 * scale);
      CHECK((r.psi_x - o.x).norm() <= 1e-6 * scale);
      CHECK((r.psi_s - o.s).norm() <= 1e-6 * scale);
    }
}

TEST_CASE("toy3 oracle jumps at eps = 0") {
  const ToyOracle t = toy3();
  for (double h : {0.0, 1.0, 1.4, 2.0, 3.0}) {
    const double gap = (t.oracle_psi({h, 1e-9}, 1).z - t.oracle_psi({h, 0}, 1).z).norm();
    CHECK(gap > 0.1);
    const double cont = (t.oracle_psi({h, 2e-3}, 1).z - t.oracle_psi({h, 1e-3}, 1).z).norm();
    CHECK(cont < 1e-3);
  }
  // continuous in h at fixed eps > 0, including across |h| = sqrt(2)
  const double r2 = std::sqrt(2.0);
  CHECK((t.oracle_psi({r2 + 1e-6, 0.1}, 1).z - t.oracle_psi({r2 - 1e-6, 0.1}, 1).z).norm() < 1e-5);
}

TEST_CASE("SDPA text") {
  const std::string s = to_sdpa(toy1().problem);
  CHECK(s == "1\n1\n2\n0\n0 1 2 2 1\n1 1 1 2 1\n1 1 2 2 -1\n");
}
