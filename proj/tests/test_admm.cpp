#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "limitdyn/admm.hpp"
#include "limitdyn/examples.hpp"

using namespace ld;

TEST_CASE("exact KKT triples are fixed points") {
  for (int id = 1; id <= 3; ++id) {
    const ToyOracle t = toy_by_id(id);
    for (double s : {0.5, 1.0, 4.0}) {
      Iterate kkt{t.x_bar, recover_y(t.problem, t.s_bar), t.s_bar, s};
      const Iterate nx = three_step_admm_step(t.problem, kkt);
      CHECK(max_abs(nx.x - kkt.x) <= 1e-10);
      CHECK(max_abs(nx.s - kkt.s) <= 1e-10);
      const SymMatrix z = z_of(kkt);
      CHECK(max_abs(one_step_drs_step(t.problem, z, s) - z) <= 1e-10);
    }
  }
}

TEST_CASE("three-step and one-step recursions agree from matched starts") {
  std::mt19937_64 rng(31);
  for (int id = 1; id <= 3; ++id) {
    const ToyOracle t = toy_by_id(id);
    const double s = 1.3;
    SymMatrix z = t.anchor(s).z_bar_caller() + 0.3 * random_symmetric(t.problem.n, rng);
    Iterate it = iterate_from_z(t.problem, z, s);
    double worst = 0;
    for (int k = 0; k < 100; ++k) {
      it = three_step_admm_step(t.problem, it);
      z = one_step_drs_step(t.problem, z, s);
      worst = std::max(worst, max_abs(it.x - psd_project(z)));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("solver converges on the two-sided Slater example") {
  const ToyOracle t = toy2();
  Iterate start{SymMatrix::Zero(3, 3), Vec::Zero(2), SymMatrix::Zero(3, 3), 1.0};
  RunOptions opt;
  opt.max_iters = 2000;
  const TrajectoryRecord rec = run(t.problem, SigmaSchedule{}, start, opt);
  CHECK(rec.rows.back().res.r_max < 1e-6);
}

TEST_CASE("run stops at the tolerance") {
  const ToyOracle t = toy1();
  const SymMatrix z = t.anchor(1.0).z_bar_caller() + 0.1 * t.h_bar({1, 1});
  RunOptions opt;
  opt.max_iters = 100000;
  opt.tol_rmax = 1e-14;
  const TrajectoryRecord rec = run(t.problem, SigmaSchedule{}, iterate_from_z(t.problem, z, 1.0), opt);
  CHECK(rec.converged);
  CHECK(rec.rows.back().res.r_max <= 1e-14);
  CHECK(rec.rows.size() < 100000);
}

TEST_CASE("sigma schedules") {
  SigmaSchedule sw;
  sw.mode = SigmaSchedule::Mode::sweep;
  sw.sigma0 = 2.0;
  sw.sweep_end = 20.0;
  sw.sweep_iters = 5000;
  const double ratio = std::pow(10.0, 1.0 / 5000);
  for (long k = 1; k <= 5000; k += 499)
    CHECK(sw.next(k, 0, nullptr) / sw.next(k - 1, 0, nullptr) == doctest::Approx(ratio).epsilon(1e-13));
  CHECK(sw.next(5000, 0, nullptr) == doctest::Approx(20.0));
  CHECK(sw.next(9000, 0, nullptr) == doctest::Approx(20.0));

  SigmaSchedule bal;
  bal.mode = SigmaSchedule::Mode::balance;
  bal.mu = 10;
  bal.gamma = 1.5;
  bal.cadence = 100;
  bal.freeze = 1000;
  const KktResiduals primal_heavy{1e-2, 1e-4, 0, 1e-2};
  const KktResiduals dual_heavy{1e-4, 1e-2, 0, 1e-2};
  const KktResiduals even{1e-3, 2e-3, 0, 2e-3};
  CHECK(bal.next(100, 1.0, &primal_heavy) == doctest::Approx(1.0 / 1.5));
  CHECK(bal.next(100, 1.0, &dual_heavy) == doctest::Approx(1.5));
  CHECK(bal.next(100, 1.0, &even) == 1.0);
  CHECK(bal.next(150, 1.0, &primal_heavy) == 1.0);
  CHECK(bal.next(1100, 1.0, &primal_heavy) == 1.0);

  // synthetic residual sequence: sigma moves only at cadence points
  double s = 1.0;
  for (long k = 1; k <= 1000; ++k) s = bal.next(k, s, &dual_heavy);
  CHECK(s == doctest::Approx(std::pow(1.5, 10)));
}

TEST_CASE("trajectory plateaus at half the limit map") {
  const ToyOracle t = toy1();
  const double tt = 1e-4;
  const SymMatrix z = t.anchor(1.0).z_bar_caller() + tt * t.h_bar({1, 1});
  RunOptions opt;
  opt.solver = Solver::one_step;
  const TrajectoryRecord rec = run(t.problem, SigmaSchedule{}, iterate_from_z(t.problem, z, 1.0), opt);
  const StallWindow w = find_stall_window(rec);
  REQUIRE(w.found);
  const double pred = 0.5 * tt * tt * t.oracle_psi({1, 1}, 1.0).z.norm();
  CHECK(std::abs(w.median_dz / pred - 1) < 0.1);
}

TEST_CASE("plateau height scales quadratically in the offset") {
  const ToyOracle t = toy1();
  std::vector<double> lt, ldz;
  for (double tt : {1e-2, 1e-3, 1e-4, 1e-5}) {
    const SymMatrix z = t.anchor(1.0).z_bar_caller() + tt * t.h_bar({1, 1});
    RunOptions opt;
    opt.solver = Solver::one_step;
    const TrajectoryRecord rec =
        run(t.problem, SigmaSchedule{}, iterate_from_z(t.problem, z, 1.0), opt);
    // at t = 1e-2 the plateau still drifts by about half a percent per step
    const StallWindow w = find_stall_window(rec, 1e-2);
    REQUIRE(w.found);
    lt.push_back(std::log10(tt));
    ldz.push_back(std::log10(w.median_dz));
  }
  CHECK(std::abs(fit_slope(lt, ldz) - 2.0) < 0.2);
}

TEST_CASE("spike detector") {
  TrajectoryRecord rec;
  for (int k = 0; k < 200; ++k) {
    TrajectoryRow r;
    r.iter = k + 1;
    r.angle = k == 120 ? 1.0 : 1e-3 * (1 + 0.1 * (k % 3));
    rec.rows.push_back(r);
  }
  auto s = first_spike(rec);
  REQUIRE(s.has_value());
  CHECK(*s == 120);
  rec.rows[120].angle = 2e-3;
  CHECK_FALSE(first_spike(rec).has_value());
}

TEST_CASE("slope fit") {
  CHECK(fit_slope({0, 1, 2, 3}, {1, 3, 5, 7}) == doctest::Approx(2.0));
}
