#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "limitdyn/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ADMM trajectories and second-order limit maps for small SDPs"};
  app.require_subcommand(1);
  cli::Options o;

  auto common = [&](CLI::App* c) {
    c->add_option("--instance", o.instance, "SDPA sparse file (single block)");
    c->add_option("--toy", o.toy, "built-in example 1, 2 or 3")->check(CLI::Range(1, 3));
    c->add_option("--t", o.t, "start offset Zbar + t Hbar");
    c->add_option("--h-params", o.h_params, "direction parameters, e.g. 1,1 or 1.5,1e-3;1.6,1e-3");
    c->add_option("--sigma0", o.sigma0, "initial sigma");
    c->add_option("--sigma-schedule", o.schedule, "fixed | balance | sweep[:END:ITERS]");
    c->add_option("--max-iters", o.max_iters);
    c->add_option("--tol", o.tol, "stop when r_max <= tol");
    c->add_option("--out-csv", o.out_csv);
    c->add_option("--out-json", o.out_json, "summary file (default stdout)");
    c->add_flag("--rescale", o.rescale, "divide each A_i, b_i by ||A_i||_F");
    c->add_option("--jobs", o.jobs, "threads for parameter lists")->check(CLI::PositiveNumber);
    c->add_option("--solver", o.solver, "three-step | one-step");
  };

  auto* solve = app.add_subcommand("solve", "run ADMM from the zero iterate");
  auto* traj = app.add_subcommand("trajectory", "record a trajectory from Zbar + t Hbar");
  auto* sweep = app.add_subcommand("sigma-sweep", "log-linear sigma sweep from Zbar + t Hbar");
  auto* lmap = app.add_subcommand("limitmap", "second-order limit map report for a toy");
  auto* spike = app.add_subcommand("spike", "angle spike detection on toy 3");
  auto* toy = app.add_subcommand("toy", "print a toy instance in SDPA format");
  for (auto* c : {solve, traj, sweep, lmap, spike, toy}) common(c);
  lmap->add_option("--direction", o.direction, "sample a random direction: tangent | cone");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*solve) return cli::cmd_solve(o);
    if (*traj) return cli::cmd_trajectory(o);
    if (*sweep) return cli::cmd_sigma_sweep(o);
    if (*lmap) return cli::cmd_limitmap(o);
    if (*spike) return cli::cmd_spike(o);
    if (*toy) return cli::cmd_toy(o);
  } catch (const ld::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ld::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ld::DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ld::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
