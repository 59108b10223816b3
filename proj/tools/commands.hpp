#pragma once

#include <string>

namespace cli {

struct Options {
  std::string instance;
  int toy = 0;
  double t = -1.0;  // < 0: command default
  std::string h_params;
  double sigma0 = 1.0;
  std::string schedule = "fixed";
  long max_iters = -1;  // < 0: command default
  double tol = 1e-14;
  std::string out_csv;
  std::string out_json;
  bool rescale = false;
  int jobs = 1;
  std::string solver = "three-step";
  std::string direction;  // limitmap: "", "tangent" or "cone"
};

// Each returns the process exit code; library exceptions propagate to main.
int cmd_solve(const Options& o);
int cmd_trajectory(const Options& o);
int cmd_sigma_sweep(const Options& o);
int cmd_limitmap(const Options& o);
int cmd_spike(const Options& o);
int cmd_toy(const Options& o);

}  // namespace cli
