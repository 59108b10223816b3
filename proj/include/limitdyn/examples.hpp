#pragma once

#include <functional>
#include <string>
#include <vector>

#include "limitdyn/limitdyn.hpp"

namespace ld {

struct PsiTriple {
  SymMatrix z, x, s;
};

// One of the three small SDP examples with its stalled-direction family and the
// closed-form limit map.
struct ToyOracle {
  int id = 0;
  std::string name;
  SdpProblem problem;
  SymMatrix x_bar, s_bar, x_sc, s_sc;
  bool primal_unique = false;
  bool dual_unique = false;
  std::vector<std::string> param_names;
  std::vector<double> default_params;

  // Direction family; throws AssumptionError outside the admissible set.
  std::function<SymMatrix(const std::vector<double>&)> h_bar;
  std::function<PsiTriple(const std::vector<double>&, double sigma)> oracle_psi;
  // Whether the member of the family lies in the tangent cone.
  std::function<bool(const std::vector<double>&)> in_tangent;

  KktAnchor anchor(double sigma) const {
    return build_anchor(problem, x_bar, s_bar, x_sc, s_sc, sigma);
  }
};

// toy1: C = diag(0,1), A_1 = [[0,1],[1,-1]], b = 0; params (a, b), a >= 0.
ToyOracle toy1();
// toy2 (already in the nontrivial basis): C = diag(0,0,1), A_1 = I, A_2 = E_23 + E_32,
// b = (1, 0); params (H12, H22, H23), H22 >= 0.
ToyOracle toy2();
// toy3: 6x6 instance with fifteen constraints; params (h, eps), eps >= 0.
ToyOracle toy3();
ToyOracle toy_by_id(int id);

// Single-block SDPA sparse text, upper-triangle entries, %.17g.
std::string to_sdpa(const SdpProblem& p);

}  // namespace ld
