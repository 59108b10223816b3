#pragma once

#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "limitdyn/jetcalc.hpp"
#include "limitdyn/sdpmodel.hpp"

namespace ld {

struct AnchorTolerances {
  double kkt = 1e-10;       // residual bound for the supplied optimal pairs
  double zero_rel = 1e-9;   // rank decisions, scaled by max(1, ||M||_F)
  double cluster_rel = 1e-8;
};

// A KKT point Zbar = Xbar - sigma Sbar. Everything below the inputs lives in a
// working basis where Xbar and Sbar are diagonal and the index order is
// alpha_+, alpha_0^P, alpha_0^D, alpha_-; public functions take and return
// matrices in the caller's basis.
struct KktAnchor {
  // caller's data
  SdpProblem original;
  SymMatrix x_in, s_in, x_sc_in, s_sc_in;
  AnchorTolerances tol;

  double sigma = 1.0;
  Mat basis;  // working = basis^T caller * basis
  SdpProblem problem;  // working basis
  SymMatrix x_bar, s_bar, z_bar;
  Vec y_bar;
  EigenPartition level1;
  std::vector<Index> alpha_pos, alpha_zero, alpha_neg;
  std::vector<Index> alpha0_p, alpha0_d;  // P \ alpha_+, D \ alpha_-
  std::vector<Index> p_side, d_side;

  SymMatrix to_working(const SymMatrix& m) const { return sym(basis.transpose() * m * basis); }
  SymMatrix to_caller(const SymMatrix& m) const { return sym(basis * m * basis.transpose()); }
  SymMatrix z_bar_caller() const { return to_caller(z_bar); }
};

// x_sc/s_sc default to (x_bar, s_bar), which must then be strictly complementary.
KktAnchor build_anchor(const SdpProblem& p, const SymMatrix& x_bar, const SymMatrix& s_bar,
                       const std::optional<SymMatrix>& x_sc, const std::optional<SymMatrix>& s_sc,
                       double sigma, const AnchorTolerances& tol = {});

// delta(Z) = -P(Pi_+(Z) - Xtilde) + P^perp(Pi_+(-Z) - sigma C)
SymMatrix delta(const SdpProblem& p, const SymMatrix& z, double sigma);
SymMatrix delta(const KktAnchor& a, const SymMatrix& z);
SymMatrix delta_dd1(const KktAnchor& a, const SymMatrix& h);
SymMatrix delta_dd2(const KktAnchor& a, const SymMatrix& h, const SymMatrix& w);

struct FirstOrderRun {
  SymMatrix h;
  long iterations = 0;
  bool converged = false;
};
FirstOrderRun first_order_dynamics_run(const KktAnchor& a, const SymMatrix& h0, long max_iters,
                                       double tol);

struct MembershipReport {
  bool member = false;
  bool structural_ok = false;
  double delta1_norm = 0;
  double forbidden_block_norm = 0;  // SC blocks (1,4) and (2,3)
  double psd_violation = 0;         // -lambda_min(H_22), lambda_max(H_33)
  double range_violation = 0;       // ||P U|| + ||P^perp V||
  double tangent_block_norm = 0;    // SC blocks (1,3) and (2,4)
  double tol = 0;
};
double default_member_tol(const SymMatrix& h);
// tol < 0 selects default_member_tol(h).
MembershipReport cone_C_membership(const KktAnchor& a, const SymMatrix& h, double tol = -1);
bool tangent_cone_membership(const KktAnchor& a, const SymMatrix& h, double tol = -1);

// Theta(hbar; w) and Theta^perp = w - Theta.
std::pair<SymMatrix, SymMatrix> theta_ops(const KktAnchor& a, const SymMatrix& h_bar,
                                          const SymMatrix& w);
struct DriftTerms {
  SymMatrix e, e_perp, upsilon, psi;
};
DriftTerms drift_ops(const KktAnchor& a, const SymMatrix& h_bar);
// W with its (0,0) block replaced by V_0(hbar, W).
SymMatrix w_tilde(const KktAnchor& a, const SymMatrix& h_bar, const SymMatrix& w);

enum class LimitMethod { iterative, decoupled };

struct LimitMapResult {
  SymMatrix psi_z, psi_x, psi_s;
  LimitMethod method = LimitMethod::iterative;
  long iterations_used = 0;
  double residual_estimate = 0;
  bool converged = false;
};

LimitMapResult limit_map_iterative(const KktAnchor& a, const SymMatrix& h_bar,
                                   long max_iters = 200000, double tol = 1e-11);
LimitMapResult limit_map_decoupled(const KktAnchor& a, const SymMatrix& h_bar,
                                   long dykstra_iters = 100000, double tol = 1e-13);

// A closed convex cone {W : W in span(pattern) rotated by q, A W = 0 (kernel)
// or W in range A^* (range), sign * (q^T W q)[block, block] psd}.
struct PolarConeSpec {
  enum class Side { primal, dual };
  enum class Subspace { kernel, range };
  Side side = Side::primal;
  Mat q;
  std::vector<std::pair<Index, Index>> pattern;  // free entries (i <= j), rotated coordinates
  Subspace subspace = Subspace::kernel;
  std::vector<Index> psd_block;
  double psd_sign = 1.0;
};

struct ConeProjection {
  SymMatrix x;
  long iterations = 0;
  bool converged = false;
};
// Working-basis projection; Dykstra over (pattern and subspace) then the semidefinite block.
ConeProjection project_onto_cone(const SdpProblem& p, const PolarConeSpec& k, const SymMatrix& v,
                                 long max_iters, double tol);
// Projection onto the linear part only.
SymMatrix project_onto_span(const SdpProblem& p, const PolarConeSpec& k, const SymMatrix& v);

std::pair<PolarConeSpec, PolarConeSpec> polar_cone_specs(const KktAnchor& a, const SymMatrix& h_bar);
// C(Zbar) = C_P + C_D (tangent = true adds H_13 = H_24 = 0).
std::pair<PolarConeSpec, PolarConeSpec> cone_C_specs(const KktAnchor& a, bool tangent);

SymMatrix project_cone_C(const KktAnchor& a, const SymMatrix& g, bool tangent);
// Unit-norm random member of T (tangent) or of C \ T with SC blocks (1,3),(2,4)
// carrying at least 10% of the norm.
SymMatrix sample_cone_member(const KktAnchor& a, std::mt19937_64& rng, bool tangent);

struct SigmaRescale {
  KktAnchor anchor;
  SymMatrix h_bar;
  SymMatrix psi_x_pred, psi_s_pred;
};
SigmaRescale sigma_rescale(const KktAnchor& a, const SymMatrix& h_bar, double sigma_new);

double two_homogeneity_check(const KktAnchor& a, const SymMatrix& h_bar, double t);

// ||dz - psi(Zbar; Pi_C(z - Zbar))/2|| / ||dz||: how well one DRS step from z
// matches the second-order limit of the displacement z - Zbar.
double psi_tracking_error(const KktAnchor& a, const SymMatrix& z, const SymMatrix& dz);

struct RangeReport {
  double distance = 0;
  bool uniqueness_declared = false;
  bool included = false;
};
RangeReport range_inclusion_check(const KktAnchor& a, const SymMatrix& h_bar, bool primal_unique,
                                  bool dual_unique, double tol = 1e-8);

}  // namespace ld
