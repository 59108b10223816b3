#pragma once

#include <functional>
#include <vector>

#include "limitdyn/symcore.hpp"

namespace ld {

struct JetTolerances {
  double cluster_rel = 1e-8;  // scaled by max(1, ||block||_F)
  double zero_rel = 1e-9;
};

// Set when some divided-difference denominator falls below 1e-6 ||Z||_F.
struct JetDiagnostics {
  bool ill_conditioned = false;
  double min_denominator = 0.0;
};

struct Level2 {
  int group = -1;  // level-1 group
  Mat q;           // diagonalizes H restricted to the group
  Vec mu;
  EigenPartition part;
};

struct Level3 {
  int group = -1;     // level-1 group
  int subgroup = -1;  // level-2 group with mu == 0
  Mat q;              // diagonalizes the matching diagonal block of Vhat
  Vec nu;
  EigenPartition part;
};

struct ThreeLevelDescription {
  Mat q;  // Z = q diag(lambda) q^T
  Vec lambda;
  EigenPartition level1;
  Mat h, w;  // q^T H q, q^T W q
  std::vector<Level2> level2;  // one per level-1 group
  std::vector<Mat> v_blocks;   // V_k per level-1 group
  std::vector<Mat> v_hat;      // Q^(k)^T V_k Q^(k)
  std::vector<Level3> level3;
};

ThreeLevelDescription build_three_level(const SymMatrix& z, const SymMatrix& h,
                                        const SymMatrix& w, const JetTolerances& tol = {});

// V_k = W_kk + sum_{l != k} 2/(lambda_k - lambda_l) H_kl H_lk on a diagonal frame.
Mat v_block(const EigenPartition& p, const Mat& h, const Mat& w, int k);

SymMatrix pi_plus_dd1(const SymMatrix& z, const SymMatrix& h, const JetTolerances& tol = {},
                      JetDiagnostics* diag = nullptr);
SymMatrix pi_minus_dd1(const SymMatrix& z, const SymMatrix& h, const JetTolerances& tol = {});
SymMatrix pi_plus_dd2(const SymMatrix& z, const SymMatrix& h, const SymMatrix& w,
                      const JetTolerances& tol = {}, JetDiagnostics* diag = nullptr);
SymMatrix pi_minus_dd2(const SymMatrix& z, const SymMatrix& h, const SymMatrix& w,
                       const JetTolerances& tol = {});

// Kernels on a frame where Z is diagonal with partition p (representative values).
SymMatrix pi_plus_dd1_frame(const EigenPartition& p, const Mat& h, const JetTolerances& tol = {});
SymMatrix pi_plus_dd2_frame(const EigenPartition& p, const Mat& h, const Mat& w,
                            const JetTolerances& tol = {});

// Scalar data of a spectral function F(Z) = Q diag(f(lambda)) Q^T.
struct SpectralFunction {
  std::function<double(double)> f;
  std::function<double(double, double)> d1;          // f'(lambda; h)
  std::function<double(double, double, double)> d2;  // f''(lambda; mu, w)
};

SpectralFunction max_function();
SpectralFunction identity_function();

// Gamma_1 + Gamma_2 + Gamma_3 on the three-level description.
SymMatrix general_spectral_dd2(const SymMatrix& z, const SymMatrix& h, const SymMatrix& w,
                               const SpectralFunction& f, const JetTolerances& tol = {});

}  // namespace ld
