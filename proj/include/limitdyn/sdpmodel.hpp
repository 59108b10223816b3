#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "limitdyn/symcore.hpp"

namespace ld {

// min <C, X> s.t. <A_i, X> = b_i, X psd.
struct SdpProblem {
  Index n = 0;
  Index m = 0;
  std::vector<SymMatrix> a_mats;
  Vec b;
  SymMatrix c;
  Mat a_svec;                 // m x n(n+1)/2, row i = svec(A_i)
  Mat gram;                   // <A_i, A_j>
  Eigen::LLT<Mat> aat_factor;
  SymMatrix x_feas;           // A^*(AA^*)^{-1} b
};

struct Iterate {
  SymMatrix x;
  Vec y;
  SymMatrix s;
  double sigma = 1.0;
};

struct KktResiduals {
  double r_p = 0, r_d = 0, r_g = 0, r_max = 0;
};

// Validates shapes and linear independence, factors the Gram matrix.
SdpProblem make_problem(std::vector<SymMatrix> a_mats, Vec b, SymMatrix c);

Vec apply_A(const SdpProblem& p, const SymMatrix& x);
SymMatrix apply_Aadj(const SdpProblem& p, const Vec& y);
// Reference implementations; apply_A / apply_Aadj switch to OpenMP loops over
// constraints once the operator is large enough to pay for the threads.
Vec apply_A_serial(const SdpProblem& p, const SymMatrix& x);
SymMatrix apply_Aadj_serial(const SdpProblem& p, const Vec& y);
Vec apply_A_parallel(const SdpProblem& p, const SymMatrix& x);
SymMatrix apply_Aadj_parallel(const SdpProblem& p, const Vec& y);

Vec solve_gram(const SdpProblem& p, const Vec& rhs);
SymMatrix project_rangeA(const SdpProblem& p, const SymMatrix& m);
SymMatrix project_rangeA_perp(const SdpProblem& p, const SymMatrix& m);

KktResiduals kkt_residuals(const SdpProblem& p, const Iterate& it);
// Least-squares dual multiplier for a given slack: A^* y ~ C - S.
Vec recover_y(const SdpProblem& p, const SymMatrix& s);

SdpProblem congruence_transform(const SdpProblem& p, const Mat& q);
// Divides each A_i and b_i by ||A_i||_F.
SdpProblem rescale_rows(const SdpProblem& p);

SdpProblem load_sdpa(const std::string& path);
SdpProblem parse_sdpa(std::istream& in);

}  // namespace ld
