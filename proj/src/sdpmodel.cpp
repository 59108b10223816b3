#include "limitdyn/sdpmodel.hpp"

#include <omp.h>

#include <cmath>
#include <sstream>

#include "limitdyn/errors.hpp"

namespace ld {

namespace {

// Below this many stored entries the thread fan-out costs more than it saves.
constexpr Index kParallelWork = 1 << 16;

}  // namespace

SdpProblem make_problem(std::vector<SymMatrix> a_mats, Vec b, SymMatrix c) {
  SdpProblem p;
  p.m = static_cast<Index>(a_mats.size());
  p.n = c.rows();
  if (c.cols() != p.n) throw DimensionError("C is not square");
  if (b.size() != p.m) throw DimensionError("b has " + std::to_string(b.size()) +
                                            " entries, expected " + std::to_string(p.m));
  if (p.m == 0) throw AssumptionError("no constraints");
  p.a_svec.resize(p.m, svec_size(p.n));
  for (Index i = 0; i < p.m; ++i) {
    if (a_mats[i].rows() != p.n || a_mats[i].cols() != p.n)
      throw DimensionError("A_" + std::to_string(i + 1) + " has the wrong order");
    a_mats[i] = sym(a_mats[i]);
    p.a_svec.row(i) = svec(a_mats[i]).transpose();
  }
  p.a_mats = std::move(a_mats);
  p.b = std::move(b);
  p.c = sym(c);
  p.gram = p.a_svec * p.a_svec.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(p.gram, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 1e-10 * hi)) {
    std::ostringstream os;
    os << "constraint matrices are linearly dependent (Gram eigenvalues " << lo << " .. " << hi
       << ")";
    throw AssumptionError(os.str());
  }
  p.aat_factor.compute(p.gram);
  if (p.aat_factor.info() != Eigen::Success) throw AssumptionError("Gram factorization failed");
  p.x_feas = apply_Aadj(p, solve_gram(p, p.b));
  return p;
}

Vec apply_A_serial(const SdpProblem& p, const SymMatrix& x) {
  if (x.rows() != p.n || x.cols() != p.n) throw DimensionError("apply_A: order mismatch");
  return p.a_svec * svec(x);
}

SymMatrix apply_Aadj_serial(const SdpProblem& p, const Vec& y) {
  if (y.size() != p.m) throw DimensionError("apply_Aadj: length mismatch");
  return smat(p.a_svec.transpose() * y, p.n);
}

Vec apply_A_parallel(const SdpProblem& p, const SymMatrix& x) {
  if (x.rows() != p.n || x.cols() != p.n) throw DimensionError("apply_A: order mismatch");
  const Vec sx = svec(x);
  Vec out(p.m);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < p.m; ++i) out(i) = p.a_svec.row(i).dot(sx);
  return out;
}

SymMatrix apply_Aadj_parallel(const SdpProblem& p, const Vec& y) {
  if (y.size() != p.m) throw DimensionError("apply_Aadj: length mismatch");
  const Index len = p.a_svec.cols();
  Vec v(len);
#pragma omp parallel for schedule(static)
  for (Index k = 0; k < len; ++k) v(k) = p.a_svec.col(k).dot(y);
  return smat(v, p.n);
}

Vec apply_A(const SdpProblem& p, const SymMatrix& x) {
  if (p.a_svec.size() >= kParallelWork && omp_get_max_threads() > 1) return apply_A_parallel(p, x);
  return apply_A_serial(p, x);
}

SymMatrix apply_Aadj(const SdpProblem& p, const Vec& y) {
  if (p.a_svec.size() >= kParallelWork && omp_get_max_threads() > 1)
    return apply_Aadj_parallel(p, y);
  return apply_Aadj_serial(p, y);
}

Vec solve_gram(const SdpProblem& p, const Vec& rhs) { return p.aat_factor.solve(rhs); }

SymMatrix project_rangeA(const SdpProblem& p, const SymMatrix& m) {
  return apply_Aadj(p, solve_gram(p, apply_A(p, m)));
}

SymMatrix project_rangeA_perp(const SdpProblem& p, const SymMatrix& m) {
  return m - project_rangeA(p, m);
}

KktResiduals kkt_residuals(const SdpProblem& p, const Iterate& it) {
  KktResiduals r;
  r.r_p = (apply_A(p, it.x) - p.b).norm() / (1.0 + p.b.norm());
  r.r_d = (apply_Aadj(p, it.y) + it.s - p.c).norm() / (1.0 + p.c.norm());
  const double pobj = inner(p.c, it.x), dobj = p.b.dot(it.y);
  r.r_g = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
  r.r_max = std::max({r.r_p, r.r_d, r.r_g});
  return r;
}

Vec recover_y(const SdpProblem& p, const SymMatrix& s) { return solve_gram(p, apply_A(p, p.c - s)); }

SdpProblem congruence_transform(const SdpProblem& p, const Mat& q) {
  if (q.rows() != p.n || q.cols() != p.n) throw DimensionError("congruence: order mismatch");
  if ((q.transpose() * q - Mat::Identity(p.n, p.n)).norm() > 1e-10)
    throw AssumptionError("congruence: matrix is not orthonormal");
  std::vector<SymMatrix> a;
  a.reserve(p.m);
  for (const auto& ai : p.a_mats) a.push_back(sym(q.transpose() * ai * q));
  return make_problem(std::move(a), p.b, sym(q.transpose() * p.c * q));
}

SdpProblem rescale_rows(const SdpProblem& p) {
  std::vector<SymMatrix> a = p.a_mats;
  Vec b = p.b;
  for (Index i = 0; i < p.m; ++i) {
    const double s = a[i].norm();
    a[i] /= s;
    b(i) /= s;
  }
  return make_problem(std::move(a), std::move(b), p.c);
}

}  // namespace ld
