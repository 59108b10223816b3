#include <algorithm>
#include <set>
#include <sstream>

#include "limitdyn/errors.hpp"
#include "limitdyn/limitdyn.hpp"

namespace ld {

namespace {

using Pairs = std::set<std::pair<Index, Index>>;

void add_pairs(Pairs& out, const std::vector<Index>& r, const std::vector<Index>& c) {
  for (Index i : r)
    for (Index j : c) out.emplace(std::min(i, j), std::max(i, j));
}

// Orthonormal basis (svec coordinates, columns) of the linear part of k.
Mat span_basis(const SdpProblem& p, const PolarConeSpec& k) {
  const Index n = p.n, nn = svec_size(n);
  const Index np = static_cast<Index>(k.pattern.size());
  if (np == 0) return Mat(nn, 0);
  Mat b(nn, np);
  for (Index l = 0; l < np; ++l) {
    const auto [i, j] = k.pattern[l];
    Mat e = Mat::Zero(n, n);
    if (i == j) {
      e(i, i) = 1.0;
    } else {
      e(i, j) = e(j, i) = 1.0 / std::sqrt(2.0);
    }
    b.col(l) = svec(sym(k.q * e * k.q.transpose()));
  }
  // Constraint rows: A W = 0, or P^perp W = 0.
  Mat cons;
  if (k.subspace == PolarConeSpec::Subspace::kernel) {
    cons = p.a_svec * b;
  } else {
    cons.resize(nn, np);
    for (Index l = 0; l < np; ++l) {
      const SymMatrix w = smat(b.col(l), n);
      cons.col(l) = svec(project_rangeA_perp(p, w));
    }
  }
  Eigen::JacobiSVD<Mat> svd(cons, Eigen::ComputeFullV);
  const Vec sv = svd.singularValues();
  const double thr = 1e-10 * std::max(1.0, sv.size() ? sv(0) : 0.0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thr) ++rank;
  const Mat null = svd.matrixV().rightCols(np - rank);
  return b * null;
}

SymMatrix project_block(const PolarConeSpec& k, const SymMatrix& w) {
  if (k.psd_block.empty()) return w;
  Mat r = k.q.transpose() * w * k.q;
  const Mat blk = block(r, k.psd_block, k.psd_block);
  const Mat proj = k.psd_sign > 0 ? psd_project(blk) : nsd_project(blk);
  set_block(r, k.psd_block, k.psd_block, proj);
  return sym(k.q * r * k.q.transpose());
}

std::vector<std::pair<Index, Index>> to_vec(const Pairs& p) { return {p.begin(), p.end()}; }

}  // namespace

SymMatrix project_onto_span(const SdpProblem& p, const PolarConeSpec& k, const SymMatrix& v) {
  const Mat l = span_basis(p, k);
  if (l.cols() == 0) return SymMatrix::Zero(p.n, p.n);
  return smat(l * (l.transpose() * svec(v)), p.n);
}

ConeProjection project_onto_cone(const SdpProblem& p, const PolarConeSpec& k, const SymMatrix& v,
                                 long max_iters, double tol) {
  const Mat l = span_basis(p, k);
  const Index n = p.n;
  auto proj_l = [&](const SymMatrix& m) -> SymMatrix {
    if (l.cols() == 0) return SymMatrix::Zero(n, n);
    return smat(l * (l.transpose() * svec(m)), n);
  };
  ConeProjection out;
  SymMatrix y = proj_l(v);
  if (k.psd_block.empty() || l.cols() == 0) {
    out.x = y;
    out.converged = true;
    return out;
  }
  // Dykstra; the subspace needs no correction term.
  SymMatrix x = v, corr = SymMatrix::Zero(n, n);
  const double scale = 1.0 + v.norm();
  for (long it = 1; it <= max_iters; ++it) {
    const SymMatrix y_new = proj_l(x);
    const SymMatrix x_new = project_block(k, y_new + corr);
    corr = y_new + corr - x_new;
    const double change = (y_new - y).norm() + (x_new - x).norm();
    const double gap = (x_new - y_new).norm();
    y = y_new;
    x = x_new;
    out.iterations = it;
    if (change <= tol * scale && gap <= 10 * tol * scale) {
      out.converged = true;
      break;
    }
  }
  out.x = y;
  return out;
}

std::pair<PolarConeSpec, PolarConeSpec> polar_cone_specs(const KktAnchor& a,
                                                         const SymMatrix& h_bar) {
  const SymMatrix hb = a.to_working(h_bar);
  const Index n = hb.rows();
  const double zt = a.tol.zero_rel * std::max(1.0, hb.norm());
  const double cross = block(hb, a.alpha0_p, a.alpha0_d).norm();
  if (cross > 1e-8 * (1.0 + hb.norm())) {
    std::ostringstream os;
    os << "Q0 is not block diagonal: ||Hbar(alpha0P, alpha0D)|| = " << cross;
    throw AssumptionError(os.str());
  }
  Mat q = Mat::Identity(n, n);
  std::vector<Index> bp, b0p, b0d, bm;
  if (!a.alpha0_p.empty()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(block(hb, a.alpha0_p, a.alpha0_p));
    const Mat v = es.eigenvectors().rowwise().reverse();
    const Vec ev = es.eigenvalues().reverse();
    if (ev.minCoeff() < -std::max(zt, 1e-8 * (1.0 + hb.norm())))
      throw AssumptionError("Hbar(alpha0P, alpha0P) is not positive semidefinite");
    set_block(q, a.alpha0_p, a.alpha0_p, v);
    for (size_t i = 0; i < a.alpha0_p.size(); ++i)
      (ev(i) > zt ? bp : b0p).push_back(a.alpha0_p[i]);
  }
  if (!a.alpha0_d.empty()) {
    Eigen::SelfAdjointEigenSolver<Mat> es(block(hb, a.alpha0_d, a.alpha0_d));
    const Mat v = es.eigenvectors().rowwise().reverse();
    const Vec ev = es.eigenvalues().reverse();
    if (ev.maxCoeff() > std::max(zt, 1e-8 * (1.0 + hb.norm())))
      throw AssumptionError("Hbar(alpha0D, alpha0D) is not negative semidefinite");
    set_block(q, a.alpha0_d, a.alpha0_d, v);
    for (size_t i = 0; i < a.alpha0_d.size(); ++i)
      (ev(i) < -zt ? bm : b0d).push_back(a.alpha0_d[i]);
  }

  PolarConeSpec kx, ks;
  kx.side = PolarConeSpec::Side::primal;
  kx.subspace = PolarConeSpec::Subspace::kernel;
  kx.q = q;
  Pairs px;
  add_pairs(px, a.alpha_pos, a.alpha_pos);
  add_pairs(px, a.alpha_pos, a.alpha_zero);
  add_pairs(px, bp, bp);
  add_pairs(px, bp, b0p);
  add_pairs(px, bp, b0d);
  add_pairs(px, b0p, b0p);
  kx.pattern = to_vec(px);
  kx.psd_block = b0p;
  kx.psd_sign = 1.0;

  ks.side = PolarConeSpec::Side::dual;
  ks.subspace = PolarConeSpec::Subspace::range;
  ks.q = q;
  Pairs ps;
  add_pairs(ps, a.alpha_zero, a.alpha_neg);
  add_pairs(ps, a.alpha_neg, a.alpha_neg);
  add_pairs(ps, b0p, bm);
  add_pairs(ps, b0d, b0d);
  add_pairs(ps, b0d, bm);
  add_pairs(ps, bm, bm);
  ks.pattern = to_vec(ps);
  ks.psd_block = b0d;
  ks.psd_sign = -1.0;
  return {kx, ks};
}

std::pair<PolarConeSpec, PolarConeSpec> cone_C_specs(const KktAnchor& a, bool tangent) {
  const Index n = a.problem.n;
  PolarConeSpec cp, cd;
  cp.side = PolarConeSpec::Side::primal;
  cp.subspace = PolarConeSpec::Subspace::kernel;
  cp.q = Mat::Identity(n, n);
  Pairs pp;
  add_pairs(pp, a.alpha_pos, a.alpha_pos);
  add_pairs(pp, a.alpha_pos, a.alpha0_p);
  if (!tangent) add_pairs(pp, a.alpha_pos, a.alpha0_d);
  add_pairs(pp, a.alpha0_p, a.alpha0_p);
  cp.pattern = to_vec(pp);
  cp.psd_block = a.alpha0_p;
  cp.psd_sign = 1.0;

  cd.side = PolarConeSpec::Side::dual;
  cd.subspace = PolarConeSpec::Subspace::range;
  cd.q = Mat::Identity(n, n);
  Pairs pd;
  if (!tangent) add_pairs(pd, a.alpha0_p, a.alpha_neg);
  add_pairs(pd, a.alpha0_d, a.alpha0_d);
  add_pairs(pd, a.alpha0_d, a.alpha_neg);
  add_pairs(pd, a.alpha_neg, a.alpha_neg);
  cd.pattern = to_vec(pd);
  cd.psd_block = a.alpha0_d;
  cd.psd_sign = -1.0;
  return {cp, cd};
}

LimitMapResult limit_map_decoupled(const KktAnchor& a, const SymMatrix& h_bar, long dykstra_iters,
                                   double tol) {
  const DriftTerms d = drift_ops(a, h_bar);  // checks membership
  const auto [kx, ks] = polar_cone_specs(a, h_bar);
  const ConeProjection px = project_onto_cone(a.problem, kx, -a.to_working(d.e_perp), dykstra_iters, tol);
  const ConeProjection ps = project_onto_cone(a.problem, ks, -a.to_working(d.e), dykstra_iters, tol);
  LimitMapResult r;
  r.method = LimitMethod::decoupled;
  const SymMatrix psi_x = px.x;
  const SymMatrix psi_s = -ps.x / a.sigma;
  r.psi_x = a.to_caller(psi_x);
  r.psi_s = a.to_caller(psi_s);
  r.psi_z = a.to_caller(psi_x - a.sigma * psi_s);
  r.iterations_used = std::max(px.iterations, ps.iterations);
  r.converged = px.converged && ps.converged;
  const SymMatrix ex = project_block(kx, psi_x) - psi_x;
  const SymMatrix es = project_block(ks, ps.x) - ps.x;
  r.residual_estimate = ex.norm() + es.norm();
  return r;
}

}  // namespace ld
