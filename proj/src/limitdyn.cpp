#include "limitdyn/limitdyn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "limitdyn/errors.hpp"

namespace ld {

namespace {

double ztol(const Mat& m, double rel) { return rel * std::max(1.0, m.norm()); }

std::vector<Index> range_of(Index lo, Index hi) {
  std::vector<Index> v;
  for (Index i = lo; i < hi; ++i) v.push_back(i);
  return v;
}

void check_pair(const SdpProblem& p, const SymMatrix& x, const SymMatrix& s, double sigma,
                const AnchorTolerances& tol, const char* name) {
  Iterate it{x, recover_y(p, s), s, sigma};
  const KktResiduals r = kkt_residuals(p, it);
  const double lx = x.rows() ? Eigen::SelfAdjointEigenSolver<Mat>(x).eigenvalues().minCoeff() : 0;
  const double ls = s.rows() ? Eigen::SelfAdjointEigenSolver<Mat>(s).eigenvalues().minCoeff() : 0;
  const double comp = std::abs(inner(x, s));
  if (r.r_max > tol.kkt || lx < -ztol(x, tol.zero_rel) || ls < -ztol(s, tol.zero_rel) ||
      comp > 1e-10 * (1.0 + x.norm() * s.norm())) {
    std::ostringstream os;
    os << name << " is not a KKT pair: r_p=" << r.r_p << " r_d=" << r.r_d << " r_g=" << r.r_g
       << " min eig X=" << lx << " min eig S=" << ls << " <X,S>=" << comp;
    throw AssumptionError(os.str());
  }
}

Index rank_of(const SymMatrix& m, double rel) {
  if (m.rows() == 0) return 0;
  const Vec ev = Eigen::SelfAdjointEigenSolver<Mat>(m, Eigen::EigenvaluesOnly).eigenvalues();
  const double t = ztol(m, rel);
  return static_cast<Index>((ev.array() > t).count());
}

SymMatrix diag_part(const SymMatrix& m) { return m.diagonal().asDiagonal(); }

void require_member(const KktAnchor& a, const SymMatrix& h) {
  const MembershipReport r = cone_C_membership(a, h);
  if (!r.member) {
    std::ostringstream os;
    os << "direction is not in C(Zbar): ||delta'||=" << r.delta1_norm
       << " forbidden blocks=" << r.forbidden_block_norm << " psd violation=" << r.psd_violation
       << " range violation=" << r.range_violation << " (tol " << r.tol << ")";
    throw AssumptionError(os.str());
  }
}

}  // namespace

KktAnchor build_anchor(const SdpProblem& p, const SymMatrix& x_bar, const SymMatrix& s_bar,
                       const std::optional<SymMatrix>& x_sc_opt,
                       const std::optional<SymMatrix>& s_sc_opt, double sigma,
                       const AnchorTolerances& tol) {
  if (!(sigma > 0)) throw AssumptionError("sigma must be positive");
  const Index n = p.n;
  for (const SymMatrix* m : {&x_bar, &s_bar})
    if (m->rows() != n || m->cols() != n) throw DimensionError("anchor: order mismatch");
  const SymMatrix x_sc = x_sc_opt.value_or(x_bar);
  const SymMatrix s_sc = s_sc_opt.value_or(s_bar);
  if (x_sc.rows() != n || s_sc.rows() != n) throw DimensionError("anchor: order mismatch");

  check_pair(p, x_bar, s_bar, sigma, tol, "(Xbar, Sbar)");
  if (x_sc_opt || s_sc_opt) check_pair(p, x_sc, s_sc, sigma, tol, "(X_sc, S_sc)");
  const Index rp = rank_of(x_sc, tol.zero_rel), rd = rank_of(s_sc, tol.zero_rel);
  if (rp + rd != n) {
    std::ostringstream os;
    os << "strict complementarity fails: rank(X_sc) + rank(S_sc) = " << rp << " + " << rd
       << " != " << n;
    throw AssumptionError(os.str());
  }

  KktAnchor a;
  a.original = p;
  a.x_in = x_bar;
  a.s_in = s_bar;
  a.x_sc_in = x_sc;
  a.s_sc_in = s_sc;
  a.tol = tol;
  a.sigma = sigma;

  const double tx = ztol(x_bar, tol.zero_rel), ts = ztol(s_bar, tol.zero_rel);
  const double txs = ztol(x_sc, tol.zero_rel), tss = ztol(s_sc, tol.zero_rel);
  const bool all_diag = is_diagonal(x_bar) && is_diagonal(s_bar) && is_diagonal(x_sc) &&
                        is_diagonal(s_sc);
  Index npos = 0, np = 0, nd0 = 0;
  if (all_diag) {
    std::vector<Index> c0, c1, c2, c3;
    for (Index i = 0; i < n; ++i) {
      const bool in_p = x_sc(i, i) > txs, in_d = s_sc(i, i) > tss;
      if (in_p == in_d) throw AssumptionError("index " + std::to_string(i + 1) +
                                              " is in neither or both of the P/D sides");
      if (x_bar(i, i) > tx) {
        if (!in_p) throw AssumptionError("range(Xbar) is not inside range(X_sc)");
        c0.push_back(i);
      } else if (s_bar(i, i) > ts) {
        if (!in_d) throw AssumptionError("range(Sbar) is not inside range(S_sc)");
        c3.push_back(i);
      } else if (in_p) {
        c1.push_back(i);
      } else {
        c2.push_back(i);
      }
    }
    std::stable_sort(c0.begin(), c0.end(), [&](Index i, Index j) { return x_bar(i, i) > x_bar(j, j); });
    std::stable_sort(c3.begin(), c3.end(), [&](Index i, Index j) { return s_bar(i, i) < s_bar(j, j); });
    std::vector<Index> order;
    for (auto* c : {&c0, &c1, &c2, &c3}) order.insert(order.end(), c->begin(), c->end());
    a.basis = Mat::Zero(n, n);
    for (Index k = 0; k < n; ++k) a.basis(order[k], k) = 1.0;
    npos = static_cast<Index>(c0.size());
    np = npos + static_cast<Index>(c1.size());
    nd0 = static_cast<Index>(c2.size());
  } else {
    Eigen::SelfAdjointEigenSolver<Mat> ex(x_sc), es(s_sc);
    Mat up(n, rp), ud(n, rd);
    {
      Index k = 0;
      for (Index j = n - 1; j >= 0 && k < rp; --j) up.col(k++) = ex.eigenvectors().col(j);
      k = 0;
      for (Index j = n - 1; j >= 0 && k < rd; --j) ud.col(k++) = es.eigenvectors().col(j);
    }
    if ((up.transpose() * ud).norm() > 1e-8) throw AssumptionError("range(X_sc) and range(S_sc) are not orthogonal");
    const Mat xp = sym(up.transpose() * x_bar * up);
    const Mat sd = sym(ud.transpose() * s_bar * ud);
    if ((x_bar - up * xp * up.transpose()).norm() > 1e-8 * std::max(1.0, x_bar.norm()))
      throw AssumptionError("range(Xbar) is not inside range(X_sc)");
    if ((s_bar - ud * sd * ud.transpose()).norm() > 1e-8 * std::max(1.0, s_bar.norm()))
      throw AssumptionError("range(Sbar) is not inside range(S_sc)");
    Eigen::SelfAdjointEigenSolver<Mat> exp_(xp), esd(sd);
    Mat vp = exp_.eigenvectors().rowwise().reverse();  // descending
    Mat vd = esd.eigenvectors();                        // ascending
    a.basis.resize(n, n);
    a.basis.leftCols(rp) = up * vp;
    a.basis.rightCols(rd) = ud * vd;
    npos = (exp_.eigenvalues().array() > tx).count();
    np = rp;
    nd0 = rd - (esd.eigenvalues().array() > ts).count();
  }

  a.problem = congruence_transform(p, a.basis);
  const SymMatrix xw = a.to_working(x_bar), sw = a.to_working(s_bar);
  if (!is_diagonal(xw, 1e-8 * std::max(1.0, xw.norm())) ||
      !is_diagonal(sw, 1e-8 * std::max(1.0, sw.norm())))
    throw AssumptionError("could not diagonalize the anchor pair");
  a.x_bar = diag_part(xw);
  a.s_bar = diag_part(sw);
  a.z_bar = a.x_bar - sigma * a.s_bar;
  a.y_bar = recover_y(a.problem, a.s_bar);

  a.alpha_pos = range_of(0, npos);
  a.alpha0_p = range_of(npos, np);
  a.alpha0_d = range_of(np, np + nd0);
  a.alpha_neg = range_of(np + nd0, n);
  a.p_side = range_of(0, np);
  a.d_side = range_of(np, n);
  a.alpha_zero = range_of(npos, np + nd0);

  const Vec zd = a.z_bar.diagonal();
  a.level1 = partition_values(zd, tol.cluster_rel * std::max(1.0, a.z_bar.norm()),
                              tol.zero_rel * std::max(1.0, a.z_bar.norm()));
  if (a.level1.indices(Sign::pos) != a.alpha_pos || a.level1.indices(Sign::neg) != a.alpha_neg)
    throw AssumptionError("eigenvalue labels of Zbar disagree with the strict-complementarity split");
  return a;
}

SymMatrix delta(const SdpProblem& p, const SymMatrix& z, double sigma) {
  return sym(-project_rangeA(p, psd_project(z) - p.x_feas) +
             project_rangeA_perp(p, psd_project(-z) - sigma * p.c));
}

SymMatrix delta(const KktAnchor& a, const SymMatrix& z) { return delta(a.original, z, a.sigma); }

SymMatrix delta_dd1(const KktAnchor& a, const SymMatrix& h) {
  const SymMatrix ht = a.to_working(h);
  const SymMatrix up = pi_plus_dd1_frame(a.level1, ht);
  const SymMatrix um = ht - up;
  return a.to_caller(-project_rangeA(a.problem, up) - project_rangeA_perp(a.problem, um));
}

SymMatrix delta_dd2(const KktAnchor& a, const SymMatrix& h, const SymMatrix& w) {
  const SymMatrix ht = a.to_working(h), wt = a.to_working(w);
  const SymMatrix up = pi_plus_dd2_frame(a.level1, ht, wt);
  const SymMatrix um = wt - up;
  return a.to_caller(-project_rangeA(a.problem, up) - project_rangeA_perp(a.problem, um));
}

FirstOrderRun first_order_dynamics_run(const KktAnchor& a, const SymMatrix& h0, long max_iters,
                                       double tol) {
  FirstOrderRun r;
  r.h = h0;
  for (long k = 0; k < max_iters; ++k) {
    const SymMatrix d = delta_dd1(a, r.h);
    if (d.norm() <= tol) {
      r.converged = true;
      r.iterations = k;
      return r;
    }
    r.h = sym(r.h + d);
    r.iterations = k + 1;
  }
  r.converged = delta_dd1(a, r.h).norm() <= tol;
  return r;
}

double default_member_tol(const SymMatrix& h) { return 1e-8 * (1.0 + h.norm()); }

MembershipReport cone_C_membership(const KktAnchor& a, const SymMatrix& h, double tol) {
  MembershipReport r;
  r.tol = tol < 0 ? default_member_tol(h) : tol;
  r.delta1_norm = delta_dd1(a, h).norm();
  const SymMatrix ht = a.to_working(h);
  const auto& b1 = a.alpha_pos;
  const auto& b2 = a.alpha0_p;
  const auto& b3 = a.alpha0_d;
  const auto& b4 = a.alpha_neg;
  r.forbidden_block_norm = block(ht, b1, b4).norm() + block(ht, b2, b3).norm();
  r.tangent_block_norm = block(ht, b1, b3).norm() + block(ht, b2, b4).norm();
  double psd = 0.0;
  if (!b2.empty()) psd += std::max(0.0, -Eigen::SelfAdjointEigenSolver<Mat>(block(ht, b2, b2)).eigenvalues().minCoeff());
  if (!b3.empty()) psd += std::max(0.0, Eigen::SelfAdjointEigenSolver<Mat>(block(ht, b3, b3)).eigenvalues().maxCoeff());
  r.psd_violation = psd;
  const Index n = ht.rows();
  SymMatrix u = SymMatrix::Zero(n, n), v = SymMatrix::Zero(n, n);
  auto copy = [&](SymMatrix& t, const std::vector<Index>& i, const std::vector<Index>& j) {
    set_sym_block(t, i, j, block(ht, i, j));
  };
  copy(u, b1, b1);
  copy(u, b1, b2);
  copy(u, b1, b3);
  copy(u, b2, b2);
  copy(v, b2, b4);
  copy(v, b3, b3);
  copy(v, b3, b4);
  copy(v, b4, b4);
  r.range_violation = project_rangeA(a.problem, u).norm() + project_rangeA_perp(a.problem, v).norm();
  r.structural_ok = r.forbidden_block_norm <= r.tol && r.psd_violation <= r.tol && r.range_violation <= r.tol;
  r.member = r.structural_ok && r.delta1_norm <= r.tol;
  return r;
}

bool tangent_cone_membership(const KktAnchor& a, const SymMatrix& h, double tol) {
  const MembershipReport r = cone_C_membership(a, h, tol);
  return r.member && r.tangent_block_norm <= r.tol;
}

namespace {

SymMatrix theta_w(const KktAnchor& a, const SymMatrix& hb, const SymMatrix& w) {
  SymMatrix r = pi_plus_dd1_frame(a.level1, w);
  const auto& z = a.alpha_zero;
  if (!z.empty()) set_block(r, z, z, pi_plus_dd1(block(hb, z, z), block(w, z, z)));
  return r;
}

DriftTerms drift_w(const KktAnchor& a, const SymMatrix& hb) {
  const Index n = hb.rows();
  const Vec lam = a.level1.values();
  const auto& P = a.alpha_pos;
  const auto& N = a.alpha_neg;
  const auto& Z = a.alpha_zero;
  DriftTerms d;
  d.e = SymMatrix::Zero(n, n);
  d.e_perp = SymMatrix::Zero(n, n);
  d.upsilon = SymMatrix::Zero(n, n);
  if (!Z.empty()) {
    const Mat h00 = block(hb, Z, Z);
    const Mat pp = psd_project(h00);
    const Mat pm = psd_project(-h00);
    const Mat np_ = nsd_project(h00);
    const Mat nm = nsd_project(-h00);
    for (Index i : P) {
      const Mat ha0 = block(hb, {i}, Z);
      set_sym_block(d.e, {i}, Z, -(2.0 / lam(i)) * ha0 * pm);
      set_sym_block(d.e_perp, {i}, Z, (2.0 / (-lam(i))) * ha0 * np_);
    }
    for (Index j : N) {
      const Mat h0b = block(hb, Z, {j});
      set_sym_block(d.e, Z, {j}, (2.0 / (-lam(j))) * pp * h0b);
      set_sym_block(d.e_perp, Z, {j}, -(2.0 / lam(j)) * nm * h0b);
    }
    for (Index i : P)
      for (Index j : N) {
        double s = 0.0;
        for (Index k : Z) s += hb(i, k) * hb(k, j);
        d.e(i, j) = d.e(j, i) = 2.0 / (lam(i) - lam(j)) * s;
        d.e_perp(i, j) = d.e_perp(j, i) = 2.0 / (lam(j) - lam(i)) * s;
      }
    Mat e00 = Mat::Zero(Z.size(), Z.size()), ep00 = e00, u00 = e00;
    for (Index c : P) {
      const Mat h0c = block(hb, Z, {c});
      e00 += (2.0 / lam(c)) * h0c * h0c.transpose();
    }
    for (Index c : N) {
      const Mat h0c = block(hb, Z, {c});
      ep00 += (2.0 / lam(c)) * h0c * h0c.transpose();
    }
    std::vector<Index> nz = P;
    nz.insert(nz.end(), N.begin(), N.end());
    for (Index c : nz) {
      const Mat h0c = block(hb, Z, {c});
      u00 += (2.0 / lam(c)) * h0c * h0c.transpose();
    }
    set_block(d.e, Z, Z, sym(e00));
    set_block(d.e_perp, Z, Z, sym(ep00));
    set_block(d.upsilon, Z, Z, sym(u00));
  }
  d.psi = sym(-project_rangeA(a.problem, d.e) - project_rangeA_perp(a.problem, d.e_perp));
  return d;
}

}  // namespace

std::pair<SymMatrix, SymMatrix> theta_ops(const KktAnchor& a, const SymMatrix& h_bar,
                                          const SymMatrix& w) {
  const SymMatrix hb = a.to_working(h_bar), ww = a.to_working(w);
  const SymMatrix t = theta_w(a, hb, ww);
  return {a.to_caller(t), a.to_caller(ww - t)};
}

DriftTerms drift_ops(const KktAnchor& a, const SymMatrix& h_bar) {
  require_member(a, h_bar);
  DriftTerms d = drift_w(a, a.to_working(h_bar));
  d.e = a.to_caller(d.e);
  d.e_perp = a.to_caller(d.e_perp);
  d.upsilon = a.to_caller(d.upsilon);
  d.psi = a.to_caller(d.psi);
  return d;
}

SymMatrix w_tilde(const KktAnchor& a, const SymMatrix& h_bar, const SymMatrix& w) {
  const SymMatrix hb = a.to_working(h_bar);
  const SymMatrix u = drift_w(a, hb).upsilon;
  return a.to_caller(a.to_working(w) - u);
}

LimitMapResult limit_map_iterative(const KktAnchor& a, const SymMatrix& h_bar, long max_iters,
                                   double tol) {
  require_member(a, h_bar);
  const SymMatrix hb = a.to_working(h_bar);
  const DriftTerms d = drift_w(a, hb);
  const Index n = hb.rows();
  auto step = [&](const SymMatrix& w) {
    const SymMatrix t = theta_w(a, hb, w);
    return SymMatrix(sym(project_rangeA_perp(a.problem, t) + project_rangeA(a.problem, w - t) + d.psi));
  };
  LimitMapResult r;
  r.method = LimitMethod::iterative;
  SymMatrix w = SymMatrix::Zero(n, n);
  SymMatrix prev_delta;
  // Averaged difference over a window holding at least the last half of the run.
  SymMatrix w_old = w, w_mid = w;
  long k_old = 0, k_mid = 0;
  SymMatrix delta_k = SymMatrix::Zero(n, n);
  for (long k = 1; k <= max_iters; ++k) {
    const SymMatrix wn = step(w);
    delta_k = wn - w;
    w = wn;
    if (k >= 2 * std::max<long>(k_mid, 1)) {
      w_old = w_mid;
      k_old = k_mid;
      w_mid = w;
      k_mid = k;
    }
    r.iterations_used = k;
    if (prev_delta.size() > 0 && k > k_old) {
      const double d1 = (delta_k - prev_delta).norm();
      const SymMatrix avg = (w - w_old) / static_cast<double>(k - k_old);
      const double d2 = (delta_k - avg).norm();
      r.residual_estimate = std::max(d1, d2 / 10.0);
      if (d1 <= tol && d2 <= 10.0 * tol && k - k_old >= 8) {
        r.converged = true;
        break;
      }
    }
    prev_delta = delta_k;
  }
  const SymMatrix psi = delta_k;
  const SymMatrix px = theta_w(a, hb, psi);
  r.psi_z = a.to_caller(psi);
  r.psi_x = a.to_caller(px);
  r.psi_s = a.to_caller(-(psi - px) / a.sigma);
  return r;
}

SigmaRescale sigma_rescale(const KktAnchor& a, const SymMatrix& h_bar, double sigma_new) {
  if (!(sigma_new > 0)) throw AssumptionError("sigma_new must be positive");
  require_member(a, h_bar);
  SigmaRescale out;
  out.anchor = build_anchor(a.original, a.x_in, a.s_in, a.x_sc_in, a.s_sc_in, sigma_new, a.tol);
  const SymMatrix hb = a.to_working(h_bar);
  const SymMatrix up = pi_plus_dd1_frame(a.level1, hb);
  out.h_bar = a.to_caller(up + (sigma_new / a.sigma) * (hb - up));
  const LimitMapResult base = limit_map_decoupled(a, h_bar);
  out.psi_x_pred = (sigma_new / a.sigma) * base.psi_x;
  out.psi_s_pred = (a.sigma / sigma_new) * base.psi_s;
  return out;
}

double two_homogeneity_check(const KktAnchor& a, const SymMatrix& h_bar, double t) {
  const LimitMapResult r1 = limit_map_decoupled(a, h_bar);
  const LimitMapResult rt = limit_map_decoupled(a, t * h_bar);
  const SymMatrix ref = t * t * r1.psi_z;
  const double nr = ref.norm();
  const double err = (rt.psi_z - ref).norm();
  return nr > 0 ? err / nr : err;
}

RangeReport range_inclusion_check(const KktAnchor& a, const SymMatrix& h_bar, bool primal_unique,
                                  bool dual_unique, double tol) {
  RangeReport r;
  r.uniqueness_declared = primal_unique || dual_unique;
  const LimitMapResult lm = limit_map_decoupled(a, h_bar);
  const SymMatrix psi = a.to_working(lm.psi_z);
  const auto [cp, cd] = cone_C_specs(a, false);
  const SymMatrix proj = project_onto_span(a.problem, cp, psi) + project_onto_span(a.problem, cd, psi);
  r.distance = (psi - proj).norm();
  r.included = r.distance <= tol * std::max(1.0, psi.norm());
  return r;
}

double psi_tracking_error(const KktAnchor& a, const SymMatrix& z, const SymMatrix& dz) {
  const SymMatrix d = z - a.z_bar_caller();
  const double nd = d.norm();
  const double ndz = dz.norm();
  if (ndz == 0) throw DegenerateInput("psi_tracking_error: zero step");
  if (nd == 0) return 1.0;
  const SymMatrix h = project_cone_C(a, d / nd, false);
  const SymMatrix psi = nd * nd * limit_map_decoupled(a, h).psi_z;
  return (dz - 0.5 * psi).norm() / ndz;
}

SymMatrix project_cone_C(const KktAnchor& a, const SymMatrix& g, bool tangent) {
  const SymMatrix gw = a.to_working(g);
  const auto [cp, cd] = cone_C_specs(a, tangent);
  const ConeProjection u = project_onto_cone(a.problem, cp, gw, 100000, 1e-14);
  const ConeProjection v = project_onto_cone(a.problem, cd, gw, 100000, 1e-14);
  return a.to_caller(u.x + v.x);
}

SymMatrix sample_cone_member(const KktAnchor& a, std::mt19937_64& rng, bool tangent) {
  const Index n = a.problem.n;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const SymMatrix g = a.to_caller(random_symmetric(n, rng));
    SymMatrix h = project_cone_C(a, g, tangent);
    const double nh = h.norm();
    if (nh < 1e-6) continue;
    h /= nh;
    if (!tangent) {
      const MembershipReport rep = cone_C_membership(a, h);
      if (rep.tangent_block_norm < 0.1) continue;
    }
    return h;
  }
  throw AssumptionError(tangent ? "could not sample a tangent direction"
                                : "C(Zbar) \\ T appears to be empty");
}

}  // namespace ld
