#include "limitdyn/jetcalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ld {

namespace {

double cl_tol(const Mat& m, const JetTolerances& t) { return t.cluster_rel * std::max(1.0, m.norm()); }
double zr_tol(const Mat& m, const JetTolerances& t) { return t.zero_rel * std::max(1.0, m.norm()); }

void note_conditioning(const EigenPartition& p, double znorm, JetDiagnostics* diag) {
  if (!diag) return;
  double md = std::numeric_limits<double>::infinity();
  for (const auto& a : p.groups) {
    if (a.label != Sign::zero) md = std::min(md, std::abs(a.value));
    for (const auto& b : p.groups)
      if (a.label != b.label && &a != &b) md = std::min(md, std::abs(a.value - b.value));
  }
  diag->min_denominator = md;
  diag->ill_conditioned = md < 1e-6 * znorm;
}

}  // namespace

Mat v_block(const EigenPartition& p, const Mat& h, const Mat& w, int k) {
  const auto& ik = p.groups[k].idx;
  Mat v = block(w, ik, ik);
  for (int l = 0; l < static_cast<int>(p.groups.size()); ++l) {
    if (l == k) continue;
    const auto& il = p.groups[l].idx;
    Mat hkl = block(h, ik, il);
    v += (2.0 / (p.groups[k].value - p.groups[l].value)) * hkl * hkl.transpose();
  }
  return sym(v);
}

SymMatrix pi_plus_dd1_frame(const EigenPartition& p, const Mat& h, const JetTolerances& tol) {
  const Index n = p.size();
  const Vec lam = p.values();
  SymMatrix r = SymMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) {
      const Sign si = p.label(i), sj = p.label(j);
      if (si == Sign::neg && sj == Sign::neg) continue;
      if (si == Sign::zero && sj == Sign::zero) continue;
      if (si == Sign::neg || sj == Sign::neg) {
        if (si == Sign::pos) r(i, j) = lam(i) / (lam(i) - lam(j)) * h(i, j);
        else if (sj == Sign::pos) r(i, j) = lam(j) / (lam(j) - lam(i)) * h(i, j);
        continue;
      }
      r(i, j) = h(i, j);
    }
  const auto z = p.indices(Sign::zero);
  if (!z.empty()) {
    Mat h00 = block(h, z, z);
    (void)tol;
    set_block(r, z, z, psd_project(h00));
  }
  return r;
}

SymMatrix pi_plus_dd2_frame(const EigenPartition& p, const Mat& h, const Mat& w,
                            const JetTolerances& tol) {
  const Index n = p.size();
  const Vec lam = p.values();
  const auto P = p.indices(Sign::pos);
  const auto Z = p.indices(Sign::zero);
  const auto N = p.indices(Sign::neg);
  SymMatrix r = SymMatrix::Zero(n, n);

  // (+,+)
  for (Index a : P)
    for (Index b : P) {
      if (b < a) continue;
      double s = w(a, b);
      for (Index c : N) s += 2.0 * (-lam(c)) / ((lam(c) - lam(a)) * (lam(c) - lam(b))) * h(a, c) * h(c, b);
      r(a, b) = s;
      r(b, a) = s;
    }

  // (-,-)
  for (Index a : N)
    for (Index b : N) {
      if (b < a) continue;
      double s = 0.0;
      for (Index c : P) s += 2.0 * lam(c) / ((lam(c) - lam(a)) * (lam(c) - lam(b))) * h(a, c) * h(c, b);
      r(a, b) = s;
      r(b, a) = s;
    }

  // (+,-)
  for (Index a : P)
    for (Index b : N) {
      double s = lam(a) / (lam(a) - lam(b)) * w(a, b);
      for (Index c : P) s += 2.0 * (-lam(b)) / ((lam(b) - lam(a)) * (lam(b) - lam(c))) * h(a, c) * h(c, b);
      for (Index k : Z) s += 2.0 / (lam(a) - lam(b)) * h(a, k) * h(k, b);
      for (Index c : N) s += 2.0 * lam(a) / ((lam(a) - lam(b)) * (lam(a) - lam(c))) * h(a, c) * h(c, b);
      r(a, b) = s;
      r(b, a) = s;
    }

  if (!Z.empty()) {
    const Mat h00 = block(h, Z, Z);
    const Mat pp = psd_project(h00);
    const Mat pm = psd_project(-h00);

    // (+,0)
    for (Index a : P) {
      Vec row(Z.size());
      for (size_t q = 0; q < Z.size(); ++q) {
        double s = w(a, Z[q]);
        for (Index c : N) s += 2.0 / (lam(a) - lam(c)) * h(a, c) * h(c, Z[q]);
        row(q) = s;
      }
      Vec ha0(Z.size());
      for (size_t q = 0; q < Z.size(); ++q) ha0(q) = h(a, Z[q]);
      row -= (2.0 / lam(a)) * (pm * ha0);
      for (size_t q = 0; q < Z.size(); ++q) {
        r(a, Z[q]) = row(q);
        r(Z[q], a) = row(q);
      }
    }

    // (0,-)
    for (Index b : N) {
      Vec col(Z.size());
      for (size_t q = 0; q < Z.size(); ++q) {
        double s = 0.0;
        for (Index c : P) s += 2.0 / (lam(c) - lam(b)) * h(Z[q], c) * h(c, b);
        col(q) = s;
      }
      Vec h0b(Z.size());
      for (size_t q = 0; q < Z.size(); ++q) h0b(q) = h(Z[q], b);
      col += (2.0 / (-lam(b))) * (pp * h0b);
      for (size_t q = 0; q < Z.size(); ++q) {
        r(Z[q], b) = col(q);
        r(b, Z[q]) = col(q);
      }
    }

    // (0,0)
    Mat v0 = block(w, Z, Z);
    Mat e00 = Mat::Zero(Z.size(), Z.size());
    for (Index c : P) {
      Vec hc = block(h, Z, {c});
      e00 += (2.0 / lam(c)) * hc * hc.transpose();
    }
    Mat u = e00;
    for (Index c : N) {
      Vec hc = block(h, Z, {c});
      u += (2.0 / lam(c)) * hc * hc.transpose();
    }
    v0 -= u;
    const Mat inner00 = pi_plus_dd1(h00, sym(v0), tol);
    set_block(r, Z, Z, sym(e00 + inner00));
  }
  return r;
}

SymMatrix pi_plus_dd1(const SymMatrix& z, const SymMatrix& h, const JetTolerances& tol,
                      JetDiagnostics* diag) {
  auto [d, p] = eigen_decompose(z, cl_tol(z, tol), zr_tol(z, tol));
  note_conditioning(p, z.norm(), diag);
  const Mat ht = sym(d.q.transpose() * h * d.q);
  return sym(d.q * pi_plus_dd1_frame(p, ht, tol) * d.q.transpose());
}

SymMatrix pi_minus_dd1(const SymMatrix& z, const SymMatrix& h, const JetTolerances& tol) {
  return h - pi_plus_dd1(z, h, tol);
}

SymMatrix pi_plus_dd2(const SymMatrix& z, const SymMatrix& h, const SymMatrix& w,
                      const JetTolerances& tol, JetDiagnostics* diag) {
  auto [d, p] = eigen_decompose(z, cl_tol(z, tol), zr_tol(z, tol));
  note_conditioning(p, z.norm(), diag);
  const Mat ht = sym(d.q.transpose() * h * d.q);
  const Mat wt = sym(d.q.transpose() * w * d.q);
  return sym(d.q * pi_plus_dd2_frame(p, ht, wt, tol) * d.q.transpose());
}

SymMatrix pi_minus_dd2(const SymMatrix& z, const SymMatrix& h, const SymMatrix& w,
                       const JetTolerances& tol) {
  return w - pi_plus_dd2(z, h, w, tol);
}

ThreeLevelDescription build_three_level(const SymMatrix& z, const SymMatrix& h,
                                        const SymMatrix& w, const JetTolerances& tol) {
  ThreeLevelDescription t;
  auto [d, p] = eigen_decompose(z, cl_tol(z, tol), zr_tol(z, tol));
  t.q = d.q;
  t.lambda = d.lambdas;
  t.level1 = p;
  t.h = sym(d.q.transpose() * h * d.q);
  t.w = sym(d.q.transpose() * w * d.q);
  const int ng = static_cast<int>(p.groups.size());
  for (int k = 0; k < ng; ++k) {
    const auto& ik = p.groups[k].idx;
    const Mat hkk = block(t.h, ik, ik);
    auto [d2, p2] = eigen_decompose(hkk, cl_tol(hkk, tol), zr_tol(hkk, tol));
    Level2 l2;
    l2.group = k;
    l2.q = d2.q;
    l2.mu = p2.values();
    l2.part = p2;
    t.level2.push_back(l2);
    const Mat vk = v_block(p, t.h, t.w, k);
    t.v_blocks.push_back(vk);
    const Mat vh = sym(d2.q.transpose() * vk * d2.q);
    t.v_hat.push_back(vh);
    for (int i = 0; i < static_cast<int>(p2.groups.size()); ++i) {
      if (p2.groups[i].label != Sign::zero) continue;
      const auto& bi = p2.groups[i].idx;
      const Mat vii = block(vh, bi, bi);
      auto [d3, p3] = eigen_decompose(vii, cl_tol(vii, tol), zr_tol(vii, tol));
      Level3 l3;
      l3.group = k;
      l3.subgroup = i;
      l3.q = d3.q;
      l3.nu = p3.values();
      l3.part = p3;
      t.level3.push_back(l3);
    }
  }
  return t;
}

}  // namespace ld
