#include <cmath>

#include "limitdyn/jetcalc.hpp"

namespace ld {

SpectralFunction max_function() {
  SpectralFunction s;
  s.f = [](double x) { return x > 0 ? x : 0.0; };
  s.d1 = [](double lam, double h) {
    if (lam > 0) return h;
    if (lam == 0) return h > 0 ? h : 0.0;
    return 0.0;
  };
  s.d2 = [](double lam, double mu, double w) {
    if (lam > 0) return w;
    if (lam < 0) return 0.0;
    if (mu > 0) return w;
    if (mu == 0) return w > 0 ? w : 0.0;
    return 0.0;
  };
  return s;
}

SpectralFunction identity_function() {
  SpectralFunction s;
  s.f = [](double x) { return x; };
  s.d1 = [](double, double h) { return h; };
  s.d2 = [](double, double, double w) { return w; };
  return s;
}

namespace {

double dd1(const SpectralFunction& F, double x, double y) { return (F.f(x) - F.f(y)) / (x - y); }

double dd2(const SpectralFunction& F, double x, double y, double z) {
  return F.f(x) / ((x - y) * (x - z)) + F.f(y) / ((y - x) * (y - z)) + F.f(z) / ((z - x) * (z - y));
}

}  // namespace

SymMatrix general_spectral_dd2(const SymMatrix& z, const SymMatrix& h, const SymMatrix& w,
                               const SpectralFunction& F, const JetTolerances& tol) {
  const ThreeLevelDescription t = build_three_level(z, h, w, tol);
  const auto& p = t.level1;
  const int ng = static_cast<int>(p.groups.size());
  const Index n = z.rows();
  Mat r = Mat::Zero(n, n);

  // Phi_a(H_aa): spectral function of f'(lambda_a; .) on the level-2 eigenvalues.
  std::vector<Mat> phi(ng);
  for (int a = 0; a < ng; ++a) {
    const auto& l2 = t.level2[a];
    const double la = p.groups[a].value;
    Vec g = l2.mu.unaryExpr([&](double mu) { return F.d1(la, mu); });
    phi[a] = l2.q * g.asDiagonal() * l2.q.transpose();
  }

  for (int a = 0; a < ng; ++a) {
    const auto& ia = p.groups[a].idx;
    const double la = p.groups[a].value;
    for (int b = a; b < ng; ++b) {
      const auto& ib = p.groups[b].idx;
      const double lb = p.groups[b].value;
      Mat blk;
      if (a != b) {
        const Mat hab = block(t.h, ia, ib);
        const Mat haa = block(t.h, ia, ia);
        const Mat hbb = block(t.h, ib, ib);
        blk = dd1(F, la, lb) * block(t.w, ia, ib);
        for (int c = 0; c < ng; ++c) {
          if (c == a || c == b) continue;
          const double lc = p.groups[c].value;
          const auto& ic = p.groups[c].idx;
          blk += 2.0 * dd2(F, la, lb, lc) * block(t.h, ia, ic) * block(t.h, ic, ib);
        }
        blk -= 2.0 * (F.f(la) - F.f(lb)) / ((la - lb) * (la - lb)) * (haa * hab - hab * hbb);
        blk += phi[a] * hab * (2.0 / (la - lb)) + (2.0 / (lb - la)) * hab * phi[b];
      } else {
        blk = Mat::Zero(ia.size(), ia.size());
        for (int c = 0; c < ng; ++c) {
          if (c == a) continue;
          const double lc = p.groups[c].value;
          const Mat hac = block(t.h, ia, p.groups[c].idx);
          blk -= 2.0 * (F.f(la) - F.f(lc)) / ((la - lc) * (la - lc)) * hac * hac.transpose();
        }
        const auto& l2 = t.level2[a];
        const Mat& vh = t.v_hat[a];
        const Index m = vh.rows();
        Mat inner_blk = Mat::Zero(m, m);
        for (Index j = 0; j < m; ++j)
          for (Index i = 0; i < m; ++i) {
            const int gi = l2.part.owner[i], gj = l2.part.owner[j];
            if (gi == gj) continue;
            const double mi = l2.part.groups[gi].value, mj = l2.part.groups[gj].value;
            inner_blk(i, j) = (F.d1(la, mi) - F.d1(la, mj)) / (mi - mj) * vh(i, j);
          }
        for (const auto& g2 : l2.part.groups) {
          const Mat vii = block(vh, g2.idx, g2.idx);
          const double mu = g2.value;
          set_block(inner_blk, g2.idx, g2.idx,
                    spectral_apply(vii, [&](double x) { return F.d2(la, mu, x); }));
        }
        blk += l2.q * inner_blk * l2.q.transpose();
      }
      set_block(r, ia, ib, blk);
      if (a != b) set_block(r, ib, ia, blk.transpose());
    }
  }
  return sym(t.q * sym(r) * t.q.transpose());
}

}  // namespace ld
