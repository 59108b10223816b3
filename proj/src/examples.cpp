#include "limitdyn/examples.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "limitdyn/errors.hpp"

namespace ld {

namespace {

SymMatrix unit_sym(Index n, Index i, Index j) {
  SymMatrix e = SymMatrix::Zero(n, n);
  e(i, j) = 1.0;
  e(j, i) = 1.0;
  return e;
}

SymMatrix diag(std::initializer_list<double> v) {
  Vec d(static_cast<Index>(v.size()));
  Index k = 0;
  for (double x : v) d(k++) = x;
  return d.asDiagonal();
}

void need(const std::vector<double>& p, size_t k, const char* toy) {
  if (p.size() != k)
    throw AssumptionError(std::string(toy) + ": expected " + std::to_string(k) + " parameters");
}

// psi_x lives in ker A and -sigma psi_s in range A^*, so psi_z splits orthogonally.
PsiTriple split_psi(const SdpProblem& p, const SymMatrix& psi_z, double sigma) {
  PsiTriple t;
  t.z = psi_z;
  t.x = project_rangeA_perp(p, psi_z);
  t.s = -project_rangeA(p, psi_z) / sigma;
  return t;
}

}  // namespace

ToyOracle toy1() {
  ToyOracle t;
  t.id = 1;
  t.name = "toy1";
  SymMatrix a1(2, 2);
  a1 << 0, 1, 1, -1;
  t.problem = make_problem({a1}, Vec::Zero(1), diag({0, 1}));
  t.x_bar = SymMatrix::Zero(2, 2);
  t.s_bar = diag({0, 1});
  t.x_sc = diag({1, 0});
  t.s_sc = diag({0, 1});
  t.dual_unique = true;
  t.param_names = {"a", "b"};
  t.default_params = {1.0, 1.0};
  t.h_bar = [](const std::vector<double>& p) {
    need(p, 2, "toy1");
    if (p[0] < 0) throw AssumptionError("toy1: a must be nonnegative");
    SymMatrix h(2, 2);
    h << p[0], p[1], p[1], -p[1];
    return h;
  };
  t.oracle_psi = [](const std::vector<double>& p, double s) {
    need(p, 2, "toy1");
    if (p[0] < 0) throw AssumptionError("toy1: a must be nonnegative");
    const double a = p[0], b = p[1];
    PsiTriple r;
    r.x = SymMatrix::Zero(2, 2);
    r.x(0, 0) = 2 * b * b / s;
    r.s.resize(2, 2);
    const double c = 4 * a * b / (3 * s * s);
    r.s << 0, c, c, -c;
    r.z = r.x - s * r.s;
    return r;
  };
  t.in_tangent = [](const std::vector<double>& p) { return p[1] == 0.0; };
  return t;
}

ToyOracle toy2() {
  ToyOracle t;
  t.id = 2;
  t.name = "toy2";
  t.problem = make_problem({SymMatrix::Identity(3, 3), unit_sym(3, 1, 2)}, Vec::Unit(2, 0),
                           diag({0, 0, 1}));
  t.x_bar = diag({1, 0, 0});
  t.s_bar = diag({0, 0, 1});
  t.x_sc = diag({0.5, 0.5, 0});
  t.s_sc = diag({0, 0, 1});
  t.dual_unique = true;
  t.param_names = {"H12", "H22", "H23"};
  t.default_params = {1.0, 1.0, 1.0};
  t.h_bar = [](const std::vector<double>& p) {
    need(p, 3, "toy2");
    if (p[1] < 0) throw AssumptionError("toy2: H22 must be nonnegative");
    SymMatrix h(3, 3);
    h << -p[1], p[0], 0, p[0], p[1], p[2], 0, p[2], 0;
    return h;
  };
  t.oracle_psi = [](const std::vector<double>& p, double s) {
    need(p, 3, "toy2");
    if (p[1] < 0) throw AssumptionError("toy2: H22 must be nonnegative");
    const double h22 = p[1], h23 = p[2];
    PsiTriple r;
    r.x = (h23 * h23 / s) * diag({-1, 1, 0});
    r.s = (2 * h22 * h23 / (s * s)) * unit_sym(3, 1, 2);
    r.z = r.x - s * r.s;
    return r;
  };
  t.in_tangent = [](const std::vector<double>& p) { return p[2] == 0.0; };
  return t;
}

ToyOracle toy3() {
  ToyOracle t;
  t.id = 3;
  t.name = "toy3";
  const Index n = 6;
  Mat q(3, 3);
  q.col(0) = Vec::Constant(3, 1.0 / std::sqrt(3.0));
  q.col(1) << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0), 0.0;
  q.col(2) << 1.0 / std::sqrt(6.0), 1.0 / std::sqrt(6.0), -2.0 / std::sqrt(6.0);
  auto embed3 = [&](std::initializer_list<double> d) {
    SymMatrix m = SymMatrix::Zero(n, n);
    m.topLeftCorner(3, 3) = sym(q.transpose() * diag(d) * q);
    return m;
  };
  std::vector<SymMatrix> a;
  a.push_back(SymMatrix::Identity(n, n));
  a.push_back(embed3({1, -1, 0}));
  a.push_back(embed3({1, 0, -1}));
  a.push_back(diag({0, 0, 0, 1, -1, 0}));
  a.push_back(diag({0, 0, 0, 0, 1, -1}));
  const std::pair<int, int> units[] = {{2, 4}, {2, 5}, {2, 6}, {3, 4}, {3, 5},
                                       {3, 6}, {4, 5}, {4, 6}, {5, 6}, {1, 6}};
  for (auto [i, j] : units) a.push_back(unit_sym(n, i - 1, j - 1));
  Vec b = Vec::Zero(15);
  b(0) = 6;
  t.problem = make_problem(std::move(a), b, diag({0, 0, 0, 1, 1, 1}));
  t.x_bar = diag({6, 0, 0, 0, 0, 0});
  t.s_bar = diag({0, 0, 0, 0, 0, 3});
  t.x_sc = 2 * diag({1, 1, 1, 0, 0, 0});
  t.s_sc = diag({0, 0, 0, 1, 1, 1});
  t.param_names = {"h", "eps"};
  t.default_params = {2.0, 0.0};
  t.h_bar = [](const std::vector<double>& p) {
    need(p, 2, "toy3");
    const double h = p[0], e = p[1];
    if (e < 0) throw AssumptionError("toy3: eps must be nonnegative");
    SymMatrix m = SymMatrix::Zero(6, 6);
    m(0, 0) = -1;
    m(0, 2) = -std::sqrt(2.0) / 4;
    m(0, 3) = 1;
    m(0, 4) = h;
    m(1, 1) = 1;
    m(3, 3) = -e;
    m(4, 4) = -1;
    for (int i = 1; i <= 4; ++i) m(i, 5) = 1;
    m(5, 5) = 1 + e;
    return SymMatrix(m.selfadjointView<Eigen::Upper>());
  };
  const SdpProblem prob = t.problem;
  t.oracle_psi = [prob](const std::vector<double>& p, double s) {
    need(p, 2, "toy3");
    const double h = p[0], e = p[1];
    if (e < 0) throw AssumptionError("toy3: eps must be nonnegative");
    const double r2 = std::sqrt(2.0);
    const bool jump = e == 0.0 && h * h - 2.0 > 1e-12;
    SymMatrix m = SymMatrix::Zero(6, 6);
    m(0, 0) = -4 / (9 * s);
    m(0, 1) = -2 * r2 / (9 * s);
    m(0, 3) = -e / 3;
    m(0, 4) = -h / 3;
    m(1, 1) = 2 / (9 * s);
    m(1, 2) = 4 / (9 * s);
    m(2, 2) = 2 / (9 * s);
    m(2, 4) = r2 * h / 12;
    m(3, 3) = (h * h - 2) / 9;
    m(3, 4) = -h / 3;
    m(4, 4) = -(2 * h * h - 1) / 9;
    m(1, 5) = -2 / (3 * s);
    m(5, 5) = (h * h + 1) / 9;
    // For eps > 0 the (3,4) entry lies in the free (beta_0^P, beta_-) block of
    // the dual polar cone and picks up -E_34; the (4,6) entry of E is zero
    // because Pi_+(Hbar_00) annihilates the -eps direction.
    if (e > 0) m(2, 3) = r2 / 12;
    if (jump) {
      m(0, 3) = 0;
      m(3, 3) = 0;
      m(4, 4) = -h * h / 6;
      m(5, 5) = h * h / 6;
    }
    return split_psi(prob, SymMatrix(m.selfadjointView<Eigen::Upper>()), s);
  };
  t.in_tangent = [](const std::vector<double>&) { return false; };
  return t;
}

ToyOracle toy_by_id(int id) {
  switch (id) {
    case 1: return toy1();
    case 2: return toy2();
    case 3: return toy3();
  }
  throw AssumptionError("unknown toy " + std::to_string(id) + " (expected 1, 2 or 3)");
}

std::string to_sdpa(const SdpProblem& p) {
  std::ostringstream os;
  char buf[64];
  os << p.m << "\n1\n" << p.n << "\n";
  for (Index i = 0; i < p.m; ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", p.b(i));
    os << (i ? " " : "") << buf;
  }
  os << "\n";
  auto dump = [&](long matno, const SymMatrix& m) {
    for (Index i = 0; i < p.n; ++i)
      for (Index j = i; j < p.n; ++j)
        if (m(i, j) != 0.0) {
          std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
          os << matno << " 1 " << i + 1 << " " << j + 1 << " " << buf << "\n";
        }
  };
  dump(0, p.c);
  for (Index k = 0; k < p.m; ++k) dump(k + 1, p.a_mats[k]);
  return os.str();
}

}  // namespace ld
