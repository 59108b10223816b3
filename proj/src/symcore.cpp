#include "limitdyn/symcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "limitdyn/errors.hpp"

namespace ld {

std::vector<Index> EigenPartition::indices(Sign s) const {
  std::vector<Index> out;
  for (const auto& g : groups)
    if (g.label == s) out.insert(out.end(), g.idx.begin(), g.idx.end());
  std::sort(out.begin(), out.end());
  return out;
}

bool EigenPartition::has(Sign s) const {
  for (const auto& g : groups)
    if (g.label == s) return true;
  return false;
}

Vec EigenPartition::values() const {
  Vec v(size());
  for (Index i = 0; i < size(); ++i) v(i) = groups[owner[i]].value;
  return v;
}

double default_cluster_tol(const Mat& m) { return 1e-8 * std::max(1.0, m.norm()); }
double default_zero_tol(const Mat& m) { return 1e-9 * std::max(1.0, m.norm()); }

EigenPartition partition_values(const Vec& desc, double cluster_tol, double zero_tol) {
  EigenPartition p;
  p.cluster_tol = cluster_tol;
  p.zero_tol = zero_tol;
  const Index n = desc.size();
  p.owner.assign(n, -1);
  Index start = 0;
  while (start < n) {
    Index end = start + 1;
    while (end < n && desc(end - 1) - desc(end) <= cluster_tol) ++end;
    EigenGroup g;
    double sum = 0.0;
    for (Index i = start; i < end; ++i) {
      g.idx.push_back(i);
      sum += desc(i);
    }
    g.value = sum / static_cast<double>(end - start);
    if (std::abs(g.value) <= zero_tol) {
      g.label = Sign::zero;
      g.value = 0.0;
    } else {
      g.label = g.value > 0 ? Sign::pos : Sign::neg;
    }
    for (Index i : g.idx) p.owner[i] = static_cast<int>(p.groups.size());
    p.groups.push_back(std::move(g));
    start = end;
  }
  return p;
}

std::pair<EigenDecomposition, EigenPartition> eigen_decompose(const SymMatrix& m,
                                                              double cluster_tol,
                                                              double zero_tol) {
  if (!m.allFinite()) throw EigenFailure("eigen_decompose: non-finite input of order " +
                                         std::to_string(m.rows()));
  if (cluster_tol < 0) cluster_tol = default_cluster_tol(m);
  if (zero_tol < 0) zero_tol = default_zero_tol(m);
  const Index n = m.rows();
  EigenDecomposition d;
  d.cluster_tol = cluster_tol;
  if (n == 0) {
    d.q = Mat(0, 0);
    d.lambdas = Vec(0);
    return {d, partition_values(d.lambdas, cluster_tol, zero_tol)};
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "eigensolver did not converge (order " << n << ", norm " << m.norm() << ")";
    throw EigenFailure(os.str());
  }
  d.q = es.eigenvectors().rowwise().reverse();
  d.lambdas = es.eigenvalues().reverse();
  return {d, partition_values(d.lambdas, cluster_tol, zero_tol)};
}

SymMatrix spectral_apply(const SymMatrix& m, const std::function<double(double)>& g) {
  if (m.rows() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  if (es.info() != Eigen::Success) throw EigenFailure("spectral_apply: eigensolver failure");
  Vec gl = es.eigenvalues().unaryExpr(g);
  const Mat& q = es.eigenvectors();
  return sym(q * gl.asDiagonal() * q.transpose());
}

SymMatrix psd_project(const SymMatrix& m) {
  return spectral_apply(m, [](double x) { return x > 0 ? x : 0.0; });
}

SymMatrix nsd_project(const SymMatrix& m) {
  return spectral_apply(m, [](double x) { return x < 0 ? x : 0.0; });
}

double inner(const Mat& a, const Mat& b) { return a.cwiseProduct(b).sum(); }

double angle_between(const SymMatrix& u, const SymMatrix& v) {
  const double nu = u.norm(), nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw DegenerateInput("angle_between: zero-norm argument");
  const double c = std::clamp(inner(u, v) / (nu * nv), -1.0, 1.0);
  return std::acos(c);
}

SymMatrix sym(const Mat& m) { return 0.5 * (m + m.transpose()); }

bool is_diagonal(const Mat& m, double tol) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (i != j && std::abs(m(i, j)) > tol) return false;
  return true;
}

Vec svec(const SymMatrix& m) {
  const Index n = m.rows();
  Vec v(svec_size(n));
  Index k = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) v(k++) = (i == j) ? m(i, j) : std::numbers::sqrt2 * m(i, j);
  return v;
}

SymMatrix smat(const Vec& v, Index n) {
  SymMatrix m(n, n);
  Index k = 0;
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i <= j; ++i) {
      const double x = (i == j) ? v(k) : v(k) / std::numbers::sqrt2;
      m(i, j) = x;
      m(j, i) = x;
      ++k;
    }
  return m;
}

Mat random_orthonormal(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) a(i, j) = g(rng);
  Eigen::HouseholderQR<Mat> qr(a);
  Mat q = qr.householderQ() * Mat::Identity(n, n);
  for (Index j = 0; j < n; ++j)
    if (qr.matrixQR()(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

SymMatrix random_symmetric(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Mat a(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) a(i, j) = g(rng);
  return sym(a);
}

Mat block(const Mat& m, const std::vector<Index>& r, const std::vector<Index>& c) {
  Mat b(static_cast<Index>(r.size()), static_cast<Index>(c.size()));
  for (size_t j = 0; j < c.size(); ++j)
    for (size_t i = 0; i < r.size(); ++i) b(i, j) = m(r[i], c[j]);
  return b;
}

void set_block(Mat& m, const std::vector<Index>& r, const std::vector<Index>& c, const Mat& b) {
  for (size_t j = 0; j < c.size(); ++j)
    for (size_t i = 0; i < r.size(); ++i) m(r[i], c[j]) = b(i, j);
}

void set_sym_block(Mat& m, const std::vector<Index>& r, const std::vector<Index>& c,
                   const Mat& b) {
  for (size_t j = 0; j < c.size(); ++j)
    for (size_t i = 0; i < r.size(); ++i) {
      m(r[i], c[j]) = b(i, j);
      m(c[j], r[i]) = b(i, j);
    }
}

}  // namespace ld
