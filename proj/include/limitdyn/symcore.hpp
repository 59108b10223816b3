#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <utility>
#include <vector>

namespace ld {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

// Dense symmetric matrix. Only the structure is enforced by the functions that
// produce it (every producer symmetrizes); svec() gives the packed form.
using SymMatrix = Eigen::MatrixXd;

enum class Sign { pos, zero, neg };

struct EigenGroup {
  Sign label;
  double value;  // mean of the cluster; exactly 0 for zero groups
  std::vector<Index> idx;
};

struct EigenPartition {
  std::vector<EigenGroup> groups;
  std::vector<int> owner;  // group id of each index
  double cluster_tol = 0.0;
  double zero_tol = 0.0;

  Index size() const { return static_cast<Index>(owner.size()); }
  std::vector<Index> indices(Sign s) const;
  bool has(Sign s) const;
  // Representative eigenvalue attached to every index.
  Vec values() const;
  Sign label(Index i) const { return groups[owner[i]].label; }
};

struct EigenDecomposition {
  Mat q;        // columns are eigenvectors
  Vec lambdas;  // descending
  double cluster_tol = 0.0;
};

double default_cluster_tol(const Mat& m);
double default_zero_tol(const Mat& m);

// Clusters a descending list of eigenvalues by single linkage.
EigenPartition partition_values(const Vec& desc, double cluster_tol, double zero_tol);

// Negative tolerances select the defaults above.
std::pair<EigenDecomposition, EigenPartition> eigen_decompose(const SymMatrix& m,
                                                              double cluster_tol = -1.0,
                                                              double zero_tol = -1.0);

SymMatrix psd_project(const SymMatrix& m);
SymMatrix nsd_project(const SymMatrix& m);

// Q diag(g(lambda_i)) Q^T.
SymMatrix spectral_apply(const SymMatrix& m, const std::function<double(double)>& g);

double inner(const Mat& a, const Mat& b);
double angle_between(const SymMatrix& u, const SymMatrix& v);

SymMatrix sym(const Mat& m);
bool is_diagonal(const Mat& m, double tol = 0.0);

// Packed upper triangle, column-major, off-diagonals scaled by sqrt(2) so that
// svec(a).dot(svec(b)) == inner(a, b).
Vec svec(const SymMatrix& m);
SymMatrix smat(const Vec& v, Index n);
inline Index svec_size(Index n) { return n * (n + 1) / 2; }

Mat random_orthonormal(Index n, std::mt19937_64& rng);
SymMatrix random_symmetric(Index n, std::mt19937_64& rng);

// m(idx_r, idx_c) as a dense copy.
Mat block(const Mat& m, const std::vector<Index>& r, const std::vector<Index>& c);
void set_block(Mat& m, const std::vector<Index>& r, const std::vector<Index>& c, const Mat& b);
// Writes b at (r, c) and b^T at (c, r).
void set_sym_block(Mat& m, const std::vector<Index>& r, const std::vector<Index>& c,
                   const Mat& b);

}  // namespace ld
