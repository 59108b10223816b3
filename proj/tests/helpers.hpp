#pragma once

#include <cmath>
#include <random>

#include "limitdyn/symcore.hpp"

inline double max_abs(const ld::Mat& m) { return m.cwiseAbs().maxCoeff(); }

inline ld::SymMatrix from_rows(ld::Index n, std::initializer_list<double> v) {
  ld::Mat m(n, n);
  auto it = v.begin();
  for (ld::Index i = 0; i < n; ++i)
    for (ld::Index j = 0; j < n; ++j) m(i, j) = *it++;
  return m;
}

// Q diag(spec) Q^T for a random orthonormal Q.
inline ld::SymMatrix with_spectrum(const ld::Vec& spec, std::mt19937_64& rng) {
  const ld::Mat q = ld::random_orthonormal(spec.size(), rng);
  return ld::sym(q * spec.asDiagonal() * q.transpose());
}
