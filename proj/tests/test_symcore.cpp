#include <numbers>

#include "doctest.h"
#include "helpers.hpp"
#include "limitdyn/errors.hpp"

using namespace ld;

TEST_CASE("eigen_decompose groups a diagonal matrix by sign") {
  SymMatrix m = Eigen::Vector3d(2, 0, -3).asDiagonal();
  auto [ed, part] = eigen_decompose(m, 1e-8, 1e-8);
  REQUIRE(part.groups.size() == 3);
  CHECK(part.indices(Sign::pos) == std::vector<Index>{0});
  CHECK(part.indices(Sign::zero) == std::vector<Index>{1});
  CHECK(part.indices(Sign::neg) == std::vector<Index>{2});
  CHECK(max_abs(ed.q * ed.lambdas.asDiagonal() * ed.q.transpose() - m) < 1e-14);
}

TEST_CASE("identity is a single positive group") {
  auto [ed, part] = eigen_decompose(SymMatrix::Identity(3, 3), 1e-8, 1e-8);
  REQUIRE(part.groups.size() == 1);
  CHECK(part.groups[0].label == Sign::pos);
  CHECK(part.groups[0].idx.size() == 3);
}

TEST_CASE("nearly repeated eigenvalues cluster") {
  std::mt19937_64 rng(7);
  Vec spec(5);
  spec << 1, 1 + 1e-12, 0, -2, -2;
  const SymMatrix m = with_spectrum(spec, rng);
  auto [ed, part] = eigen_decompose(m, 1e-9, 1e-9);
  REQUIRE(part.groups.size() == 3);
  CHECK(part.groups[0].idx.size() == 2);
  CHECK(part.groups[1].idx.size() == 1);
  CHECK(part.groups[1].label == Sign::zero);
  CHECK(part.groups[2].idx.size() == 2);
  CHECK((ed.q.transpose() * ed.q - Mat::Identity(5, 5)).norm() <= 5e-10);
  CHECK((ed.q * ed.lambdas.asDiagonal() * ed.q.transpose() - m).norm() <= 1e-10 * (1 + m.norm()));
}

TEST_CASE("partition covers every index once") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    const SymMatrix m = random_symmetric(6, rng);
    auto [ed, part] = eigen_decompose(m);
    std::vector<int> seen(6, 0);
    for (const auto& g : part.groups)
      for (Index i : g.idx) seen[i]++;
    for (int s : seen) CHECK(s == 1);
  }
}

TEST_CASE("semidefinite projections") {
  SymMatrix m = Eigen::Vector3d(2, 0, -3).asDiagonal();
  CHECK(max_abs(psd_project(m) - SymMatrix(Eigen::Vector3d(2, 0, 0).asDiagonal())) < 1e-15);
  CHECK(max_abs(nsd_project(m) - SymMatrix(Eigen::Vector3d(0, 0, -3).asDiagonal())) < 1e-15);

  const SymMatrix off = from_rows(2, {0, 1, 1, 0});
  CHECK(max_abs(psd_project(off) - SymMatrix::Constant(2, 2, 0.5)) < 1e-15);

  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 10; ++rep) {
    const SymMatrix r = random_symmetric(5, rng);
    const SymMatrix psd = r * r.transpose();
    CHECK(max_abs(psd_project(psd) - psd) < 1e-12 * (1 + psd.norm()));
    CHECK(max_abs(psd_project(r) + nsd_project(r) - r) < 1e-12 * (1 + r.norm()));
  }
}

TEST_CASE("angle_between") {
  std::mt19937_64 rng(5);
  const SymMatrix u = random_symmetric(3, rng);
  CHECK(angle_between(u, u) == doctest::Approx(0.0).epsilon(1e-7));
  CHECK(angle_between(u, -u) == doctest::Approx(std::numbers::pi));
  CHECK(angle_between(from_rows(2, {1, 0, 0, 0}), from_rows(2, {0, 0, 0, 1})) ==
        doctest::Approx(std::numbers::pi / 2));
  CHECK_THROWS_AS(angle_between(u, SymMatrix::Zero(3, 3)), DegenerateInput);
}

TEST_CASE("svec is an isometry") {
  std::mt19937_64 rng(9);
  const SymMatrix a = random_symmetric(4, rng), b = random_symmetric(4, rng);
  CHECK(svec(a).dot(svec(b)) == doctest::Approx(inner(a, b)));
  CHECK(svec(a).size() == svec_size(4));
  CHECK(max_abs(smat(svec(a), 4) - a) < 1e-15);
}
