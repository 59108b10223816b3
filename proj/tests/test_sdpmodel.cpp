#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "limitdyn/errors.hpp"
#include "limitdyn/examples.hpp"
#include "limitdyn/sdpmodel.hpp"

using namespace ld;

namespace {

SdpProblem random_problem(Index n, Index m, std::mt19937_64& rng) {
  std::vector<SymMatrix> a;
  for (Index i = 0; i < m; ++i) a.push_back(random_symmetric(n, rng));
  return make_problem(a, Vec::Random(m), random_symmetric(n, rng));
}

bool same_problem(const SdpProblem& x, const SdpProblem& y, double tol) {
  if (x.n != y.n || x.m != y.m) return false;
  if ((x.b - y.b).cwiseAbs().maxCoeff() > tol || max_abs(x.c - y.c) > tol) return false;
  for (Index i = 0; i < x.m; ++i)
    if (max_abs(x.a_mats[i] - y.a_mats[i]) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("constraint operator and adjoint") {
  const ToyOracle t1 = toy1();
  CHECK(apply_A(t1.problem, SymMatrix::Zero(2, 2)).norm() == 0.0);
  CHECK(apply_A(t1.problem, t1.problem.a_mats[0])(0) == doctest::Approx(3.0));

  std::mt19937_64 rng(21);
  const SdpProblem p = random_problem(5, 7, rng);
  for (int rep = 0; rep < 100; ++rep) {
    const SymMatrix x = random_symmetric(5, rng);
    const Vec y = Vec::Random(7);
    CHECK(apply_A(p, x).dot(y) == doctest::Approx(inner(x, apply_Aadj(p, y))));
  }
  CHECK_THROWS_AS(apply_A(p, SymMatrix::Zero(4, 4)), DimensionError);
  CHECK_THROWS_AS(apply_Aadj(p, Vec::Zero(3)), DimensionError);
}

TEST_CASE("parallel kernels match the serial references") {
  std::mt19937_64 rng(22);
  const SdpProblem p = random_problem(30, 120, rng);
  const SymMatrix x = random_symmetric(30, rng);
  const Vec y = Vec::Random(120);
  CHECK((apply_A_parallel(p, x) - apply_A_serial(p, x)).norm() < 1e-10);
  CHECK(max_abs(apply_Aadj_parallel(p, y) - apply_Aadj_serial(p, y)) < 1e-10);
}

TEST_CASE("range projections") {
  const ToyOracle t1 = toy1();
  const SdpProblem& p = t1.problem;
  CHECK(max_abs(project_rangeA(p, p.a_mats[0]) - p.a_mats[0]) < 1e-15);
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 10; ++rep) {
    const SymMatrix x = random_symmetric(2, rng);
    const SymMatrix expect = (2 * x(0, 1) - x(1, 1)) / 3.0 * p.a_mats[0];
    CHECK(max_abs(project_rangeA(p, x) - expect) < 1e-14);
    CHECK(max_abs(project_rangeA(p, x) + project_rangeA_perp(p, x) - x) < 1e-15);
  }
  CHECK_THROWS_AS(make_problem({p.a_mats[0], 2 * p.a_mats[0]}, Vec::Zero(2), p.c), AssumptionError);
}

TEST_CASE("KKT residuals") {
  const ToyOracle t1 = toy1();
  Iterate kkt{t1.x_bar, Vec::Zero(1), t1.s_bar, 1.0};
  const KktResiduals r = kkt_residuals(t1.problem, kkt);
  CHECK(r.r_max <= 1e-12);

  const ToyOracle t2 = toy2();
  Iterate zero{SymMatrix::Zero(3, 3), Vec::Zero(2), SymMatrix::Zero(3, 3), 1.0};
  CHECK(kkt_residuals(t2.problem, zero).r_p == doctest::Approx(0.5));
  Iterate twice{2 * t2.x_bar, Vec::Zero(2), t2.s_bar, 1.0};
  CHECK(kkt_residuals(t2.problem, twice).r_p == doctest::Approx(0.5));
  CHECK(recover_y(t2.problem, t2.s_bar).norm() < 1e-14);
}

TEST_CASE("congruence transform") {
  const ToyOracle t2 = toy2();
  CHECK(same_problem(congruence_transform(t2.problem, Mat::Identity(3, 3)), t2.problem, 0.0));
  std::mt19937_64 rng(24);
  const Mat q = random_orthonormal(3, rng);
  const SdpProblem back = congruence_transform(congruence_transform(t2.problem, q), q.transpose());
  CHECK(same_problem(back, t2.problem, 1e-12));
  CHECK_THROWS_AS(congruence_transform(t2.problem, 2 * Mat::Identity(3, 3)), AssumptionError);
}

TEST_CASE("row rescaling") {
  const ToyOracle t3 = toy3();
  const SdpProblem r = rescale_rows(t3.problem);
  for (Index i = 0; i < r.m; ++i) CHECK(r.a_mats[i].norm() == doctest::Approx(1.0));
  CHECK(r.b(0) == doctest::Approx(6.0 / std::sqrt(6.0)));
}

TEST_CASE("SDPA round trip of the toy serializations") {
  for (int id = 1; id <= 3; ++id) {
    const ToyOracle t = toy_by_id(id);
    std::istringstream in(to_sdpa(t.problem));
    CHECK(same_problem(parse_sdpa(in), t.problem, 0.0));
  }
}

TEST_CASE("SDPA with comments and braces") {
  std::istringstream in(
      "\"toy2\"\n* comment\n2 = m\n1\n3\n{1, 0}\n"
      "0 1 3 3 1\n1 1 1 1 1\n1 1 2 2 1\n1 1 3 3 1\n2 1 2 3 1\n");
  CHECK(same_problem(parse_sdpa(in), toy2().problem, 0.0));
}

TEST_CASE("SDPA errors") {
  std::istringstream two_blocks("1\n2\n2 2\n1\n1 1 1 1 1\n");
  CHECK_THROWS_AS(parse_sdpa(two_blocks), UnsupportedStructure);

  std::istringstream lower("1\n1\n2\n1\n1 1 2 1 1\n");
  try {
    parse_sdpa(lower);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 5);
  }
  std::istringstream garbage("1\n1\n2\n1\n1 1 x 1 1\n");
  CHECK_THROWS_AS(parse_sdpa(garbage), ParseError);
  CHECK_THROWS_AS(load_sdpa("/nonexistent/file.dat-s"), IoError);
}
