#include <benchmark/benchmark.h>

#include <random>

#include "limitdyn/sdpmodel.hpp"

namespace {

ld::SdpProblem random_problem(ld::Index n, ld::Index m) {
  std::mt19937_64 rng(7);
  std::vector<ld::SymMatrix> a;
  for (ld::Index i = 0; i < m; ++i) a.push_back(ld::random_symmetric(n, rng));
  return ld::make_problem(std::move(a), ld::Vec::Ones(m), ld::random_symmetric(n, rng));
}

void BM_ApplyA(benchmark::State& st, bool parallel) {
  const auto p = random_problem(st.range(0), st.range(1));
  std::mt19937_64 rng(1);
  const ld::SymMatrix x = ld::random_symmetric(p.n, rng);
  for (auto _ : st) {
    auto v = parallel ? ld::apply_A_parallel(p, x) : ld::apply_A_serial(p, x);
    benchmark::DoNotOptimize(v.data());
  }
}

void BM_ApplyAadj(benchmark::State& st, bool parallel) {
  const auto p = random_problem(st.range(0), st.range(1));
  const ld::Vec y = ld::Vec::LinSpaced(p.m, -1.0, 1.0);
  for (auto _ : st) {
    auto v = parallel ? ld::apply_Aadj_parallel(p, y) : ld::apply_Aadj_serial(p, y);
    benchmark::DoNotOptimize(v.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(BM_ApplyA, serial, false)->Args({40, 200})->Args({80, 800});
BENCHMARK_CAPTURE(BM_ApplyA, parallel, true)->Args({40, 200})->Args({80, 800});
BENCHMARK_CAPTURE(BM_ApplyAadj, serial, false)->Args({40, 200})->Args({80, 800});
BENCHMARK_CAPTURE(BM_ApplyAadj, parallel, true)->Args({40, 200})->Args({80, 800});

BENCHMARK_MAIN();
