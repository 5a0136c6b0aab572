#include <benchmark/benchmark.h>

#include <random>

#include "holod/linalg.hpp"

using namespace holod;

namespace {

SparseMatrix laplacian_1d(int n) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < n; ++i) {
    triplets.emplace_back(i, i, 2.0 * n);
    if (i > 0) {
      triplets.emplace_back(i, i - 1, -1.0 * n);
      triplets.emplace_back(i - 1, i, -1.0 * n);
    }
  }
  SparseMatrix A(n, n);
  A.setFromTriplets(triplets.begin(), triplets.end());
  return A;
}

SparseMatrix random_constraints(int m, int n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  std::vector<Eigen::Triplet<double>> triplets;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; j += 7) {
      triplets.emplace_back(i, (j + i) % n, dist(rng));
    }
  }
  SparseMatrix B(m, n);
  B.setFromTriplets(triplets.begin(), triplets.end());
  return B;
}

}  // namespace

static void SchurSetup(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = n / 16;
  const SparseMatrix A = laplacian_1d(n);
  const SparseMatrix B = random_constraints(m, n, 42);
  for (auto _ : state) {
    SchurKktSolver solver(A, B, 1);
    benchmark::DoNotOptimize(solver);
  }
}
BENCHMARK(SchurSetup)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

static void SchurSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int m = n / 16;
  const SparseMatrix A = laplacian_1d(n);
  const SparseMatrix B = random_constraints(m, n, 42);
  const SchurKktSolver solver(A, B, 1);
  const Vector c = Vector::Zero(n);
  Vector g = Vector::Zero(m);
  g[0] = 1.0;
  for (auto _ : state) {
    KktSolution sol = solver.solve(c, g);
    benchmark::DoNotOptimize(sol);
  }
}
BENCHMARK(SchurSolve)->Arg(512)->Arg(2048);
