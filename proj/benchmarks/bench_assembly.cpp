#include <benchmark/benchmark.h>

#include "holod/assembly.hpp"
#include "holod/model.hpp"

using namespace holod;

static void StiffnessAssembly(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const FineSpace fine{TensorMesh(2, n)};
  ModelSpec spec;
  spec.eps_cells = 32;
  spec.seed = 1;
  const Coefficient coeff = generate_coefficient(spec, 2);
  for (auto _ : state) {
    SparseMatrix A = assemble_stiffness(fine, coeff);
    benchmark::DoNotOptimize(A);
  }
  state.SetItemsProcessed(state.iterations() * fine.mesh().n_elements());
}
BENCHMARK(StiffnessAssembly)->Arg(64)->Arg(128)->Arg(256);

static void ProjectionAssembly(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  const FineSpace fine{TensorMesh(2, 128)};
  const CoarseSpace coarse{TensorMesh(2, 8), p};
  for (auto _ : state) {
    ProjectionOperator proj = assemble_projection(fine, coarse);
    benchmark::DoNotOptimize(proj);
  }
}
BENCHMARK(ProjectionAssembly)->Arg(1)->Arg(2)->Arg(3);

static void LoadAssembly(benchmark::State& state) {
  const FineSpace fine{TensorMesh(2, 128)};
  const ScalarField f1 = make_rhs(RhsSpec{RhsKind::F1, 1.0, ""});
  for (auto _ : state) {
    Eigen::VectorXd load = assemble_load(fine, f1, 4);
    benchmark::DoNotOptimize(load);
  }
}
BENCHMARK(LoadAssembly);
