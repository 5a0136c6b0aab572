#include <benchmark/benchmark.h>

#include "holod/correctors.hpp"
#include "holod/model.hpp"
#include "holod/parallel.hpp"

using namespace holod;

namespace {

struct Fixture {
  FineSpace fine;
  CoarseSpace coarse;
  SparseMatrix stiffness;
  ProjectionOperator projection;

  Fixture(int n_H, int n_h, int p)
      : fine(TensorMesh(2, n_h)),
        coarse(TensorMesh(2, n_H), p),
        stiffness(assemble_stiffness(
            fine, [] {
              ModelSpec spec;
              spec.eps_cells = 32;
              spec.seed = 1;
              return generate_coefficient(spec, 2);
            }())),
        projection(assemble_projection(fine, coarse)) {}
};

}  // namespace

static void ElementCorrector(benchmark::State& state) {
  const int ell = static_cast<int>(state.range(0));
  static Fixture fx(8, 64, 1);
  const int K = fx.coarse.mesh().element_at({3, 3});
  for (auto _ : state) {
    ElementBasis basis = compute_element_basis(K, fx.fine, fx.coarse,
                                               fx.stiffness, fx.projection,
                                               {ell, 1, 200000});
    benchmark::DoNotOptimize(basis);
  }
}
BENCHMARK(ElementCorrector)->DenseRange(1, 3);

static void FullBasis(benchmark::State& state) {
  const int p = static_cast<int>(state.range(0));
  Fixture fx(8, 64, p);
  for (auto _ : state) {
    CorrectorBasis basis = compute_localized_basis(
        fx.fine, fx.coarse, fx.stiffness, fx.projection,
        {2, default_thread_count(), 200000});
    benchmark::DoNotOptimize(basis);
  }
  state.SetItemsProcessed(state.iterations() *
                          fx.coarse.mesh().n_elements());
}
BENCHMARK(FullBasis)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
