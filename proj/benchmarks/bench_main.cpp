#include <benchmark/benchmark.h>

#include <cmath>

#include "robincone/certify.hpp"
#include "robincone/fem.hpp"
#include "robincone/mesh.hpp"
#include "robincone/spectrum.hpp"

using namespace robincone;

namespace {

DomainSpec circular_cone(double R_T) {
  DomainSpec d{ConeSpec(CrossSection::latitude(M_PI / 4))};
  d.truncation_radius = R_T;
  return d;
}

MeshOptions band(double layer_h) {
  MeshOptions o;
  o.layer_h = layer_h;
  return o;
}

}  // namespace

static void BM_MeridianMesh(benchmark::State& state) {
  const DomainSpec d = circular_cone(static_cast<double>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_meridian_mesh(d, 1.0, band(0.1)).num_nodes());
}
BENCHMARK(BM_MeridianMesh)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_AssembleAxisymmetric(benchmark::State& state) {
  const Mesh mesh = build_meridian_mesh(circular_cone(static_cast<double>(state.range(0))), 1.0, band(0.1));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_axisymmetric(mesh, 1.0, 0).size());
  state.counters["nodes"] = mesh.num_nodes();
}
BENCHMARK(BM_AssembleAxisymmetric)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_CountBelow(benchmark::State& state) {
  const FormTriple f =
      assemble_axisymmetric(build_meridian_mesh(circular_cone(static_cast<double>(state.range(0))), 1.0, band(0.1)), 1.0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(count_below(f, -1.001));
  state.counters["dofs"] = f.size();
}
BENCHMARK(BM_CountBelow)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_Eigenpairs(benchmark::State& state) {
  const FormTriple f = assemble_axisymmetric(build_meridian_mesh(circular_cone(20.0), 1.0, band(0.1)), 1.0, 0);
  for (auto _ : state) benchmark::DoNotOptimize(eigenpairs_below(f, -1.001, static_cast<int>(state.range(0))).count);
}
BENCHMARK(BM_Eigenpairs)->Arg(1)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_RobinDirichlet1D(benchmark::State& state) {
  double R = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_robin_dirichlet_1d(R, 1.0, 1.0).E);
    R = R < 1e3 ? 2.0 * R : 1.0;
  }
}
BENCHMARK(BM_RobinDirichlet1D);

static void BM_TrialFamily(benchmark::State& state) {
  const ConeSpec cone(CrossSection::latitude(M_PI / 4));
  for (auto _ : state)
    benchmark::DoNotOptimize(build_trial_family(cone, 1.0, static_cast<int>(state.range(0)), 1.0).certified);
}
BENCHMARK(BM_TrialFamily)->Arg(1)->Arg(2)->Unit(benchmark::kSecond)->Iterations(1);
BENCHMARK_MAIN();
