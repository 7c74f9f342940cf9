#include <benchmark/benchmark.h>

#include "state_transport/gram_align.hpp"
#include "state_transport/instances.hpp"
#include "state_transport/intertwine.hpp"
#include "state_transport/random.hpp"
#include "state_transport/spectral_circle.hpp"
#include "state_transport/transport.hpp"

namespace st = state_transport;

static void BM_OpNorm(benchmark::State& state) {
  st::Rng rng(1);
  const auto n = static_cast<st::Index>(state.range(0));
  const st::Matrix a = st::ginibre(rng, n, n);
  for (auto _ : state) benchmark::DoNotOptimize(st::op_norm(a));
}
BENCHMARK(BM_OpNorm)->Arg(8)->Arg(32)->Arg(64)->Arg(256);

static void BM_GramComplete(benchmark::State& state) {
  st::Rng rng(2);
  const auto n = static_cast<st::Index>(state.range(0));
  const st::VectorFamily x = st::random_family(rng, 2 * n, n, n);
  const st::VectorFamily target = st::random_family(rng, n, n, n);
  const st::HermitianMatrix c = st::gram_matrix(target);
  for (auto _ : state) benchmark::DoNotOptimize(st::gram_complete(x, c));
}
BENCHMARK(BM_GramComplete)->Arg(4)->Arg(16);

static void BM_AlignUnitary(benchmark::State& state) {
  st::Rng rng(3);
  const st::VectorFamily x = st::random_family(rng, 16, 8, 8);
  const st::VectorFamily y(st::haar_unitary(rng, 16).matrix() * x.columns());
  for (auto _ : state) benchmark::DoNotOptimize(st::align_unitary(x, y, 1e-10));
}
BENCHMARK(BM_AlignUnitary);

static void BM_GeodesicPair(benchmark::State& state) {
  st::Rng rng(4);
  const auto d = static_cast<st::Index>(state.range(0));
  const auto xi = st::StateVector::normalized(st::random_unit_vector(rng, d));
  const auto eta = st::StateVector::normalized(st::random_unit_vector(rng, d));
  for (auto _ : state) benchmark::DoNotOptimize(st::geodesic_pair(xi, eta));
}
BENCHMARK(BM_GeodesicPair)->Arg(16)->Arg(256);

static void BM_CommutantTransport(benchmark::State& state) {
  st::Rng rng(5);
  const auto n = static_cast<st::Index>(state.range(0));
  const st::CommutantInstance inst = st::commutant_instance(rng, n, n, 0.5 * st::commutant_delta(n, n, 0.1));
  for (auto _ : state) benchmark::DoNotOptimize(st::commutant_transport(inst.units, inst.xi, inst.eta, 0.1));
}
BENCHMARK(BM_CommutantTransport)->Arg(2)->Arg(3)->Arg(4);

static void BM_ArcTransport(benchmark::State& state) {
  st::Rng rng(6);
  const st::CircleInstance inst = st::circle_instance(rng, 2, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(st::arc_transport(inst.block, inst.model, inst.xi, inst.eta, inst.block.units(), 0.1));
  }
}
BENCHMARK(BM_ArcTransport)->Unit(benchmark::kMillisecond);

static void BM_BackAndForth(benchmark::State& state) {
  st::Rng rng(7);
  const std::vector<st::Index> branching(static_cast<std::size_t>(state.range(0)), 2);
  const st::IntertwineInstance inst = st::intertwine_instance(rng, branching);
  const st::Schedule s = st::make_schedule(inst.tower, 1, 0.1, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(st::back_and_forth(inst.tower, inst.omega1, inst.omega2, inst.F, s));
  }
}
BENCHMARK(BM_BackAndForth)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
