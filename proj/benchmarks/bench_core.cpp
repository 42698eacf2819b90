#include <benchmark/benchmark.h>

#include "geocomplete/completeness.hpp"
#include "geocomplete/flows.hpp"
#include "geocomplete/integrate.hpp"
#include "geocomplete/presets.hpp"

using namespace geocomplete;

namespace {

QuadraticField preset_field(const char* name) {
  Preset p = get_preset(name);
  return euler_field_dual(p.algebra, QuadraticForm3(p.metric));
}

void BM_FieldEvaluate(benchmark::State& state) {
  QuadraticField F = preset_field("example3");
  Vec3 x(0.3, -0.7, 1.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(F.evaluate(x));
  }
}
BENCHMARK(BM_FieldEvaluate);

void BM_BuildDualField(benchmark::State& state) {
  Preset p = get_preset("example2");
  QuadraticForm3 metric(p.metric);
  for (auto _ : state) {
    benchmark::DoNotOptimize(euler_field_dual(p.algebra, metric));
  }
}
BENCHMARK(BM_BuildDualField);

void BM_IntegrateBoundedOrbit(benchmark::State& state) {
  QuadraticField F = preset_field("example3");
  Vec3 y0(1, 1, 1);
  IntegrateOptions opt;
  opt.dense = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate(F, y0, 50.0, opt));
  }
}
BENCHMARK(BM_IntegrateBoundedOrbit);

void BM_FindIdempotents(benchmark::State& state) {
  QuadraticField F = preset_field("example4");
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_idempotents(F));
  }
}
BENCHMARK(BM_FindIdempotents);

void BM_FirstIntegrals(benchmark::State& state) {
  QuadraticField F = preset_field("example3");
  for (auto _ : state) {
    benchmark::DoNotOptimize(quadratic_first_integrals(F));
  }
}
BENCHMARK(BM_FirstIntegrals);

void BM_Decide(benchmark::State& state) {
  Preset p = get_preset("example3");
  QuadraticForm3 metric(p.metric);
  for (auto _ : state) {
    benchmark::DoNotOptimize(decide(p.algebra, metric));
  }
}
BENCHMARK(BM_Decide);

}  // namespace

BENCHMARK_MAIN();
