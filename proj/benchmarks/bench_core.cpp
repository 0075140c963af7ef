#include <benchmark/benchmark.h>

#include "steinlab/corpus.hpp"
#include "steinlab/crossed.hpp"
#include "steinlab/derivations.hpp"
#include "steinlab/vndim.hpp"

using namespace steinlab;

namespace {

AlgebraPtr matrix_algebra(int n) { return std::make_shared<const FDAlgebra>(multimatrix({{n, 1.0}})); }

void BM_DerivationSpaceBlocks(benchmark::State& st) {
  const auto a = matrix_algebra(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(derivation_space(a).size());
}
BENCHMARK(BM_DerivationSpaceBlocks)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_DerivationSpacePlain(benchmark::State& st) {
  const auto a = matrix_algebra(static_cast<int>(st.range(0)));
  SolveOptions o;
  o.use_blocks = false;
  for (auto _ : st) benchmark::DoNotOptimize(derivation_space(a, o).size());
}
BENCHMARK(BM_DerivationSpacePlain)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

void BM_VnDimension(benchmark::State& st) {
  const auto a = matrix_algebra(static_cast<int>(st.range(0)));
  const DerivationSpace s = derivation_space(a);
  const auto x = hermitian_generators(*a);
  for (auto _ : st) benchmark::DoNotOptimize(vn_dimension(phi_x(s, x)).value);
}
BENCHMARK(BM_VnDimension)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_CrossedSchreier(benchmark::State& st) {
  const auto m2 = matrix_algebra(2);
  Vec u = Vec::Zero(4);
  u(0) = 1.0;
  u(3) = -1.0;
  const GroupAction act = ad_action(m2, cyclic_group(2), u);
  for (auto _ : st) {
    const CrossedContext c = make_crossed(act);
    benchmark::DoNotOptimize(vn_dimension(phi_x(derivation_space(c.product), hermitian_generators(*c.product))).value);
  }
}
BENCHMARK(BM_CrossedSchreier)->Unit(benchmark::kMillisecond);

void BM_CorpusEntry(benchmark::State& st) {
  const auto corpus = builtin_corpus();
  const ExperimentSpec& spec = corpus[static_cast<std::size_t>(st.range(0))];
  st.SetLabel(spec.label);
  for (auto _ : st) benchmark::DoNotOptimize(run(spec, std::nullopt, 7).rows.size());
}
BENCHMARK(BM_CorpusEntry)->Arg(5)->Arg(6)->Arg(14)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
