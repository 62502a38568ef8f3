#include "kdb/kernel_balance.hpp"
#include "kdb/matrix_balance.hpp"
#include "kdb/rng.hpp"
#include "kdb/selection.hpp"
#include "kdb/sim.hpp"

#include <benchmark/benchmark.h>

namespace {

kdb::SymmetricMatrix random_symmetric(Eigen::Index n, std::uint64_t seed)
{
  kdb::Rng rng(seed);
  Eigen::MatrixXd c(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j)
      c(i, j) = c(j, i) = 0.1 + 9.9 * kdb::uniform01(rng);
  return kdb::SymmetricMatrix(c);
}

const kdb::GridFunction2D& density()
{
  static const auto d = kdb::distort(kdb::build_sdsd(kdb::SimScenario{}), kdb::cosine_bias);
  return d;
}

void BM_SskBalance(benchmark::State& state)
{
  const auto c = random_symmetric(state.range(0), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(kdb::ssk_balance(c).residual);
}
BENCHMARK(BM_SskBalance)->Arg(16)->Arg(64)->Arg(256);

void BM_SkBalance(benchmark::State& state)
{
  const auto c = random_symmetric(state.range(0), 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(kdb::sk_balance(c.matrix()).residual);
}
BENCHMARK(BM_SkBalance)->Arg(16)->Arg(64)->Arg(256);

void BM_MarginalKde(benchmark::State& state)
{
  const auto s = kdb::WeightedSample(kdb::sample_density(density(), static_cast<std::size_t>(state.range(0)), 3));
  const kdb::Grid1D grid(512);
  const kdb::KernelSpec spec{0.02, kdb::Boundary::reflect, 10.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(kdb::marginal_kde(s, spec, grid)[0]);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MarginalKde)->Arg(4000)->Arg(64000);

void BM_KskBalance(benchmark::State& state)
{
  const auto s = kdb::sample_density(density(), static_cast<std::size_t>(state.range(0)), 4);
  const kdb::Grid1D grid(512);
  const kdb::KernelSpec spec{0.02, kdb::Boundary::reflect, 10.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(kdb::ksk_balance(s, spec, grid).residual);
}
BENCHMARK(BM_KskBalance)->Arg(4000)->Arg(64000)->Unit(benchmark::kMillisecond);

void BM_CvmScore(benchmark::State& state)
{
  const auto s = kdb::WeightedSample(kdb::sample_density(density(), static_cast<std::size_t>(state.range(0)), 5));
  for (auto _ : state)
    benchmark::DoNotOptimize(kdb::cvm_uniform_score(s));
}
BENCHMARK(BM_CvmScore)->Arg(4000)->Arg(64000);

} // namespace

BENCHMARK_MAIN();
