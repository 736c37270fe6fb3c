#include <benchmark/benchmark.h>

#include "bcsl/codec.hpp"
#include "bcsl/fme.hpp"
#include "bcsl/info.hpp"
#include "bcsl/orderings.hpp"
#include "bcsl/regions.hpp"
#include "bcsl/rng.hpp"

using namespace bcsl;

namespace {

std::vector<double> bsc(double p) { return {1 - p, p, p, 1 - p}; }
Channel3 wiretap() { return Channel3::from_marginals(2, bsc(0.01), 2, bsc(0.01), 2, bsc(0.1), 2); }
AuxJoint u2_is_x() { return AuxJoint(1, 2, 1, 2, {0.5, 0, 0, 0.5}); }

void BM_ConditionalMI(benchmark::State& st) {
  Rng rng(1, Stream::Search, 0);
  const std::size_t k = static_cast<std::size_t>(st.range(0));
  JointPmf j({"A", "B", "C", "D"}, {k, k, k, k}, rng.dirichlet(k * k * k * k, 1.0));
  for (auto _ : st) benchmark::DoNotOptimize(conditional_mi(j, {"A", "B"}, {"D"}, {"C"}));
}
BENCHMARK(BM_ConditionalMI)->Arg(2)->Arg(4)->Arg(8);

void BM_DeriveInnerBound(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(fme::derive_inner_bound().report.equivalent);
}
BENCHMARK(BM_DeriveInnerBound)->Unit(benchmark::kMillisecond);

void BM_MoreCapable(benchmark::State& st) {
  auto ch = Channel3::from_marginals(2, bsc(0.1), 2, bsc(0.3), 2, bsc(0.3), 2);
  for (auto _ : st) benchmark::DoNotOptimize(is_more_capable(ch, 2, 1).gap);
}
BENCHMARK(BM_MoreCapable)->Unit(benchmark::kMillisecond);

void BM_EvalInnerBound(benchmark::State& st) {
  auto ch = wiretap();
  auto aux = u2_is_x();
  for (auto _ : st) benchmark::DoNotOptimize(eval_bound(BoundId::Inner3DM, ch, aux).rows.size());
}
BENCHMARK(BM_EvalInnerBound);

void BM_Simulate(benchmark::State& st) {
  CodeConfig c;
  c.n = static_cast<int>(st.range(0));
  c.R1e = 0.3;
  c.Q2 = 0.3;
  c.eps = 1.0;
  auto ch = wiretap();
  for (auto _ : st) benchmark::DoNotOptimize(simulate(c, u2_is_x(), ch, 1000, 1, 1).errors[0]);
}
BENCHMARK(BM_Simulate)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_ExactEquivocation(benchmark::State& st) {
  CodeConfig c;
  c.n = static_cast<int>(st.range(0));
  c.R1e = 0.25;
  c.R1p = 0.5;
  c.Q2 = 0.75;
  c.eps = 1e9;
  c.seed = 1;
  auto cb = build_codebook(c, u2_is_x());
  auto ch = wiretap();
  for (auto _ : st) benchmark::DoNotOptimize(exact_equivocation(cb, ch, 1).h_w1_y3);
}
BENCHMARK(BM_ExactEquivocation)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
