#include <cenn/builders.hpp>
#include <cenn/compilation.hpp>
#include <cenn/constraints.hpp>
#include <cenn/equivariance.hpp>
#include <cenn/uat.hpp>

#include <benchmark/benchmark.h>

using namespace cenn;

namespace {

GroupCategory s3_setting() {
  const auto s3 = FiniteGroup::symmetric(3);
  return build_group_category(s3, GroupAction::natural(s3, 3), regular_rep(s3), regular_rep(s3));
}

void BM_AssembleIN(benchmark::State& state) {
  const auto s = s3_setting();
  for (auto _ : state) benchmark::DoNotOptimize(assemble_in_constraints(s.x, s.y, Regime::IN));
}
BENCHMARK(BM_AssembleIN);

void BM_SolveIN(benchmark::State& state) {
  const auto s = s3_setting();
  const auto sys = assemble_in_constraints(s.x, s.y, Regime::IN);
  for (auto _ : state) benchmark::DoNotOptimize(solve_parameter_space(sys));
}
BENCHMARK(BM_SolveIN);

void BM_SolveNeighbourhood(benchmark::State& state) {
  const auto ng = build_neighbourhood_groupoid(CWComplex::cycle_graph(std::size_t(state.range(0))), 1);
  const auto nf = build_neighbourhood_functors(ng, 1, 1);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_parameter_space(
        assemble_in_constraints(nf.x, nf.y, Regime::IN, std::nullopt, KernelSupport::identity_only)));
}
BENCHMARK(BM_SolveNeighbourhood)->Arg(3)->Arg(4)->Arg(6);

void BM_ConvForward(benchmark::State& state) {
  const auto s = s3_setting();
  const auto basis = solve_parameter_space(assemble_in_constraints(s.x, s.y, Regime::IN)).kernels;
  CategoryKernel k = basis.front();
  for (std::size_t i = 1; i < basis.size(); ++i) k += basis[i];
  const auto xs = random_sections(s.x, 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(conv_forward(k, xs.front()));
}
BENCHMARK(BM_ConvForward);

void BM_CompiledForward(benchmark::State& state) {
  const auto cat = chain_poset(std::size_t(state.range(0)));
  const auto n = cat->object_count();
  const auto gt = build_graded_target(cat, ObjectMap<std::size_t>(n, 2));
  const auto x = constant_functor(cat, ObjectMap<std::size_t>(n, 2));
  const auto net = compile_equivariant(gt.retraction, sample_equivariant_target(gt.retraction, x, 0, TargetFamily::affine_tanh));
  const auto xs = random_sections(x, 1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(network_forward(net, xs.front()));
}
BENCHMARK(BM_CompiledForward)->Arg(3)->Arg(6)->Arg(12);

void BM_RootedIsomorphisms(benchmark::State& state) {
  const auto k = CWComplex::cycle_graph(std::size_t(state.range(0)));
  const auto p = extract_patch(k, 0, 2);
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_rooted_isomorphisms(p, p));
}
BENCHMARK(BM_RootedIsomorphisms)->Arg(4)->Arg(6)->Arg(8);

}  // namespace

BENCHMARK_MAIN();
