#include <benchmark/benchmark.h>

#include "kvge/certify.hpp"
#include "kvge/solve.hpp"

using namespace kvge;

namespace {

ProblemSpec example(const std::string& f = "1") {
    return ProblemSpec{Expression::parse("1000/3 * t * sin(pi/6*t)", {"t"}),
                       Expression::parse(f, {"t", "u"}),
                       ExponentProfile(Expression::parse("7/2 + 3/2*cos(t)", {"t"}), ExponentBounds{2.0, 5.0}),
                       Kernel::constant_one(),
                       BoundaryModel::dirichlet(0.25, 0.75),
                       1.0,
                       1.0 / 2500.0,
                       3.0,
                       std::nullopt};
}

void BM_ExpressionEval(benchmark::State& state) {
    const auto e = Expression::parse("7/2 + 3/2*cos(t) + u^2*exp(-t)", {"t", "u"});
    double t = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(e(t, 0.5));
        t += 1e-7;
    }
}
BENCHMARK(BM_ExpressionEval);

void BM_NonlocalValue(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto u = GridFunction::sample(n, [](double t) { return t * (1.0 - t); });
    const auto p = Expression::parse("7/2 + 3/2*cos(t)", {"t"});
    const auto k = Kernel::riemann_liouville(0.5);
    for (auto _ : state) benchmark::DoNotOptimize(k.nonlocal_value(u, p, Interpolation::Cubic));
}
BENCHMARK(BM_NonlocalValue)->Arg(129)->Arg(257)->Arg(513);

void BM_ApplyT(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const HammersteinOperator op(example("1 + u^2"), n);
    const auto u = GridFunction::sample(n, [](double t) { return t * (1.0 - t); });
    for (auto _ : state) benchmark::DoNotOptimize(op.apply(u, 0.1));
}
BENCHMARK(BM_ApplyT)->Arg(129)->Arg(257)->Arg(513);

void BM_Certify(benchmark::State& state) {
    const auto spec = example();
    for (auto _ : state) benchmark::DoNotOptimize(certify(spec));
}
BENCHMARK(BM_Certify)->Unit(benchmark::kMillisecond);

void BM_OuterSolve(benchmark::State& state) {
    const auto spec = example();
    SolveOptions options;
    options.threads = 1;
    for (auto _ : state) benchmark::DoNotOptimize(outer_solve(spec, options));
}
BENCHMARK(BM_OuterSolve)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
