#include <benchmark/benchmark.h>

#include "elliptail/asymptotics.hpp"
#include "elliptail/estimators.hpp"
#include "elliptail/exact_tail.hpp"
#include "elliptail/simulation.hpp"

using namespace elliptail;

namespace {

const EllipticalPair& gaussian_pair() {
    static const EllipticalPair p(0.5, make_gaussian_radius());
    return p;
}

void BM_JointSurvivalExact(benchmark::State& state) {
    const double x = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(joint_survival_exact(gaussian_pair(), x, 0.9 * x).value);
}
BENCHMARK(BM_JointSurvivalExact)->Arg(1)->Arg(4)->Arg(8);

void BM_JointSurvivalIForm(benchmark::State& state) {
    const double x = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(joint_survival_iform(gaussian_pair(), x, 0.9 * x).value);
}
BENCHMARK(BM_JointSurvivalIForm)->Arg(1)->Arg(4)->Arg(8);

void BM_AutoJoint(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(auto_joint(gaussian_pair(), 8.0, 7.0).estimate.value);
}
BENCHMARK(BM_AutoJoint);

void BM_SamplePairs(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(sample_pairs(gaussian_pair(), n, seed++).pairs.data());
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SamplePairs)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_FitAndPsi(benchmark::State& state) {
    const SampleSet s = sample_pairs(gaussian_pair(), 100'000, 9);
    for (auto _ : state) {
        const FittedModel fit = fit_scaling(s, default_k_top(s.size()));
        benchmark::DoNotOptimize(psi_hat(s, PsiVariant::g1, fit.x_threshold, fit.x_threshold + 0.2, fit).value);
    }
}
BENCHMARK(BM_FitAndPsi)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
