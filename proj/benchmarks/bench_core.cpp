#include <benchmark/benchmark.h>

#include "pulsecomp/bga.hpp"
#include "pulsecomp/clean.hpp"
#include "pulsecomp/filter_design.hpp"
#include "pulsecomp/rls.hpp"
#include "pulsecomp/waveform.hpp"

using namespace pulsecomp;

namespace {

Waveform design_waveform(double sample_rate) {
    return generate_lfm(5e6, 20e-6, sample_rate, 0.1);
}

void BM_SolveMinIsl(benchmark::State& state) {
    const Index filter_length = state.range(0);
    const Waveform w = design_waveform(static_cast<double>(filter_length) / 40e-6);
    const ConvolutionMatrix S = build_convolution_matrix(w, filter_length, 3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_min_isl(S, Complex(w.energy(), 0.0)));
    }
}
BENCHMARK(BM_SolveMinIsl)->Arg(240)->Arg(480)->Unit(benchmark::kMillisecond);

void BM_RlsIteration(benchmark::State& state) {
    const Index filter_length = state.range(0);
    const Waveform w = design_waveform(static_cast<double>(filter_length) / 40e-6);
    const ConvolutionMatrix S = build_convolution_matrix(w, filter_length, 3);
    const FilterWeights w_isl = solve_min_isl(S, Complex(w.energy(), 0.0));
    const DesiredResponse d = build_desired_response(
        S.n_output(), 3, Complex(w.energy(), 0.0), DesiredShape::triangular);
    const Index iterations = 50;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            optimize(S, d, w_isl, iterations, 0.998, 100.0));
    }
    state.SetItemsProcessed(state.iterations() * iterations);
}
BENCHMARK(BM_RlsIteration)->Arg(240)->Arg(480)->Unit(benchmark::kMillisecond);

void BM_ApplyFilter(benchmark::State& state) {
    const Waveform w = design_waveform(12e6);
    const FilterWeights filt = matched_filter(w, 480);
    const CVector y = w.samples;
    for (auto _ : state) {
        benchmark::DoNotOptimize(apply_filter(filt, y));
    }
}
BENCHMARK(BM_ApplyFilter)->Unit(benchmark::kMicrosecond);

void BM_CleanProfile(benchmark::State& state) {
    const Waveform w = generate_lfm(4e6, 16e-6, 4e6, 0.1);
    const ConvolutionMatrix S = build_convolution_matrix(w, 128, 1);
    RangeScene scene;
    scene.impulse_response = CVector::Zero(128);
    scene.impulse_response[50] = Complex(1e4, 0.0);
    scene.impulse_response[70] = Complex(4.0, 0.0);
    scene.noise_power = 1.0;
    scene.seed = 1;
    const CVector y = simulate_profile(S, scene);
    for (auto _ : state) {
        benchmark::DoNotOptimize(clean_pipeline(S, y, 1.0, 1e-2));
    }
}
BENCHMARK(BM_CleanProfile)->Unit(benchmark::kMillisecond);

void BM_NlfmFitness(benchmark::State& state) {
    GaConfig cfg;
    cfg.population_size = 4;
    cfg.waveform_params.bandwidth = 5e6;
    cfg.waveform_params.pulse_width = 20e-6;
    cfg.waveform_params.sample_rate = 6e6;
    cfg.waveform_params.filter_length = 240;
    cfg.waveform_params.mainlobe_width = 3;
    const auto pop = init_population(cfg);
    for (auto _ : state) {
        Individual ind = pop[0];
        benchmark::DoNotOptimize(evaluate_fitness(ind, cfg));
    }
}
BENCHMARK(BM_NlfmFitness)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
