#include <benchmark/benchmark.h>

#include "rcc/certify.hpp"
#include "rcc/models.hpp"
#include "rcc/moduli.hpp"
#include "rcc/prng.hpp"
#include "rcc/spectral.hpp"

namespace {

rcc::DenseMatrix random_hermitian(std::size_t n, std::uint64_t seed) {
    rcc::SplitMix64 rng(seed);
    rcc::DenseMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        h(i, i) = rng.next_signed();
        for (std::size_t j = i + 1; j < n; ++j) {
            rcc::Complex v{rng.next_signed(), rng.next_signed()};
            h(i, j) = v;
            h(j, i) = std::conj(v);
        }
    }
    return h;
}

void BM_eigh(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    rcc::DenseMatrix h = random_hermitian(n, 7);
    for (auto _ : state) {
        auto s = rcc::eigh_values(h);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_eigh)->Arg(32)->Arg(128)->Arg(512);

void BM_svd_values(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    rcc::SplitMix64 rng(11);
    rcc::DenseMatrix a(n, n);
    for (auto& e : a.entries()) e = rcc::Complex{rng.next_signed(), rng.next_signed()};
    for (auto _ : state) {
        auto s = rcc::svd_values(a);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_svd_values)->Arg(32)->Arg(128)->Arg(512);

void BM_assemble_gram(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    rcc::TwoSubspaceSystem sys = rcc::two_subspace_system(rcc::AngleModel{{}, {0.5}, {}});
    for (auto _ : state) {
        auto g = rcc::assemble_gram(sys.system, n);
        benchmark::DoNotOptimize(g);
    }
}
BENCHMARK(BM_assemble_gram)->Arg(50)->Arg(200);

void BM_lemma2_bound_check(benchmark::State& state) {
    rcc::BlockHermitian bh = rcc::random_block_hermitian(99, 4, 30);
    for (auto _ : state) {
        auto r = rcc::lemma2_bound_check(bh.h, bh.partition);
        benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_lemma2_bound_check);

void BM_certify_pipeline(benchmark::State& state) {
    rcc::TwoSubspaceSystem sys = rcc::two_subspace_system(rcc::AngleModel{{}, {0.5}, {}});
    for (auto _ : state) {
        auto inputs = rcc::compute_inputs(sys.system);
        auto verdict = rcc::certify(sys.system, inputs);
        benchmark::DoNotOptimize(verdict);
    }
}
BENCHMARK(BM_certify_pipeline);

}  // namespace

BENCHMARK_MAIN();
