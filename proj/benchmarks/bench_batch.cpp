#include "dkm/batch.hpp"

#include <benchmark/benchmark.h>

namespace {

const dkm::ExactSolution kSol{dkm::SolutionKind::quadratic, 1, 1.0, 1.0, {}, 1.0};
const dkm::SpaceTimeBox kBox{0.0, 1.0, {0.0}, {1.0}};

void bm_build_batch(benchmark::State& state) {
    const int m1 = static_cast<int>(state.range(0));
    const int m2 = static_cast<int>(state.range(1));
    std::uint64_t step = 0;
    for (auto _ : state) {
        auto batch = dkm::build_batch(kSol, kBox, m1, m2, dkm::RngKey{11, 0}.child(++step));
        benchmark::DoNotOptimize(batch.targets.data());
    }
    state.SetItemsProcessed(state.iterations() * m1 * m2);
}
BENCHMARK(bm_build_batch)->Args({1024, 16})->Args({4096, 64});

void bm_loss_and_grad(benchmark::State& state) {
    const int w = static_cast<int>(state.range(0));
    const dkm::Architecture arch({2, w, w, 1});
    dkm::ParamVector theta(dkm::param_count(arch));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] = dkm::uniform_in({3, 0}, i, -0.5, 0.5);
    }
    const auto batch = dkm::build_batch(kSol, kBox, 4096, 8, dkm::RngKey{12, 0});
    dkm::Workspace ws;
    std::vector<double> scratch;
    std::vector<double> grad(theta.size());
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            dkm::loss_and_grad(arch, theta, batch, dkm::Activation{0}, ws, scratch, grad));
    }
    state.SetItemsProcessed(state.iterations() * 4096);
}
BENCHMARK(bm_loss_and_grad)->Arg(16)->Arg(32)->Arg(64);

} // namespace

BENCHMARK_MAIN();
