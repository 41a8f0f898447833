#include "dkm/net.hpp"
#include "dkm/rng.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

dkm::ParamVector random_theta(const dkm::Architecture& arch, std::uint64_t seed) {
    dkm::ParamVector theta(dkm::param_count(arch));
    for (std::size_t i = 0; i < theta.size(); ++i) {
        theta[i] = dkm::uniform_in({seed, 0}, i, -1.0, 1.0);
    }
    return theta;
}

void bm_forward(benchmark::State& state) {
    const int w = static_cast<int>(state.range(0));
    const dkm::Architecture arch({2, w, w, 1});
    const auto theta = random_theta(arch, 1);
    const std::vector<double> x{0.3, 0.7};
    dkm::Workspace ws;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dkm::forward_scalar(arch, theta, x, dkm::Activation{0}, ws));
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_forward)->Arg(8)->Arg(32)->Arg(64);

void bm_grad(benchmark::State& state) {
    const int w = static_cast<int>(state.range(0));
    const dkm::Architecture arch({2, w, w, 1});
    const auto theta = random_theta(arch, 2);
    const std::vector<double> x{0.3, 0.7};
    dkm::Workspace ws;
    std::vector<double> grad(theta.size(), 0.0);
    for (auto _ : state) {
        dkm::forward_scalar(arch, theta, x, dkm::Activation{0}, ws);
        dkm::accumulate_grad_theta(arch, theta, x, dkm::Activation{0}, ws, 1.0, grad);
        benchmark::DoNotOptimize(grad.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_grad)->Arg(8)->Arg(32)->Arg(64);

void bm_normal_draws(benchmark::State& state) {
    std::vector<double> buf(1024);
    std::uint64_t stream = 0;
    for (auto _ : state) {
        dkm::normal_fill({7, ++stream}, 0, buf.data(), buf.size());
        benchmark::DoNotOptimize(buf.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(buf.size()));
}
BENCHMARK(bm_normal_draws);

} // namespace
