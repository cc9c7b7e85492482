#include <benchmark/benchmark.h>

#include <optional>
#include <vector>

#include "agrisim/agent.hpp"
#include "agrisim/env.hpp"
#include "agrisim/mlp.hpp"
#include "agrisim/physics.hpp"

using namespace agrisim;

static void BM_FlightPower(benchmark::State& state) {
    PhysicsParams p;
    double v = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(flight_power(v, 20.0 - v, p));
        v = v < 20.0 ? v + 0.1 : 0.0;
    }
}
BENCHMARK(BM_FlightPower);

static void BM_LinkChain(benchmark::State& state) {
    CommParams c;
    double d = 1.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            collection_probability({d, 0.0, 20.0}, {0.0, 0.0, 0.0}, c));
        d = d < 400.0 ? d + 1.0 : 1.0;
    }
}
BENCHMARK(BM_LinkChain);

static void BM_MlpForward(benchmark::State& state) {
    Rng rng(1);
    const int hidden = static_cast<int>(state.range(0));
    const Mlp net = Mlp::make(27, hidden, 8, rng);
    const std::vector<double> obs(27, 0.3);
    for (auto _ : state) benchmark::DoNotOptimize(net.forward(obs));
}
BENCHMARK(BM_MlpForward)->Arg(64)->Arg(256);

static void BM_TrainStep(benchmark::State& state) {
    Rng rng(2);
    Mlp net = Mlp::make(27, static_cast<int>(state.range(0)), 8, rng);
    AdamState opt = AdamState::make(net);
    std::uniform_real_distribution<double> unit(-1, 1);
    std::vector<std::vector<double>> states(32, std::vector<double>(27));
    std::vector<int> actions(32);
    std::vector<double> targets(32);
    for (int k = 0; k < 32; ++k) {
        for (double& x : states[k]) x = unit(rng);
        actions[k] = k % 8;
        targets[k] = unit(rng);
    }
    std::vector<std::span<const double>> views(states.begin(), states.end());
    for (auto _ : state)
        benchmark::DoNotOptimize(
            train_step(net, opt, views, actions, targets, 1e-4));
}
BENCHMARK(BM_TrainStep)->Arg(64)->Arg(256);

static void BM_EnvStep(benchmark::State& state) {
    EnvConfig cfg;
    FarmEnv env(cfg, 3);
    Rng rng(4);
    std::uniform_int_distribution<int> pick(0, kNumActions - 1);
    for (auto _ : state) {
        if (env.episode_done()) env.reset(rng());
        std::vector<std::optional<Action>> actions(cfg.n_uav);
        for (int i = 0; i < cfg.n_uav; ++i)
            if (env.uavs()[i].alive) actions[i] = static_cast<Action>(pick(rng));
        benchmark::DoNotOptimize(env.step(actions));
    }
}
BENCHMARK(BM_EnvStep);

BENCHMARK_MAIN();
