#pragma once

#include <cstdint>
#include <vector>

#include "agrisim/agent.hpp"
#include "agrisim/env.hpp"
#include "agrisim/metrics.hpp"

namespace agrisim {

struct TrainerConfig {
    double gamma = 0.99;
    int batch_size = 128;
    double tau = 0.01;
    double learning_rate = 1e-4;
    int hidden_dim = 256;
    std::size_t buffer_capacity = 1u << 16;
    double epsilon_init = 1.0;
    double epsilon_min = 0.01;
    double epsilon_decay = 0.995;
    int max_episodes = 1000;
    double sigma2 = 0.01;
    int eval_episodes = 10;
    double max_grad_norm = 0.0;

    bool valid() const {
        return gamma > 0 && gamma <= 1 && batch_size >= 1 && tau >= 0 && tau <= 1 &&
               learning_rate > 0 && hidden_dim >= 1 && buffer_capacity >= 1 &&
               epsilon_init >= 0 && epsilon_init <= 1 && epsilon_min >= 0 &&
               epsilon_min <= 1 && epsilon_decay > 0 && epsilon_decay <= 1 &&
               max_episodes >= 1 && sigma2 >= 0 && eval_episodes >= 1;
    }
};

struct RewardRow {
    int episode = 0;   // 1-based
    int agent = 0;
    double reward = 0.0;  // episode return
    bool mimicry = false;
};

struct TrajectoryRow {
    int episode = 0;   // evaluation episode index, 0-based
    int step = 0;
    int uav = 0;
    int row = 0, col = 0;
    int action = -1;   // -1: no action (hover)
    double reward = 0.0;
    double battery = 0.0;  // remaining J after the step
};

struct TrainingArtifacts {
    std::vector<RewardRow> learning_curve;
    std::vector<EpisodeMetrics> eval_metrics;
    std::vector<TrajectoryRow> eval_trajectories;
    std::vector<AgentPolicy> agents;
    double inference_ms = 0.0;
};

// Deterministic derivation of per-episode environment seeds.
std::uint64_t train_episode_seed(std::uint64_t run_seed, int episode);
std::uint64_t eval_episode_seed(std::uint64_t run_seed, int eval_index);

struct MimicryResult {
    std::vector<std::vector<double>> traces;  // per-agent per-step rewards
    int elite = -1;
};

// One joint greedy rollout (no buffer writes, no gradient steps),
// elite selection, imitation, then the schedule update.
MimicryResult mimicry_episode(std::vector<AgentPolicy>& agents, FarmEnv& env,
                              ImitationSchedule& schedule, Rng& rng);

// Mean wall-clock of a greedy deterministic select_action call [ms].
double measure_inference_ms(const AgentPolicy& agent,
                            const std::vector<double>& state, int calls = 10000);

TrainingArtifacts train(const EnvConfig& env_cfg, const TrainerConfig& cfg,
                        const ImitationSchedule& schedule, Algorithm algo,
                        std::uint64_t seed);

}  // namespace agrisim
