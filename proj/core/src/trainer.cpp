#include "agrisim/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace agrisim {

std::uint64_t train_episode_seed(std::uint64_t run_seed, int episode) {
    return mix_seed(run_seed, 1000u + static_cast<std::uint64_t>(episode));
}

std::uint64_t eval_episode_seed(std::uint64_t run_seed, int eval_index) {
    return mix_seed(run_seed, 0x5eed0000u + static_cast<std::uint64_t>(eval_index));
}

MimicryResult mimicry_episode(std::vector<AgentPolicy>& agents, FarmEnv& env,
                              ImitationSchedule& schedule, Rng& rng) {
    const int n = static_cast<int>(agents.size());
    MimicryResult res;
    res.traces.assign(n, {});

    std::vector<std::vector<double>> obs(n);
    for (int i = 0; i < n; ++i) obs[i] = env.observe(i);

    while (!env.episode_done()) {
        std::vector<std::optional<Action>> actions(n);
        for (int i = 0; i < n; ++i) {
            if (!env.uavs()[i].alive) continue;
            actions[i] = static_cast<Action>(
                select_action(agents[i], obs[i], rng, ActMode::Mimicry));
        }
        const StepOutcome out = env.step(actions);
        for (int i = 0; i < n; ++i) {
            if (!actions[i].has_value()) continue;
            res.traces[i].push_back(out.per_uav[i].reward);
            obs[i] = out.per_uav[i].observation;
        }
    }

    // A UAV dead from step one yields an empty trace; score it as a
    // single zero-reward step so elite selection stays well defined.
    for (auto& t : res.traces)
        if (t.empty()) t.push_back(0.0);

    res.elite = evaluate_elite(res.traces, schedule.beta1, schedule.beta2);
    imitate(agents, res.elite, schedule.vartheta);
    schedule.advance();
    return res;
}

double measure_inference_ms(const AgentPolicy& agent,
                            const std::vector<double>& state, int calls) {
    Rng rng(0);
    volatile int sink = 0;
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < calls; ++i)
        sink = sink + select_action(agent, state, rng, ActMode::Eval);
    const auto t1 = std::chrono::steady_clock::now();
    (void)sink;
    const double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();
    return ns / calls / 1e6;
}

TrainingArtifacts train(const EnvConfig& env_cfg, const TrainerConfig& cfg,
                        const ImitationSchedule& schedule, Algorithm algo,
                        std::uint64_t seed) {
    if (!cfg.valid()) throw std::invalid_argument("train: invalid trainer config");
    // Validate the environment config up front; throws before any episode.
    FarmEnv probe(env_cfg, train_episode_seed(seed, 0));
    const int obs_size = probe.observation_size();
    const int n = env_cfg.n_uav;

    Rng init_rng(mix_seed(seed, 0x01));
    Rng policy_rng(mix_seed(seed, 0x02));

    TrainingArtifacts art;
    art.agents.reserve(n);
    for (int i = 0; i < n; ++i) {
        art.agents.emplace_back(i, algo, obs_size, cfg.hidden_dim, kNumActions,
                                cfg.sigma2, cfg.buffer_capacity, init_rng);
        art.agents.back().epsilon = cfg.epsilon_init;
    }
    auto& agents = art.agents;

    const LearnParams lp{cfg.gamma, static_cast<std::size_t>(cfg.batch_size),
                         cfg.tau, cfg.learning_rate, cfg.max_grad_norm};
    ImitationSchedule sched = schedule;

    for (int ep = 1; ep <= cfg.max_episodes; ++ep) {
        FarmEnv env(env_cfg, train_episode_seed(seed, ep));
        std::vector<double> returns(n, 0.0);

        if (algo == Algorithm::ITDQN && sched.is_mimicry_episode(ep)) {
            const MimicryResult res = mimicry_episode(agents, env, sched, policy_rng);
            for (int i = 0; i < n; ++i) {
                double sum = 0.0;
                for (double r : res.traces[i]) sum += r;
                art.learning_curve.push_back({ep, i, sum, true});
            }
        } else {
            std::vector<std::vector<double>> obs(n);
            for (int i = 0; i < n; ++i) obs[i] = env.observe(i);

            while (!env.episode_done()) {
                std::vector<std::optional<Action>> actions(n);
                for (int i = 0; i < n; ++i) {
                    if (!env.uavs()[i].alive) continue;
                    actions[i] = static_cast<Action>(
                        select_action(agents[i], obs[i], policy_rng, ActMode::Train));
                }
                const StepOutcome out = env.step(actions);
                for (int i = 0; i < n; ++i) {
                    if (!actions[i].has_value()) continue;
                    returns[i] += out.per_uav[i].reward;
                    Transition tr;
                    tr.state = obs[i];
                    tr.action = static_cast<int>(*actions[i]);
                    tr.reward = out.per_uav[i].reward;
                    tr.next_state = out.per_uav[i].observation;
                    tr.done = out.per_uav[i].done;
                    agents[i].buffer.push(std::move(tr));
                    obs[i] = out.per_uav[i].observation;
                    if (agents[i].buffer.size() >=
                        static_cast<std::size_t>(cfg.batch_size))
                        learn(agents[i], lp, policy_rng);
                }
            }
            for (int i = 0; i < n; ++i)
                art.learning_curve.push_back({ep, i, returns[i], false});
        }

        for (AgentPolicy& a : agents)
            a.epsilon = std::max(cfg.epsilon_min, a.epsilon * cfg.epsilon_decay);
    }

    // Inference latency over a representative state.
    art.inference_ms =
        measure_inference_ms(agents[0], probe.observe(0), 10000);

    // Greedy evaluation episodes.
    for (int e = 0; e < cfg.eval_episodes; ++e) {
        FarmEnv env(env_cfg, eval_episode_seed(seed, e));
        std::vector<std::vector<double>> obs(n);
        for (int i = 0; i < n; ++i) obs[i] = env.observe(i);
        int step = 0;
        while (!env.episode_done()) {
            std::vector<std::optional<Action>> actions(n);
            for (int i = 0; i < n; ++i) {
                if (!env.uavs()[i].alive) continue;
                actions[i] = static_cast<Action>(
                    select_action(agents[i], obs[i], policy_rng, ActMode::Eval));
            }
            const StepOutcome out = env.step(actions);
            for (int i = 0; i < n; ++i) {
                if (!actions[i].has_value()) continue;
                const UavState& u = env.uavs()[i];
                art.eval_trajectories.push_back(
                    {e, step, i, u.row, u.col, static_cast<int>(*actions[i]),
                     out.per_uav[i].reward,
                     remaining_battery(env_cfg.physics.battery_capacity,
                                       u.energy.total)});
                obs[i] = out.per_uav[i].observation;
            }
            ++step;
        }
        EpisodeMetrics m = env.metrics();
        m.episode = e;
        m.inference_ms = art.inference_ms;
        m.algorithm = to_string(algo);
        m.seed = seed;
        art.eval_metrics.push_back(std::move(m));
    }

    return art;
}

}  // namespace agrisim
