// Command-line front end: train RL agents, run planning baselines,
// evaluate checkpoints, and re-export summaries from run directories.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "agrisim/baselines.hpp"
#include "agrisim/config.hpp"
#include "agrisim/harness.hpp"
#include "agrisim/trainer.hpp"

namespace fs = std::filesystem;
using namespace agrisim;

namespace {

ExperimentConfig resolve_config(const std::string& config_path,
                                const std::string& preset) {
    ExperimentConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!preset.empty()) {
        apply_preset(cfg, preset);
        validate(cfg);
    }
    if (const char* dir = std::getenv("AGRISIM_OUTPUT_DIR"); dir && *dir)
        cfg.output_dir = dir;
    return cfg;
}

int report_runs(const ExperimentResult& res) {
    int failed = 0;
    for (const auto& r : res.runs) {
        if (r.ok) {
            std::cout << "ok   " << r.dir << "\n";
        } else {
            std::cerr << "FAIL " << r.dir << ": " << r.error << "\n";
            ++failed;
        }
    }
    std::cout << "summary: " << res.output_dir << "/summary.csv\n";
    return failed == static_cast<int>(res.runs.size()) && failed > 0 ? 1 : 0;
}

int cmd_evaluate(const std::string& run_dir, int episodes,
                 std::uint64_t seed) {
    const std::string cfg_path = run_dir + "/config.resolved.json";
    if (!fs::exists(cfg_path)) {
        std::cerr << "evaluate: missing " << cfg_path << "\n";
        return 1;
    }
    const ExperimentConfig cfg = load_config(cfg_path);

    FarmEnv probe(cfg.env, 0);
    const int obs_size = probe.observation_size();
    Rng init_rng(0);
    std::vector<AgentPolicy> agents;

    // Infer the algorithm from the directory name so mediation matches
    // how the checkpoints were trained.
    Algorithm algo = Algorithm::ITDQN;
    const std::string name = fs::path(run_dir).filename().string();
    for (const char* tag : {"dqn", "ddqn", "itdqn"})
        if (name.rfind(tag, 0) == 0) algo = algorithm_from_string(tag);

    for (int i = 0; i < cfg.env.n_uav; ++i) {
        const std::string stem =
            run_dir + "/checkpoints/agent" + std::to_string(i);
        agents.emplace_back(i, algo, obs_size, cfg.trainer.hidden_dim, kNumActions,
                            cfg.trainer.sigma2, cfg.trainer.buffer_capacity,
                            init_rng);
        agents.back().q.online = load_checkpoint(stem + "_online.ckpt");
        agents.back().q.target = load_checkpoint(stem + "_target.ckpt");
        agents.back().q.mid = load_checkpoint(stem + "_mid.ckpt");
        agents.back().epsilon = 0.0;
    }

    Rng rng(mix_seed(seed, 0xeaa1));
    std::cout << "episode,energy_j,recognition_pct,collection_pct,completion_s\n";
    for (int e = 0; e < episodes; ++e) {
        FarmEnv env(cfg.env, eval_episode_seed(seed, e));
        std::vector<std::vector<double>> obs(cfg.env.n_uav);
        for (int i = 0; i < cfg.env.n_uav; ++i) obs[i] = env.observe(i);
        while (!env.episode_done()) {
            std::vector<std::optional<Action>> actions(cfg.env.n_uav);
            for (int i = 0; i < cfg.env.n_uav; ++i) {
                if (!env.uavs()[i].alive) continue;
                actions[i] = static_cast<Action>(
                    select_action(agents[i], obs[i], rng, ActMode::Eval));
            }
            const StepOutcome out = env.step(actions);
            for (int i = 0; i < cfg.env.n_uav; ++i)
                if (actions[i].has_value()) obs[i] = out.per_uav[i].observation;
        }
        const EpisodeMetrics m = env.metrics();
        std::cout << e << ',' << m.energy_j << ',' << m.recognition_pct << ','
                  << m.collection_pct << ',' << m.completion_s << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"UAV farmland coverage workbench"};
    app.require_subcommand(1);

    std::string config_path, preset, algo, run_dir;
    std::optional<std::uint64_t> seed_opt;
    int episodes = 10;

    auto* train_cmd = app.add_subcommand("train", "train RL agents");
    train_cmd->add_option("--config", config_path, "config file (JSON)");
    train_cmd->add_option("--preset", preset, "paper|desk|toy")
        ->check(CLI::IsMember({"paper", "desk", "toy"}));
    train_cmd->add_option("--algo", algo, "dqn|ddqn|itdqn")
        ->check(CLI::IsMember({"dqn", "ddqn", "itdqn"}));
    train_cmd->add_option("--seed", seed_opt, "single seed override");

    auto* base_cmd = app.add_subcommand("baseline", "run a planning baseline");
    base_cmd->add_option("--config", config_path, "config file (JSON)");
    base_cmd->add_option("--preset", preset, "paper|desk|toy")
        ->check(CLI::IsMember({"paper", "desk", "toy"}));
    base_cmd->add_option("--algo", algo, "aco|pso|ga")
        ->required()
        ->check(CLI::IsMember({"aco", "pso", "ga"}));
    base_cmd->add_option("--seed", seed_opt, "single seed override");

    auto* eval_cmd = app.add_subcommand("evaluate", "evaluate a checkpointed run");
    eval_cmd->add_option("--checkpoint", run_dir, "run directory with checkpoints/")
        ->required();
    eval_cmd->add_option("--episodes", episodes, "evaluation episodes");
    eval_cmd->add_option("--seed", seed_opt, "evaluation seed");

    auto* export_cmd = app.add_subcommand("export", "rebuild summary from a run dir");
    export_cmd->add_option("--run", run_dir, "experiment output directory")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed() || base_cmd->parsed()) {
            ExperimentConfig cfg = resolve_config(config_path, preset);
            if (!algo.empty()) cfg.algorithms = {algo};
            if (train_cmd->parsed()) {
                std::erase_if(cfg.algorithms, [](const std::string& a) {
                    return a == "aco" || a == "pso" || a == "ga";
                });
            }
            if (seed_opt) cfg.seeds = {*seed_opt};
            validate(cfg);
            return report_runs(run_experiment(cfg));
        }
        if (eval_cmd->parsed())
            return cmd_evaluate(run_dir, episodes, seed_opt.value_or(1));
        if (export_cmd->parsed()) {
            const ExperimentResult res = export_summary(run_dir);
            std::cout << compare_algorithms(res.summaries);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
