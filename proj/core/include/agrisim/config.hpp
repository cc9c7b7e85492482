#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "agrisim/baselines.hpp"
#include "agrisim/env.hpp"
#include "agrisim/trainer.hpp"

#include <json.hpp>

namespace agrisim {

struct BaselineParams {
    AcoParams aco;
    PsoParams pso;
    GaParams ga;
    double density_threshold = 0.0;
};

// Full experiment description. Defaults are the paper-scale setup; the
// desk and toy presets shrink it to laptop scale.
struct ExperimentConfig {
    std::string preset = "paper";
    EnvConfig env;
    TrainerConfig trainer;
    ImitationSchedule imitation;
    BaselineParams baseline;
    std::vector<std::uint64_t> seeds{1};
    std::vector<std::string> algorithms{"dqn", "ddqn", "itdqn"};
    std::string output_dir = "runs";
};

// Throws std::invalid_argument naming the offending field.
void apply_preset(ExperimentConfig& cfg, const std::string& preset);
void validate(const ExperimentConfig& cfg);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Parse + preset + overlay + validate. An empty file means all defaults.
ExperimentConfig load_config(const std::string& path);

// FNV-1a over the canonical serialized form.
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string config_hash_hex(const ExperimentConfig& cfg);

}  // namespace agrisim
