#pragma once

#include <array>
#include <vector>

#include "agrisim/env.hpp"
#include "agrisim/rng.hpp"

namespace agrisim {

using Cell = std::array<int, 2>;  // (row, col)

int chebyshev(const Cell& a, const Cell& b);

// Full-knowledge route planning problem: visit weed and sensor cells.
struct PlanningInstance {
    std::vector<Cell> targets;
    std::vector<Cell> starts;   // one per UAV
    int step_budget = 200;
    double energy_budget = 51840.0;
    int grid_count = 20;
};

PlanningInstance make_planning_instance(const FarmEnv& env,
                                        double density_threshold = 0.0);

struct RoutePlan {
    std::vector<std::vector<Cell>> visit_order;       // per UAV, excludes start
    std::vector<std::vector<Action>> action_sequences;
    // Best-so-far tour cost per optimizer iteration, per UAV.
    std::vector<std::vector<double>> cost_history;
};

struct AcoParams {
    int ants = 32;
    int iterations = 100;
    double evaporation = 0.5;
    double alpha = 1.0;
    double beta = 2.0;
};

struct PsoParams {
    int particles = 32;
    int iterations = 100;
    double inertia = 0.7;
    double cognitive = 1.5;
    double social = 1.5;
};

struct GaParams {
    int population = 64;
    int generations = 100;
    double mutation_rate = 0.1;
};

// Position-balanced partition of targets, one subset per UAV.
std::vector<std::vector<int>> assign_targets(const PlanningInstance& inst, Rng& rng);

// Open-tour cost from start through the given target order.
double tour_cost(const Cell& start, const std::vector<Cell>& order);

RoutePlan plan_aco(const PlanningInstance& inst, const AcoParams& p, Rng& rng);
RoutePlan plan_pso(const PlanningInstance& inst, const PsoParams& p, Rng& rng);
RoutePlan plan_ga(const PlanningInstance& inst, const GaParams& p, Rng& rng);

// Replays the plan through the environment. The episode ends when the
// environment terminates or every sequence is exhausted (remaining UAVs
// hover). Throws std::logic_error if a plan leaves the grid.
EpisodeMetrics execute_plan(FarmEnv& env, const RoutePlan& plan);

}  // namespace agrisim
