#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "agrisim/baselines.hpp"

using namespace agrisim;

namespace {

// Exhaustive open-tour optimum over all target permutations.
double brute_force_cost(const Cell& start, std::vector<Cell> targets) {
    std::sort(targets.begin(), targets.end());
    double best = std::numeric_limits<double>::infinity();
    do {
        best = std::min(best, tour_cost(start, targets));
    } while (std::next_permutation(targets.begin(), targets.end()));
    return best;
}

EnvConfig small_config() {
    EnvConfig cfg;
    cfg.geometry.grid_count = 8;
    cfg.n_uav = 2;
    cfg.n_sensors = 5;
    cfg.max_steps = 60;
    return cfg;
}

}  // namespace

TEST_CASE("chebyshev distance and open-tour cost") {
    CHECK(chebyshev({0, 0}, {3, 1}) == 3);
    CHECK(chebyshev({2, 2}, {2, 2}) == 0);
    CHECK(chebyshev({-1, 4}, {2, -2}) == 6);
    CHECK(tour_cost({0, 0}, {}) == doctest::Approx(0));
    CHECK(tour_cost({0, 0}, {{0, 3}, {2, 3}}) == doctest::Approx(5));
}

TEST_CASE("planning instance covers weeds, sensors and starts") {
    const EnvConfig cfg = small_config();
    FarmEnv env(cfg, 13);
    const PlanningInstance inst = make_planning_instance(env);
    CHECK(static_cast<int>(inst.starts.size()) == cfg.n_uav);
    CHECK(inst.step_budget == cfg.max_steps);
    CHECK(inst.grid_count == cfg.geometry.grid_count);
    CHECK(static_cast<int>(inst.targets.size()) >=
          env.weed_map().weed_cell_count());
    // no duplicate targets
    std::set<Cell> uniq(inst.targets.begin(), inst.targets.end());
    CHECK(uniq.size() == inst.targets.size());
    // every sensor cell present
    for (const auto& s : env.sensors())
        CHECK(std::count(inst.targets.begin(), inst.targets.end(),
                         Cell{s.row, s.col}) == 1);

    // a higher threshold can only shrink the weed-target set
    const PlanningInstance strict = make_planning_instance(env, 0.5);
    CHECK(strict.targets.size() <= inst.targets.size());
}

TEST_CASE("target assignment partitions with bounded imbalance") {
    const EnvConfig cfg = small_config();
    FarmEnv env(cfg, 17);
    const PlanningInstance inst = make_planning_instance(env);
    Rng rng(1);
    const auto clusters = assign_targets(inst, rng);
    REQUIRE(static_cast<int>(clusters.size()) == cfg.n_uav);
    std::vector<int> seen;
    const int m = static_cast<int>(inst.targets.size());
    const int cap = (m + cfg.n_uav - 1) / cfg.n_uav + 1;
    for (const auto& c : clusters) {
        CHECK(static_cast<int>(c.size()) <= cap);
        seen.insert(seen.end(), c.begin(), c.end());
    }
    std::sort(seen.begin(), seen.end());
    std::vector<int> want(m);
    std::iota(want.begin(), want.end(), 0);
    CHECK(seen == want);
}

TEST_CASE("planners are seed-deterministic") {
    const EnvConfig cfg = small_config();
    FarmEnv env(cfg, 19);
    const PlanningInstance inst = make_planning_instance(env);
    auto run_twice = [&](auto plan_fn, const auto& params) {
        Rng r1(5), r2(5), r3(6);
        const RoutePlan a = plan_fn(inst, params, r1);
        const RoutePlan b = plan_fn(inst, params, r2);
        const RoutePlan c = plan_fn(inst, params, r3);
        CHECK(a.visit_order == b.visit_order);
        CHECK(a.action_sequences == b.action_sequences);
        return a.visit_order == c.visit_order;
    };
    AcoParams aco;
    aco.iterations = 20;
    PsoParams pso;
    pso.iterations = 20;
    GaParams ga;
    ga.generations = 20;
    run_twice(plan_aco, aco);
    run_twice(plan_pso, pso);
    run_twice(plan_ga, ga);
}

TEST_CASE("single-target route costs the chebyshev distance") {
    PlanningInstance inst;
    inst.starts = {{0, 0}};
    inst.targets = {{4, 2}};
    inst.step_budget = 50;
    inst.grid_count = 8;
    Rng rng(2);
    for (int which = 0; which < 3; ++which) {
        Rng r(2);
        const RoutePlan plan = which == 0   ? plan_aco(inst, AcoParams{}, r)
                               : which == 1 ? plan_pso(inst, PsoParams{}, r)
                                            : plan_ga(inst, GaParams{}, r);
        REQUIRE(plan.visit_order[0].size() == 1);
        CHECK(tour_cost(inst.starts[0], plan.visit_order[0]) == doctest::Approx(4));
        CHECK(plan.action_sequences[0].size() == 4);
    }
}

TEST_CASE("small instances are solved near-optimally") {
    PlanningInstance inst;
    inst.starts = {{0, 0}};
    inst.targets = {{5, 1}, {1, 6}, {7, 7}};
    inst.step_budget = 100;
    inst.grid_count = 8;
    const double optimal = brute_force_cost(inst.starts[0], inst.targets);
    Rng r1(3), r2(3), r3(3);
    const double aco = tour_cost(inst.starts[0], plan_aco(inst, AcoParams{}, r1).visit_order[0]);
    const double pso = tour_cost(inst.starts[0], plan_pso(inst, PsoParams{}, r2).visit_order[0]);
    const double ga = tour_cost(inst.starts[0], plan_ga(inst, GaParams{}, r3).visit_order[0]);
    CHECK(aco <= 1.1 * optimal);
    CHECK(pso <= 1.1 * optimal);
    CHECK(ga <= 1.1 * optimal);
}

TEST_CASE("optimizer cost histories never worsen") {
    const EnvConfig cfg = small_config();
    FarmEnv env(cfg, 23);
    const PlanningInstance inst = make_planning_instance(env);
    Rng rng(4);
    AcoParams aco;
    aco.iterations = 30;
    const RoutePlan plan = plan_aco(inst, aco, rng);
    for (const auto& hist : plan.cost_history)
        for (size_t i = 1; i < hist.size(); ++i)
            CHECK(hist[i] <= hist[i - 1] + 1e-12);
}

TEST_CASE("plan execution") {
    const EnvConfig cfg = small_config();

    SUBCASE("a planned run recognizes and collects something") {
        FarmEnv env(cfg, 29);
        const PlanningInstance inst = make_planning_instance(env);
        Rng rng(7);
        AcoParams aco;
        aco.iterations = 30;
        const RoutePlan plan = plan_aco(inst, aco, rng);
        env.reset(29);  // replay from the instance's own initial state
        const EpisodeMetrics m = execute_plan(env, plan);
        CHECK(m.completion_s > 0);
        CHECK(m.recognition_pct > 0);
        CHECK(m.energy_j > 0);
    }

    SUBCASE("an empty plan still hovers one step") {
        FarmEnv env(cfg, 29);
        RoutePlan empty;
        empty.visit_order.resize(cfg.n_uav);
        empty.action_sequences.resize(cfg.n_uav);
        empty.cost_history.resize(cfg.n_uav);
        const EpisodeMetrics m = execute_plan(env, empty);
        CHECK(m.completion_s == doctest::Approx(cfg.dt));
    }

    SUBCASE("out-of-grid waypoints are rejected") {
        FarmEnv env(cfg, 29);
        RoutePlan bad;
        bad.visit_order.assign(cfg.n_uav, {});
        bad.action_sequences.resize(cfg.n_uav);
        bad.cost_history.resize(cfg.n_uav);
        bad.visit_order[0] = {{cfg.geometry.grid_count, 0}};
        CHECK_THROWS_AS(execute_plan(env, bad), std::logic_error);

        RoutePlan mismatched;
        mismatched.action_sequences.resize(cfg.n_uav + 1);
        CHECK_THROWS_AS(execute_plan(env, mismatched), std::logic_error);
    }
}
