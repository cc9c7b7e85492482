#include <doctest.h>

#include <cmath>
#include <set>
#include <stdexcept>

#include "agrisim/env.hpp"

using namespace agrisim;

namespace {

EnvConfig small_config() {
    EnvConfig cfg;
    cfg.geometry.grid_count = 8;
    cfg.n_uav = 2;
    cfg.n_sensors = 6;
    cfg.max_steps = 40;
    return cfg;
}

std::vector<std::optional<Action>> joint(const FarmEnv& env, Action a) {
    std::vector<std::optional<Action>> acts(env.config().n_uav);
    for (int i = 0; i < env.config().n_uav; ++i)
        if (env.uavs()[i].alive) acts[i] = a;
    return acts;
}

}  // namespace

TEST_CASE("compass actions") {
    CHECK(action_offset(Action::N) == std::array<int, 2>{-1, 0});
    CHECK(action_offset(Action::NE) == std::array<int, 2>{-1, 1});
    CHECK(action_offset(Action::S) == std::array<int, 2>{1, 0});
    CHECK(action_offset(Action::W) == std::array<int, 2>{0, -1});

    std::set<std::array<int, 2>> offsets;
    for (int a = 0; a < kNumActions; ++a)
        offsets.insert(action_offset(static_cast<Action>(a)));
    CHECK(offsets.size() == 8);

    GridGeometry g;
    const auto vn = action_velocity(Action::N, g, 1.0);
    CHECK(std::hypot(vn[0], vn[1]) == doctest::Approx(20.0));
    const auto vne = action_velocity(Action::NE, g, 1.0);
    CHECK(std::hypot(vne[0], vne[1]) == doctest::Approx(28.284271).epsilon(1e-6));
}

TEST_CASE("reset is deterministic in (config, seed) and varied across seeds") {
    const EnvConfig cfg = small_config();
    FarmEnv a(cfg, 42), b(cfg, 42);
    CHECK(a.weed_map().density == b.weed_map().density);
    REQUIRE(a.sensors().size() == b.sensors().size());
    for (size_t i = 0; i < a.sensors().size(); ++i) {
        CHECK(a.sensors()[i].position == b.sensors()[i].position);
    }
    for (int i = 0; i < cfg.n_uav; ++i) {
        CHECK(a.uavs()[i].row == b.uavs()[i].row);
        CHECK(a.uavs()[i].col == b.uavs()[i].col);
    }

    std::set<std::vector<int>> starts;
    for (int s = 0; s < 100; ++s) {
        FarmEnv env(cfg, 1000 + s);
        std::vector<int> key;
        for (const auto& u : env.uavs()) {
            key.push_back(u.row);
            key.push_back(u.col);
        }
        starts.insert(key);
    }
    CHECK(starts.size() > 50);
}

TEST_CASE("paper-scale construction") {
    EnvConfig cfg;  // defaults
    FarmEnv env(cfg, 7);
    CHECK(env.config().geometry.grid_count == 20);
    CHECK(static_cast<int>(env.sensors().size()) == 40);
    CHECK(static_cast<int>(env.uavs().size()) == 4);
    CHECK(env.weed_map().weed_cell_count() > 0);
    for (const auto& s : env.sensors()) {
        CHECK(s.position[0] >= 0);
        CHECK(s.position[0] <= cfg.geometry.side_m());
        CHECK(s.position[1] >= 0);
        CHECK(s.position[1] <= cfg.geometry.side_m());
    }
}

TEST_CASE("boundary moves are clamped and penalized") {
    const EnvConfig cfg = small_config();
    FarmEnv env(cfg, 3);
    // drive everyone into the NW corner, then push once more
    for (int k = 0; k < cfg.geometry.grid_count && !env.episode_done(); ++k)
        env.step(joint(env, Action::NW));
    REQUIRE(!env.episode_done());
    const int r0 = env.uavs()[0].row, c0 = env.uavs()[0].col;
    CHECK(r0 == 0);
    CHECK(c0 == 0);
    const StepOutcome out = env.step(joint(env, Action::NW));
    CHECK(env.uavs()[0].row == 0);
    CHECK(env.uavs()[0].col == 0);
    CHECK(out.per_uav[0].terms.out_of_bounds);
    // the -10 boundary penalty must be present in the scalar reward
    RewardTerms only_oob = out.per_uav[0].terms;
    RewardTerms without = only_oob;
    without.out_of_bounds = false;
    CHECK(compute_reward(only_oob, cfg.reward) ==
          doctest::Approx(compute_reward(without, cfg.reward) - 10.0));
}

TEST_CASE("reward arithmetic") {
    RewardWeights w;
    RewardTerms quiet;
    CHECK(compute_reward(quiet, w) == doctest::Approx(0.1));

    RewardTerms busy;
    busy.recognized_weed = true;
    busy.collected_data = true;
    busy.moved_closer_to_sensor = true;
    CHECK(compute_reward(busy, w) == doctest::Approx(4.15));

    RewardTerms crowded;
    crowded.separation_shortfall_m = 28.284271;
    CHECK(compute_reward(crowded, w) ==
          doctest::Approx(0.1 - 2.8284271).epsilon(1e-6));

    RewardTerms explore;
    explore.moved_toward_dense_sensors = true;
    CHECK(compute_reward(explore, w) == doctest::Approx(0.2));

    RewardTerms dead;
    dead.battery_outage = true;
    dead.out_of_bounds = true;
    CHECK(compute_reward(dead, w) == doctest::Approx(-19.9));
}

TEST_CASE("battery outage ends flight and caps spend at capacity") {
    EnvConfig cfg = small_config();
    cfg.physics.battery_capacity = 100.0;  // one diagonal move costs ~350 J
    FarmEnv env(cfg, 9);
    const StepOutcome out = env.step(joint(env, Action::SE));
    for (int i = 0; i < cfg.n_uav; ++i) {
        CHECK(out.per_uav[i].terms.battery_outage);
        CHECK(!env.uavs()[i].alive);
        CHECK(env.uavs()[i].energy.total <= 100.0 + 1e-9);
        CHECK_THROWS_AS((void)env.observe(i), std::logic_error);
    }
    CHECK(env.episode_done());  // everyone died at once
    CHECK_THROWS_AS(env.step(joint(env, Action::N)), std::logic_error);
}

TEST_CASE("step contract violations throw") {
    const EnvConfig cfg = small_config();
    FarmEnv env(cfg, 5);
    std::vector<std::optional<Action>> too_few(cfg.n_uav - 1, Action::N);
    CHECK_THROWS_AS(env.step(too_few), std::logic_error);
}

TEST_CASE("observations are fixed-size and broadcast converges knowledge") {
    const EnvConfig cfg = small_config();
    FarmEnv env(cfg, 11);
    const int len = env.observation_size();
    CHECK(len == static_cast<int>(env.observe(0).size()));
    Rng rng(77);
    std::uniform_int_distribution<int> pick(0, kNumActions - 1);
    for (int t = 0; t < 15 && !env.episode_done(); ++t) {
        std::vector<std::optional<Action>> acts(cfg.n_uav);
        for (int i = 0; i < cfg.n_uav; ++i)
            if (env.uavs()[i].alive) acts[i] = static_cast<Action>(pick(rng));
        const StepOutcome out = env.step(acts);
        for (int i = 0; i < cfg.n_uav; ++i)
            CHECK(static_cast<int>(out.per_uav[i].observation.size()) == len);
        // every step ends with a broadcast, so knowledge is shared
        for (int i = 1; i < cfg.n_uav; ++i)
            CHECK(env.uavs()[i].known == env.uavs()[0].known);
    }
}

TEST_CASE("episode terminates at the step limit and reports metrics") {
    EnvConfig cfg = small_config();
    cfg.max_steps = 6;
    FarmEnv env(cfg, 21);
    CHECK_THROWS_AS((void)env.metrics(), std::logic_error);
    int steps = 0;
    while (!env.episode_done()) {
        env.step(joint(env, Action::E));
        ++steps;
    }
    CHECK(steps == 6);
    const EpisodeMetrics m = env.metrics();
    CHECK(m.completion_s == doctest::Approx(6.0));
    CHECK(m.energy_j > 0);
    CHECK(m.recognition_pct >= 0);
    CHECK(m.recognition_pct <= 100);
    CHECK(m.collection_pct >= 0);
    CHECK(m.collection_pct <= 100);
    CHECK(m.agent_count == cfg.n_uav);
}

TEST_CASE("same seed and action script replays identically") {
    const EnvConfig cfg = small_config();
    auto run = [&](std::uint64_t seed) {
        FarmEnv env(cfg, seed);
        std::vector<double> rewards;
        Rng rng(123);  // separate policy stream; env rng untouched by it
        std::uniform_int_distribution<int> pick(0, kNumActions - 1);
        while (!env.episode_done()) {
            std::vector<std::optional<Action>> acts(cfg.n_uav);
            for (int i = 0; i < cfg.n_uav; ++i)
                if (env.uavs()[i].alive) acts[i] = static_cast<Action>(pick(rng));
            const StepOutcome out = env.step(acts);
            for (const auto& pu : out.per_uav) rewards.push_back(pu.reward);
        }
        return rewards;
    };
    CHECK(run(99) == run(99));
    CHECK(run(99) != run(100));
}

TEST_CASE("weed map synthesis stays in range and respects the floor") {
    const EnvConfig cfg = small_config();
    FarmEnv env(cfg, 31);
    const WeedMap& wm = env.weed_map();
    for (int r = 0; r < wm.n; ++r)
        for (int c = 0; c < wm.n; ++c) {
            const double d = wm.density_at(r, c);
            CHECK(d >= 0.0);
            CHECK(d <= 1.0);
            if (d > 0.0) CHECK(d >= cfg.weed_floor);
            CHECK((wm.type_id[r * wm.n + c] != 0) == (d > 0.0));
        }
}
