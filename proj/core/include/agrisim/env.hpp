#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "agrisim/metrics.hpp"
#include "agrisim/physics.hpp"
#include "agrisim/rng.hpp"

namespace agrisim {

struct GridGeometry {
    int grid_count = 20;        // N cells per side
    double cell_size = 20.0;    // m
    double altitude = 20.0;     // m
    int fov_cells = 3;          // odd, per side
    double uav_sep_threshold = 28.284271247461902; // m

    bool valid() const {
        return grid_count >= 2 && cell_size > 0 && altitude > 0 && fov_cells >= 1 &&
               fov_cells % 2 == 1 && uav_sep_threshold >= 0;
    }
    double side_m() const { return grid_count * cell_size; }
};

struct RewardWeights {
    // Penalties stored as positive magnitudes, applied negatively.
    double p_out = 10.0;
    double p_bat = 10.0;
    double p_clo_coeff = 0.1;   // per meter of separation shortfall
    double i_weed = 2.0;
    double i_data = 2.0;
    double i_exploit = 0.05;
    double i_explore = 0.1;
    double b_const = 0.1;
};

struct EnvConfig {
    GridGeometry geometry;
    PhysicsParams physics;
    CommParams comm;
    RewardWeights reward;
    int n_uav = 4;
    int n_sensors = 40;
    int max_steps = 200;        // T_max
    double dt = 1.0;            // s
    int weed_clusters = 4;
    double weed_floor = 0.05;   // densities below this synthesize to 0
    double min_collection_prob = 0.01; // connectable threshold
};

enum class Action : int { N = 0, NE, E, SE, S, SW, W, NW };
inline constexpr int kNumActions = 8;

// (drow, dcol) unit cell displacement; row decreases northward.
std::array<int, 2> action_offset(Action a);

// Velocity [m/s] of a one-cell move in direction a over dt seconds.
std::array<double, 2> action_velocity(Action a, const GridGeometry& g, double dt);

struct WeedMap {
    int n = 0;
    std::vector<double> density;   // n*n, row-major, in [0,1]
    std::vector<int> type_id;      // 0 = no weed
    std::vector<std::uint8_t> recognized;

    double density_at(int r, int c) const { return density[r * n + c]; }
    bool is_weed(int r, int c) const { return density[r * n + c] > 0.0; }
    int weed_cell_count() const;
    int recognized_weed_count() const;
};

struct SensorNode {
    int id = 0;
    std::array<double, 2> position{};  // m
    int row = 0, col = 0;
    bool collected = false;
};

// What one UAV knows; broadcast every step makes these converge.
struct KnowledgeMap {
    std::vector<std::uint8_t> recognized;        // per cell
    std::vector<std::uint8_t> sensor_discovered; // per sensor
    std::vector<std::uint8_t> sensor_collected;  // per sensor

    void merge_from(const KnowledgeMap& other);
    bool operator==(const KnowledgeMap&) const = default;
};

struct UavState {
    int id = 0;
    int row = 0, col = 0;
    EnergyLedger energy;
    bool alive = true;
    KnowledgeMap known;
};

// Individually logged reward terms; compute_reward sums exactly these.
struct RewardTerms {
    bool out_of_bounds = false;
    bool battery_outage = false;
    double separation_shortfall_m = 0.0; // max(0, d_UAV - nearest UAV distance)
    bool recognized_weed = false;
    bool collected_data = false;
    bool moved_closer_to_sensor = false;
    bool moved_toward_dense_sensors = false;
};

double compute_reward(const RewardTerms& t, const RewardWeights& w);

enum class EventKind { Recognition, Collection, BoundaryHit, BatteryOutage };

struct Event {
    int step = 0;
    int uav = 0;
    EventKind kind;
    double value = 0.0;  // density for recognitions, sensor id for collections
};

struct StepOutcome {
    struct PerUav {
        std::vector<double> observation;
        double reward = 0.0;
        bool done = false;
        RewardTerms terms;
    };
    std::vector<PerUav> per_uav;
    bool episode_done = false;
    std::vector<Event> events;
};

class FarmEnv {
public:
    FarmEnv(const EnvConfig& cfg, std::uint64_t seed);

    void reset(std::uint64_t seed);

    // One action per UAV; nullopt = hover in place. An action supplied
    // for a dead UAV (or missing for an alive one) is a contract
    // violation and throws std::logic_error.
    StepOutcome step(const std::vector<std::optional<Action>>& actions);

    // Throws std::logic_error for a dead UAV.
    std::vector<double> observe(int uav_id) const;
    int observation_size() const;

    bool episode_done() const { return done_; }
    int step_count() const { return step_count_; }
    bool all_tasks_complete() const;

    // Valid once the episode is done; inference_ms is left for the caller.
    EpisodeMetrics metrics() const;
    // Same scorecard without the episode-done requirement.
    EpisodeMetrics snapshot_metrics() const;

    void broadcast_merge();

    const EnvConfig& config() const { return cfg_; }
    const WeedMap& weed_map() const { return weed_; }
    const std::vector<SensorNode>& sensors() const { return sensors_; }
    const std::vector<UavState>& uavs() const { return uavs_; }
    std::array<double, 3> uav_position_m(int uav_id) const;

private:
    void synthesize_weed_map(Rng& rng);
    std::vector<double> observe_impl(int uav_id) const;
    int nearest_connectable_sensor(int uav_id, double* prob_out) const;
    double nearest_known_uncollected_dist(const UavState& u, int row, int col) const;
    std::optional<int> dense_sensor_octant(const UavState& u) const;

    EnvConfig cfg_;
    WeedMap weed_;
    std::vector<SensorNode> sensors_;
    std::vector<UavState> uavs_;
    Rng rng_;
    int step_count_ = 0;
    bool done_ = false;
};

}  // namespace agrisim
