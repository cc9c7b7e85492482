#include "agrisim/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace agrisim {

namespace {
constexpr double kPi = 3.14159265358979323846;

// (drow, dcol) for N, NE, E, SE, S, SW, W, NW.
constexpr std::array<std::array<int, 2>, 8> kOffsets{{
    {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1},
}};

double planar_dist(double ax, double ay, double bx, double by) {
    const double dx = ax - bx, dy = ay - by;
    return std::sqrt(dx * dx + dy * dy);
}

// Compass octant of a planar vector (dx east, dy_row south-positive).
// Returns nullopt for the zero vector.
std::optional<int> octant_of(double d_east, double d_south) {
    if (d_east == 0.0 && d_south == 0.0) return std::nullopt;
    const double angle = std::atan2(-d_south, d_east) * 180.0 / kPi; // north = +90
    int idx = static_cast<int>(std::lround((90.0 - angle) / 45.0));
    idx = ((idx % 8) + 8) % 8;
    return idx;
}
}  // namespace

std::array<int, 2> action_offset(Action a) {
    return kOffsets[static_cast<int>(a)];
}

std::array<double, 2> action_velocity(Action a, const GridGeometry& g, double dt) {
    const auto off = kOffsets[static_cast<int>(a)];
    return {off[1] * g.cell_size / dt, off[0] * g.cell_size / dt};
}

int WeedMap::weed_cell_count() const {
    return static_cast<int>(std::count_if(density.begin(), density.end(),
                                          [](double d) { return d > 0.0; }));
}

int WeedMap::recognized_weed_count() const {
    int k = 0;
    for (size_t i = 0; i < density.size(); ++i)
        if (density[i] > 0.0 && recognized[i]) ++k;
    return k;
}

void KnowledgeMap::merge_from(const KnowledgeMap& other) {
    for (size_t i = 0; i < recognized.size(); ++i)
        recognized[i] |= other.recognized[i];
    for (size_t i = 0; i < sensor_discovered.size(); ++i) {
        sensor_discovered[i] |= other.sensor_discovered[i];
        sensor_collected[i] |= other.sensor_collected[i];
    }
}

double compute_reward(const RewardTerms& t, const RewardWeights& w) {
    double r = 0.0;
    if (t.out_of_bounds) r -= w.p_out;
    if (t.battery_outage) r -= w.p_bat;
    r -= w.p_clo_coeff * t.separation_shortfall_m;
    if (t.recognized_weed) r += w.i_weed;
    if (t.collected_data) r += w.i_data;
    if (t.moved_closer_to_sensor) r += w.i_exploit;
    if (t.moved_toward_dense_sensors) r += w.i_explore;
    r += w.b_const;
    return r;
}

FarmEnv::FarmEnv(const EnvConfig& cfg, std::uint64_t seed) : cfg_(cfg) {
    if (!cfg_.geometry.valid() || !cfg_.physics.valid() || !cfg_.comm.valid())
        throw std::invalid_argument("FarmEnv: invalid configuration");
    const int cells = cfg_.geometry.grid_count * cfg_.geometry.grid_count;
    if (cfg_.n_uav < 1 || cfg_.n_sensors < 0 || cfg_.n_uav + cfg_.n_sensors > cells)
        throw std::invalid_argument("FarmEnv: UAV + sensor count exceeds cell count");
    if (cfg_.max_steps < 1 || cfg_.dt <= 0)
        throw std::invalid_argument("FarmEnv: invalid episode parameters");
    reset(seed);
}

void FarmEnv::reset(std::uint64_t seed) {
    rng_.seed(mix_seed(seed, 0x11));
    const int n = cfg_.geometry.grid_count;
    const int cells = n * n;

    synthesize_weed_map(rng_);

    // Distinct cells for sensors then UAVs.
    std::vector<int> idx(cells);
    std::iota(idx.begin(), idx.end(), 0);
    for (int i = 0; i < cfg_.n_sensors + cfg_.n_uav; ++i) {
        std::uniform_int_distribution<int> pick(i, cells - 1);
        std::swap(idx[i], idx[pick(rng_)]);
    }

    sensors_.assign(cfg_.n_sensors, {});
    for (int i = 0; i < cfg_.n_sensors; ++i) {
        SensorNode& s = sensors_[i];
        s.id = i;
        s.row = idx[i] / n;
        s.col = idx[i] % n;
        s.position = {(s.col + 0.5) * cfg_.geometry.cell_size,
                      (s.row + 0.5) * cfg_.geometry.cell_size};
        s.collected = false;
    }

    KnowledgeMap empty;
    empty.recognized.assign(cells, 0);
    empty.sensor_discovered.assign(cfg_.n_sensors, 0);
    empty.sensor_collected.assign(cfg_.n_sensors, 0);

    uavs_.assign(cfg_.n_uav, {});
    for (int i = 0; i < cfg_.n_uav; ++i) {
        UavState& u = uavs_[i];
        u.id = i;
        const int cell = idx[cfg_.n_sensors + i];
        u.row = cell / n;
        u.col = cell % n;
        u.energy = {};
        u.alive = true;
        u.known = empty;
    }

    step_count_ = 0;
    done_ = false;
}

void FarmEnv::synthesize_weed_map(Rng& rng) {
    const int n = cfg_.geometry.grid_count;
    weed_.n = n;
    weed_.density.assign(static_cast<size_t>(n) * n, 0.0);
    weed_.type_id.assign(static_cast<size_t>(n) * n, 0);
    weed_.recognized.assign(static_cast<size_t>(n) * n, 0);

    struct Cluster {
        double r, c, radius, amp;
    };
    std::vector<Cluster> clusters;
    std::uniform_real_distribution<double> upos(0.0, static_cast<double>(n));
    std::uniform_real_distribution<double> urad(n / 8.0, n / 4.0);
    std::uniform_real_distribution<double> uamp(0.6, 1.0);
    for (int k = 0; k < cfg_.weed_clusters; ++k)
        clusters.push_back({upos(rng), upos(rng), urad(rng), uamp(rng)});

    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            double total = 0.0, best = 0.0;
            int best_k = 0;
            for (int k = 0; k < static_cast<int>(clusters.size()); ++k) {
                const Cluster& cl = clusters[k];
                const double dr = r + 0.5 - cl.r, dc = c + 0.5 - cl.c;
                const double contrib =
                    cl.amp * std::exp(-(dr * dr + dc * dc) / (2.0 * cl.radius * cl.radius));
                total += contrib;
                if (contrib > best) {
                    best = contrib;
                    best_k = k;
                }
            }
            total = std::min(total, 1.0);
            if (total < cfg_.weed_floor) total = 0.0;
            weed_.density[r * n + c] = total;
            weed_.type_id[r * n + c] = total > 0.0 ? best_k + 1 : 0;
        }
    }
}

std::array<double, 3> FarmEnv::uav_position_m(int uav_id) const {
    const UavState& u = uavs_.at(uav_id);
    return {(u.col + 0.5) * cfg_.geometry.cell_size,
            (u.row + 0.5) * cfg_.geometry.cell_size, cfg_.geometry.altitude};
}

int FarmEnv::nearest_connectable_sensor(int uav_id, double* prob_out) const {
    const auto pos = uav_position_m(uav_id);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (const SensorNode& s : sensors_) {
        if (s.collected) continue;
        const double d = planar_dist(pos[0], pos[1], s.position[0], s.position[1]);
        if (d < best_d) {
            best_d = d;
            best = s.id;
        }
    }
    if (best < 0) return -1;
    const double p = collection_probability(
        pos, {sensors_[best].position[0], sensors_[best].position[1], 0.0}, cfg_.comm);
    if (p < cfg_.min_collection_prob) return -1;
    if (prob_out) *prob_out = p;
    return best;
}

double FarmEnv::nearest_known_uncollected_dist(const UavState& u, int row, int col) const {
    const double x = (col + 0.5) * cfg_.geometry.cell_size;
    const double y = (row + 0.5) * cfg_.geometry.cell_size;
    double best = std::numeric_limits<double>::infinity();
    for (const SensorNode& s : sensors_) {
        if (!u.known.sensor_discovered[s.id] || u.known.sensor_collected[s.id]) continue;
        best = std::min(best, planar_dist(x, y, s.position[0], s.position[1]));
    }
    return best;
}

std::optional<int> FarmEnv::dense_sensor_octant(const UavState& u) const {
    double cx = 0.0, cy = 0.0;
    int count = 0;
    for (const SensorNode& s : sensors_) {
        if (!u.known.sensor_discovered[s.id] || u.known.sensor_collected[s.id]) continue;
        cx += s.position[0];
        cy += s.position[1];
        ++count;
    }
    if (count == 0) return std::nullopt;
    cx /= count;
    cy /= count;
    const double ux = (u.col + 0.5) * cfg_.geometry.cell_size;
    const double uy = (u.row + 0.5) * cfg_.geometry.cell_size;
    return octant_of(cx - ux, cy - uy);
}

StepOutcome FarmEnv::step(const std::vector<std::optional<Action>>& actions) {
    if (done_) throw std::logic_error("FarmEnv::step: episode already done");
    if (static_cast<int>(actions.size()) != cfg_.n_uav)
        throw std::logic_error("FarmEnv::step: one action slot per UAV required");
    for (int i = 0; i < cfg_.n_uav; ++i) {
        if (!uavs_[i].alive && actions[i].has_value())
            throw std::logic_error("FarmEnv::step: action supplied for dead UAV");
    }

    const int n = cfg_.geometry.grid_count;
    StepOutcome out;
    out.per_uav.resize(cfg_.n_uav);

    // Step-start snapshots for the incentive terms.
    std::vector<double> dist_before(cfg_.n_uav);
    std::vector<std::optional<int>> dense_oct(cfg_.n_uav);
    std::vector<std::vector<int>> known_targets(cfg_.n_uav);
    for (int i = 0; i < cfg_.n_uav; ++i) {
        const UavState& u = uavs_[i];
        if (!u.alive) continue;
        dist_before[i] = nearest_known_uncollected_dist(u, u.row, u.col);
        dense_oct[i] = dense_sensor_octant(u);
        for (const SensorNode& s : sensors_)
            if (u.known.sensor_discovered[s.id] && !u.known.sensor_collected[s.id])
                known_targets[i].push_back(s.id);
    }

    for (int i = 0; i < cfg_.n_uav; ++i) {
        UavState& u = uavs_[i];
        RewardTerms& t = out.per_uav[i].terms;
        if (!u.alive) continue;

        // (1) move
        double vx = 0.0, vy = 0.0;
        if (actions[i].has_value()) {
            const Action a = *actions[i];
            const auto off = action_offset(a);
            const int nr = u.row + off[0], nc = u.col + off[1];
            if (nr < 0 || nr >= n || nc < 0 || nc >= n) {
                t.out_of_bounds = true;
                out.events.push_back({step_count_, i, EventKind::BoundaryHit, 0.0});
            } else {
                u.row = nr;
                u.col = nc;
                const auto v = action_velocity(a, cfg_.geometry, cfg_.dt);
                vx = v[0];
                vy = v[1];
            }
        }

        // (2) energy and battery
        EnergyLedger delta = step_energy(vx, vy, cfg_.dt, cfg_.physics);
        const double allowed = cfg_.physics.battery_capacity - u.energy.total;
        if (delta.total >= allowed) {
            const double scale = allowed > 0 ? allowed / delta.total : 0.0;
            delta.e_cmp *= scale;
            delta.e_cs *= scale;
            delta.e_fly *= scale;
            delta.total = delta.e_cmp + delta.e_cs + delta.e_fly;
            u.energy.accumulate(delta);
            u.alive = false;
            t.battery_outage = true;
            out.events.push_back({step_count_, i, EventKind::BatteryOutage, 0.0});
            continue;  // powered off: no sensing or collection this step
        }
        u.energy.accumulate(delta);

        // (3) recognize the cell directly below
        const int cell = u.row * n + u.col;
        if (!weed_.recognized[cell]) {
            weed_.recognized[cell] = 1;
            if (weed_.density[cell] > 0.0) {
                t.recognized_weed = true;
                out.events.push_back(
                    {step_count_, i, EventKind::Recognition, weed_.density[cell]});
            }
        }
        u.known.recognized[cell] = 1;

        // (4) one collection attempt against the nearest connectable sensor
        double p = 0.0;
        const int target = nearest_connectable_sensor(i, &p);
        if (target >= 0) {
            u.known.sensor_discovered[target] = 1;
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            if (unit(rng_) < p) {
                sensors_[target].collected = true;
                u.known.sensor_collected[target] = 1;
                t.collected_data = true;
                out.events.push_back({step_count_, i, EventKind::Collection,
                                      static_cast<double>(target)});
            }
        }

        // (5) FoV sensing discovers sensors under the footprint
        const int half = cfg_.geometry.fov_cells / 2;
        for (const SensorNode& s : sensors_) {
            if (std::abs(s.row - u.row) <= half && std::abs(s.col - u.col) <= half)
                u.known.sensor_discovered[s.id] = 1;
        }

        // incentive terms against the step-start snapshot
        if (!known_targets[i].empty()) {
            const double x = (u.col + 0.5) * cfg_.geometry.cell_size;
            const double y = (u.row + 0.5) * cfg_.geometry.cell_size;
            double after = std::numeric_limits<double>::infinity();
            for (int sid : known_targets[i])
                after = std::min(after, planar_dist(x, y, sensors_[sid].position[0],
                                                    sensors_[sid].position[1]));
            if (after < dist_before[i]) t.moved_closer_to_sensor = true;
        }
        if (actions[i].has_value() && dense_oct[i].has_value() &&
            static_cast<int>(*actions[i]) == *dense_oct[i])
            t.moved_toward_dense_sensors = true;
    }

    // (6) broadcast
    broadcast_merge();

    // (7) rewards, observations, termination
    for (int i = 0; i < cfg_.n_uav; ++i) {
        const UavState& u = uavs_[i];
        RewardTerms& t = out.per_uav[i].terms;
        if (u.alive || t.battery_outage) {
            double nearest = std::numeric_limits<double>::infinity();
            for (const UavState& o : uavs_) {
                if (o.id == i || !o.alive) continue;
                nearest = std::min(nearest, planar_dist((u.col - o.col) * cfg_.geometry.cell_size,
                                                        (u.row - o.row) * cfg_.geometry.cell_size,
                                                        0.0, 0.0));
            }
            if (std::isfinite(nearest))
                t.separation_shortfall_m =
                    std::max(0.0, cfg_.geometry.uav_sep_threshold - nearest);
            out.per_uav[i].reward = compute_reward(t, cfg_.reward);
        }
    }

    ++step_count_;
    const bool any_alive =
        std::any_of(uavs_.begin(), uavs_.end(), [](const UavState& u) { return u.alive; });
    done_ = step_count_ >= cfg_.max_steps || !any_alive || all_tasks_complete();

    for (int i = 0; i < cfg_.n_uav; ++i) {
        out.per_uav[i].observation = observe_impl(i);
        out.per_uav[i].done = done_ || !uavs_[i].alive;
    }
    out.episode_done = done_;
    return out;
}

void FarmEnv::broadcast_merge() {
    KnowledgeMap merged = uavs_[0].known;
    for (int i = 1; i < cfg_.n_uav; ++i) merged.merge_from(uavs_[i].known);
    for (UavState& u : uavs_) u.known = merged;
}

bool FarmEnv::all_tasks_complete() const {
    if (weed_.recognized_weed_count() < weed_.weed_cell_count()) return false;
    return std::all_of(sensors_.begin(), sensors_.end(),
                       [](const SensorNode& s) { return s.collected; });
}

int FarmEnv::observation_size() const {
    const int f = cfg_.geometry.fov_cells;
    return 2 + f * f + 1 + 3 + 8 + 3 + 1;
}

std::vector<double> FarmEnv::observe(int uav_id) const {
    if (!uavs_.at(uav_id).alive)
        throw std::logic_error("FarmEnv::observe: UAV is dead");
    return observe_impl(uav_id);
}

std::vector<double> FarmEnv::observe_impl(int uav_id) const {
    const UavState& u = uavs_.at(uav_id);
    const int n = cfg_.geometry.grid_count;
    const double side = cfg_.geometry.side_m();
    const double diag = side * std::sqrt(2.0);
    std::vector<double> obs;
    obs.reserve(observation_size());

    // own cell, normalized
    obs.push_back(static_cast<double>(u.row) / (n - 1));
    obs.push_back(static_cast<double>(u.col) / (n - 1));

    // FoV weed presence, row-major window; out-of-bounds cells read 0
    const int half = cfg_.geometry.fov_cells / 2;
    for (int dr = -half; dr <= half; ++dr) {
        for (int dc = -half; dc <= half; ++dc) {
            const int r = u.row + dr, c = u.col + dc;
            const bool present =
                r >= 0 && r < n && c >= 0 && c < n && weed_.is_weed(r, c);
            obs.push_back(present ? 1.0 : 0.0);
        }
    }

    // density of the cell below
    obs.push_back(weed_.density_at(u.row, u.col));

    // nearest connectable sensor (offset, distance); sentinel (0,0,1)
    const auto pos = uav_position_m(uav_id);
    const int target = nearest_connectable_sensor(uav_id, nullptr);
    if (target >= 0) {
        const SensorNode& s = sensors_[target];
        obs.push_back((s.position[0] - pos[0]) / side);
        obs.push_back((s.position[1] - pos[1]) / side);
        obs.push_back(planar_dist(pos[0], pos[1], s.position[0], s.position[1]) / diag);
    } else {
        obs.push_back(0.0);
        obs.push_back(0.0);
        obs.push_back(1.0);
    }

    // one-hot octant toward the known-uncollected sensor centroid
    const auto oct = dense_sensor_octant(u);
    for (int k = 0; k < 8; ++k)
        obs.push_back(oct.has_value() && *oct == k ? 1.0 : 0.0);

    // nearest alive other UAV (offset, distance); sentinel (0,0,1)
    double best = std::numeric_limits<double>::infinity();
    const UavState* nearest = nullptr;
    for (const UavState& o : uavs_) {
        if (o.id == u.id || !o.alive) continue;
        const double d = planar_dist((o.col - u.col) * cfg_.geometry.cell_size,
                                     (o.row - u.row) * cfg_.geometry.cell_size, 0.0, 0.0);
        if (d < best) {
            best = d;
            nearest = &o;
        }
    }
    if (nearest) {
        obs.push_back((nearest->col - u.col) * cfg_.geometry.cell_size / side);
        obs.push_back((nearest->row - u.row) * cfg_.geometry.cell_size / side);
        obs.push_back(best / diag);
    } else {
        obs.push_back(0.0);
        obs.push_back(0.0);
        obs.push_back(1.0);
    }

    // remaining battery fraction
    const double rem =
        remaining_battery(cfg_.physics.battery_capacity, u.energy.total);
    obs.push_back(std::max(0.0, rem) / cfg_.physics.battery_capacity);
    return obs;
}

EpisodeMetrics FarmEnv::metrics() const {
    if (!done_) throw std::logic_error("FarmEnv::metrics: episode not done");
    return snapshot_metrics();
}

EpisodeMetrics FarmEnv::snapshot_metrics() const {
    EpisodeMetrics m;
    for (const UavState& u : uavs_) m.energy_j += u.energy.total;
    const int weed_total = weed_.weed_cell_count();
    m.recognition_pct =
        weed_total == 0 ? 100.0
                        : 100.0 * weed_.recognized_weed_count() / weed_total;
    const int n_s = static_cast<int>(sensors_.size());
    int collected = static_cast<int>(std::count_if(
        sensors_.begin(), sensors_.end(), [](const SensorNode& s) { return s.collected; }));
    m.collection_pct = n_s == 0 ? 100.0 : 100.0 * collected / n_s;
    m.completion_s = step_count_ * cfg_.dt;
    m.agent_count = cfg_.n_uav;
    return m;
}

}  // namespace agrisim
