#include "agrisim/config.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace agrisim {

using nlohmann::json;

namespace {

// Field-by-field reader that rejects unknown keys with a full path.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object())
            throw std::invalid_argument(path_ + ": expected an object");
    }

    template <typename T>
    void get(const char* name, T& field) {
        seen_.insert(name);
        if (!j_.contains(name)) return;
        try {
            field = j_.at(name).get<T>();
        } catch (const json::exception&) {
            throw std::invalid_argument(path_ + "." + name + ": wrong type");
        }
    }

    bool has(const char* name) const { return j_.contains(name); }

    const json& sub(const char* name) {
        seen_.insert(name);
        return j_.at(name);
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.contains(it.key()))
                throw std::invalid_argument(path_ + "." + it.key() + ": unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

[[noreturn]] void fail(const std::string& field, const std::string& why) {
    throw std::invalid_argument(field + ": " + why);
}

void check(bool ok, const char* field, const char* why) {
    if (!ok) fail(field, why);
}

}  // namespace

void apply_preset(ExperimentConfig& cfg, const std::string& preset) {
    cfg.preset = preset;
    if (preset == "paper") {
        const ExperimentConfig d{};  // struct defaults are paper scale
        cfg.env.geometry = d.env.geometry;
        cfg.env.n_uav = d.env.n_uav;
        cfg.env.n_sensors = d.env.n_sensors;
        cfg.env.max_steps = d.env.max_steps;
        cfg.env.weed_clusters = d.env.weed_clusters;
        cfg.trainer.max_episodes = d.trainer.max_episodes;
        cfg.trainer.hidden_dim = d.trainer.hidden_dim;
        cfg.trainer.batch_size = d.trainer.batch_size;
        cfg.trainer.buffer_capacity = d.trainer.buffer_capacity;
        cfg.trainer.epsilon_decay = d.trainer.epsilon_decay;
        cfg.trainer.eval_episodes = d.trainer.eval_episodes;
    } else if (preset == "desk") {
        cfg.env.geometry.grid_count = 10;
        cfg.env.n_uav = 2;
        cfg.env.n_sensors = 16;
        cfg.env.max_steps = 100;
        cfg.trainer.max_episodes = 300;
        cfg.trainer.hidden_dim = 64;
        cfg.trainer.batch_size = 32;
        cfg.trainer.buffer_capacity = 1u << 14;
        cfg.trainer.epsilon_decay = 0.99;
        cfg.seeds = {1, 2, 3, 4, 5};
    } else if (preset == "toy") {
        cfg.env.geometry.grid_count = 6;
        cfg.env.n_uav = 2;
        cfg.env.n_sensors = 6;
        cfg.env.max_steps = 60;
        cfg.env.weed_clusters = 2;
        cfg.trainer.max_episodes = 50;
        cfg.trainer.hidden_dim = 32;
        cfg.trainer.batch_size = 32;
        cfg.trainer.buffer_capacity = 1u << 12;
        cfg.trainer.epsilon_decay = 0.95;
        cfg.trainer.eval_episodes = 5;
        cfg.seeds = {1, 2};
    } else {
        fail("preset", "must be one of paper, desk, toy");
    }
}

void validate(const ExperimentConfig& cfg) {
    const auto& g = cfg.env.geometry;
    check(g.grid_count >= 2, "geometry.grid_count", "must be >= 2");
    check(g.cell_size > 0, "geometry.cell_size_m", "must be positive");
    check(g.altitude > 0, "geometry.altitude_m", "must be positive");
    check(g.fov_cells >= 1 && g.fov_cells % 2 == 1, "geometry.fov_cells",
          "must be odd and >= 1");
    check(cfg.env.n_uav >= 1, "env.n_uav", "must be >= 1");
    check(cfg.env.n_sensors >= 0, "env.n_sensors", "must be >= 0");
    check(cfg.env.n_uav + cfg.env.n_sensors <= g.grid_count * g.grid_count,
          "env.n_sensors", "UAVs + sensors exceed the cell count");
    check(cfg.env.max_steps >= 1, "env.max_steps", "must be >= 1");
    check(cfg.env.dt > 0, "env.dt_s", "must be positive");
    check(cfg.env.weed_clusters >= 0, "env.weed_clusters", "must be >= 0");
    check(cfg.env.physics.valid(), "physics", "parameters out of range");
    check(cfg.env.comm.valid(), "comm", "parameters out of range");

    const auto& t = cfg.trainer;
    check(t.gamma > 0 && t.gamma <= 1, "trainer.gamma", "must be in (0,1]");
    check(t.batch_size >= 1, "trainer.batch_size", "must be >= 1");
    check(t.tau >= 0 && t.tau <= 1, "trainer.tau", "must be in [0,1]");
    check(t.learning_rate > 0, "trainer.learning_rate", "must be positive");
    check(t.hidden_dim >= 1, "trainer.hidden_dim", "must be >= 1");
    check(t.epsilon_init >= 0 && t.epsilon_init <= 1, "trainer.epsilon_init",
          "must be in [0,1]");
    check(t.epsilon_min >= 0 && t.epsilon_min <= 1, "trainer.epsilon_min",
          "must be in [0,1]");
    check(t.epsilon_decay > 0 && t.epsilon_decay <= 1, "trainer.epsilon_decay",
          "must be in (0,1]");
    check(t.max_episodes >= 1, "trainer.max_episodes", "must be >= 1");
    check(t.sigma2 >= 0, "trainer.sigma2", "must be >= 0");
    check(t.eval_episodes >= 1, "trainer.eval_episodes", "must be >= 1");

    const auto& im = cfg.imitation;
    check(im.vartheta >= 0 && im.vartheta <= 1, "imitation.vartheta",
          "must be in [0,1]");
    check(im.delta >= 1, "imitation.delta", "must be >= 1");
    check(im.alpha1 > 0 && im.alpha1 <= 1, "imitation.alpha1", "must be in (0,1]");
    check(im.alpha2 >= 1, "imitation.alpha2", "must be >= 1");

    check(!cfg.seeds.empty(), "seeds", "need at least one seed");
    check(!cfg.algorithms.empty(), "algorithms", "need at least one algorithm");
    static const std::set<std::string> known{"dqn", "ddqn", "itdqn",
                                            "aco", "pso", "ga"};
    for (const auto& a : cfg.algorithms)
        if (!known.contains(a)) fail("algorithms", "unknown algorithm " + a);
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    Section root(j, "config");
    std::string preset = "paper";
    root.get("preset", preset);
    apply_preset(cfg, preset);

    if (root.has("geometry")) {
        Section s(root.sub("geometry"), "geometry");
        s.get("grid_count", cfg.env.geometry.grid_count);
        s.get("cell_size_m", cfg.env.geometry.cell_size);
        s.get("altitude_m", cfg.env.geometry.altitude);
        s.get("fov_cells", cfg.env.geometry.fov_cells);
        s.get("uav_sep_threshold_m", cfg.env.geometry.uav_sep_threshold);
        s.finish();
    }
    if (root.has("env")) {
        Section s(root.sub("env"), "env");
        s.get("n_uav", cfg.env.n_uav);
        s.get("n_sensors", cfg.env.n_sensors);
        s.get("max_steps", cfg.env.max_steps);
        s.get("dt_s", cfg.env.dt);
        s.get("weed_clusters", cfg.env.weed_clusters);
        s.get("weed_floor", cfg.env.weed_floor);
        s.get("min_collection_prob", cfg.env.min_collection_prob);
        s.finish();
    }
    if (root.has("physics")) {
        auto& p = cfg.env.physics;
        Section s(root.sub("physics"), "physics");
        s.get("uav_mass_kg", p.uav_mass);
        s.get("gravity", p.gravity);
        s.get("air_density", p.air_density);
        s.get("viscosity_coeff", p.viscosity_coeff);
        s.get("propeller_count", p.propeller_count);
        s.get("propeller_radius_m", p.propeller_radius);
        s.get("mech_efficiency", p.mech_efficiency);
        s.get("fuselage_area_m2", p.fuselage_area);
        s.get("static_power_w", p.static_power);
        s.get("load_capacitance_f", p.load_capacitance);
        s.get("voltage_v", p.voltage);
        s.get("clock_freq_hz", p.clock_freq);
        s.get("activity_factor", p.activity_factor);
        s.get("comm_sense_power_w", p.comm_sense_power);
        s.get("hover_speed_threshold", p.hover_speed_threshold);
        s.get("battery_capacity_j", p.battery_capacity);
        s.get("max_acceleration", p.max_acceleration);
        s.finish();
    }
    if (root.has("comm")) {
        auto& c = cfg.env.comm;
        Section s(root.sub("comm"), "comm");
        s.get("tx_power_dbm", c.tx_power_dbm);
        s.get("antenna_gain_dbi", c.antenna_gain_dbi);
        s.get("carrier_freq_hz", c.carrier_freq_hz);
        s.get("light_speed", c.light_speed);
        s.get("packet_length_bits", c.packet_length_bits);
        s.get("boltzmann", c.boltzmann);
        s.get("temperature_k", c.temperature_k);
        s.get("bandwidth_hz", c.bandwidth_hz);
        s.finish();
    }
    if (root.has("reward")) {
        auto& r = cfg.env.reward;
        Section s(root.sub("reward"), "reward");
        s.get("p_out", r.p_out);
        s.get("p_bat", r.p_bat);
        s.get("p_clo_coeff", r.p_clo_coeff);
        s.get("i_weed", r.i_weed);
        s.get("i_data", r.i_data);
        s.get("i_exploit", r.i_exploit);
        s.get("i_explore", r.i_explore);
        s.get("b_const", r.b_const);
        s.finish();
    }
    if (root.has("trainer")) {
        auto& t = cfg.trainer;
        Section s(root.sub("trainer"), "trainer");
        s.get("gamma", t.gamma);
        s.get("batch_size", t.batch_size);
        s.get("tau", t.tau);
        s.get("learning_rate", t.learning_rate);
        s.get("hidden_dim", t.hidden_dim);
        s.get("buffer_capacity", t.buffer_capacity);
        s.get("epsilon_init", t.epsilon_init);
        s.get("epsilon_min", t.epsilon_min);
        s.get("epsilon_decay", t.epsilon_decay);
        s.get("max_episodes", t.max_episodes);
        s.get("sigma2", t.sigma2);
        s.get("eval_episodes", t.eval_episodes);
        s.get("max_grad_norm", t.max_grad_norm);
        s.finish();
    }
    if (root.has("imitation")) {
        auto& im = cfg.imitation;
        Section s(root.sub("imitation"), "imitation");
        s.get("vartheta", im.vartheta);
        s.get("delta", im.delta);
        s.get("alpha1", im.alpha1);
        s.get("alpha2", im.alpha2);
        s.get("beta1", im.beta1);
        s.get("beta2", im.beta2);
        s.finish();
    }
    if (root.has("baseline")) {
        auto& b = cfg.baseline;
        Section s(root.sub("baseline"), "baseline");
        s.get("density_threshold", b.density_threshold);
        if (s.has("aco")) {
            Section a(s.sub("aco"), "baseline.aco");
            a.get("ants", b.aco.ants);
            a.get("iterations", b.aco.iterations);
            a.get("evaporation", b.aco.evaporation);
            a.get("alpha", b.aco.alpha);
            a.get("beta", b.aco.beta);
            a.finish();
        }
        if (s.has("pso")) {
            Section a(s.sub("pso"), "baseline.pso");
            a.get("particles", b.pso.particles);
            a.get("iterations", b.pso.iterations);
            a.get("inertia", b.pso.inertia);
            a.get("cognitive", b.pso.cognitive);
            a.get("social", b.pso.social);
            a.finish();
        }
        if (s.has("ga")) {
            Section a(s.sub("ga"), "baseline.ga");
            a.get("population", b.ga.population);
            a.get("generations", b.ga.generations);
            a.get("mutation_rate", b.ga.mutation_rate);
            a.finish();
        }
        s.finish();
    }
    root.get("seeds", cfg.seeds);
    root.get("algorithms", cfg.algorithms);
    root.get("output_dir", cfg.output_dir);
    root.finish();

    validate(cfg);
    return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    const auto& g = cfg.env.geometry;
    const auto& p = cfg.env.physics;
    const auto& c = cfg.env.comm;
    const auto& r = cfg.env.reward;
    const auto& t = cfg.trainer;
    const auto& im = cfg.imitation;
    const auto& b = cfg.baseline;
    return json{
        {"preset", cfg.preset},
        {"geometry",
         {{"grid_count", g.grid_count},
          {"cell_size_m", g.cell_size},
          {"altitude_m", g.altitude},
          {"fov_cells", g.fov_cells},
          {"uav_sep_threshold_m", g.uav_sep_threshold}}},
        {"env",
         {{"n_uav", cfg.env.n_uav},
          {"n_sensors", cfg.env.n_sensors},
          {"max_steps", cfg.env.max_steps},
          {"dt_s", cfg.env.dt},
          {"weed_clusters", cfg.env.weed_clusters},
          {"weed_floor", cfg.env.weed_floor},
          {"min_collection_prob", cfg.env.min_collection_prob}}},
        {"physics",
         {{"uav_mass_kg", p.uav_mass},
          {"gravity", p.gravity},
          {"air_density", p.air_density},
          {"viscosity_coeff", p.viscosity_coeff},
          {"propeller_count", p.propeller_count},
          {"propeller_radius_m", p.propeller_radius},
          {"mech_efficiency", p.mech_efficiency},
          {"fuselage_area_m2", p.fuselage_area},
          {"static_power_w", p.static_power},
          {"load_capacitance_f", p.load_capacitance},
          {"voltage_v", p.voltage},
          {"clock_freq_hz", p.clock_freq},
          {"activity_factor", p.activity_factor},
          {"comm_sense_power_w", p.comm_sense_power},
          {"hover_speed_threshold", p.hover_speed_threshold},
          {"battery_capacity_j", p.battery_capacity},
          {"max_acceleration", p.max_acceleration}}},
        {"comm",
         {{"tx_power_dbm", c.tx_power_dbm},
          {"antenna_gain_dbi", c.antenna_gain_dbi},
          {"carrier_freq_hz", c.carrier_freq_hz},
          {"light_speed", c.light_speed},
          {"packet_length_bits", c.packet_length_bits},
          {"boltzmann", c.boltzmann},
          {"temperature_k", c.temperature_k},
          {"bandwidth_hz", c.bandwidth_hz}}},
        {"reward",
         {{"p_out", r.p_out},
          {"p_bat", r.p_bat},
          {"p_clo_coeff", r.p_clo_coeff},
          {"i_weed", r.i_weed},
          {"i_data", r.i_data},
          {"i_exploit", r.i_exploit},
          {"i_explore", r.i_explore},
          {"b_const", r.b_const}}},
        {"trainer",
         {{"gamma", t.gamma},
          {"batch_size", t.batch_size},
          {"tau", t.tau},
          {"learning_rate", t.learning_rate},
          {"hidden_dim", t.hidden_dim},
          {"buffer_capacity", t.buffer_capacity},
          {"epsilon_init", t.epsilon_init},
          {"epsilon_min", t.epsilon_min},
          {"epsilon_decay", t.epsilon_decay},
          {"max_episodes", t.max_episodes},
          {"sigma2", t.sigma2},
          {"eval_episodes", t.eval_episodes},
          {"max_grad_norm", t.max_grad_norm}}},
        {"imitation",
         {{"vartheta", im.vartheta},
          {"delta", im.delta},
          {"alpha1", im.alpha1},
          {"alpha2", im.alpha2},
          {"beta1", im.beta1},
          {"beta2", im.beta2}}},
        {"baseline",
         {{"density_threshold", b.density_threshold},
          {"aco",
           {{"ants", b.aco.ants},
            {"iterations", b.aco.iterations},
            {"evaporation", b.aco.evaporation},
            {"alpha", b.aco.alpha},
            {"beta", b.aco.beta}}},
          {"pso",
           {{"particles", b.pso.particles},
            {"iterations", b.pso.iterations},
            {"inertia", b.pso.inertia},
            {"cognitive", b.pso.cognitive},
            {"social", b.pso.social}}},
          {"ga",
           {{"population", b.ga.population},
            {"generations", b.ga.generations},
            {"mutation_rate", b.ga.mutation_rate}}}}},
        {"seeds", cfg.seeds},
        {"algorithms", cfg.algorithms},
        {"output_dir", cfg.output_dir},
    };
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("load_config: cannot open " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    std::string text = buf.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) text = "{}";
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument("load_config: " + path + ": " + e.what());
    }
    return config_from_json(j);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
    const std::string s = config_to_json(cfg).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) h = (h ^ ch) * 0x100000001b3ULL;
    return h;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(config_hash(cfg)));
    return buf;
}

}  // namespace agrisim
