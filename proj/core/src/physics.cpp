#include "agrisim/physics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace agrisim {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

bool PhysicsParams::valid() const {
    return uav_mass > 0 && gravity > 0 && air_density > 0 && viscosity_coeff > 0 &&
           propeller_count > 0 && propeller_radius > 0 && mech_efficiency > 0 &&
           mech_efficiency <= 1 && fuselage_area > 0 && static_power > 0 &&
           load_capacitance > 0 && voltage > 0 && clock_freq > 0 &&
           activity_factor > 0 && activity_factor <= 1 && comm_sense_power > 0 &&
           hover_speed_threshold > 0 && battery_capacity > 0;
}

bool CommParams::valid() const {
    return std::isfinite(tx_power_dbm) && carrier_freq_hz > 0 && light_speed > 0 &&
           packet_length_bits >= 1 && boltzmann > 0 && temperature_k > 0 &&
           bandwidth_hz > 0;
}

DragLift drag_lift_coefficients(const PhysicsParams& p) {
    const double rotor_disk = p.propeller_count * kPi * p.propeller_radius * p.propeller_radius;
    const double a_uav = p.fuselage_area + rotor_disk;
    DragLift dl;
    dl.c1 = 0.5 * p.air_density * a_uav * p.viscosity_coeff;
    dl.c2 = p.uav_mass * p.uav_mass / (p.mech_efficiency * p.air_density * rotor_disk);
    return dl;
}

double flight_power(double vx, double vy, const PhysicsParams& p) {
    const DragLift dl = drag_lift_coefficients(p);
    const double planar_sq = vx * vx + vy * vy;
    const double speed = std::max(std::sqrt(planar_sq), p.hover_speed_threshold);
    return dl.c1 * speed * speed + dl.c2 * planar_sq / (speed * speed * speed) +
           p.uav_mass * p.gravity * speed;
}

double computation_power(const PhysicsParams& p) {
    return p.static_power +
           p.load_capacitance * p.voltage * p.voltage * p.clock_freq * p.activity_factor;
}

EnergyLedger step_energy(double vx, double vy, double dt, const PhysicsParams& p) {
    if (!(dt > 0)) {
        throw std::invalid_argument("step_energy: dt must be positive");
    }
    EnergyLedger d;
    d.e_cmp = computation_power(p) * dt;
    d.e_cs = p.comm_sense_power * dt;
    d.e_fly = flight_power(vx, vy, p) * dt;
    d.total = d.e_cmp + d.e_cs + d.e_fly;
    return d;
}

double remaining_battery(double battery_capacity, double cumulative) {
    return battery_capacity - cumulative;
}

double thermal_noise(const CommParams& c) {
    return c.boltzmann * c.temperature_k * c.bandwidth_hz;
}

double path_loss_db(double dist_m, const CommParams& c) {
    if (!(dist_m > 0)) {
        throw std::domain_error("path_loss_db: distance must be positive");
    }
    const double fspl =
        20.0 * std::log10(4.0 * kPi * c.carrier_freq_hz * dist_m / c.light_speed);
    const double fc_ghz = c.carrier_freq_hz * 1e-9;
    const double excess = 0.2 * std::pow(fc_ghz, 0.3) * std::pow(dist_m, 0.6);
    return fspl + excess;
}

double sinr_linear(const CommParams& c, double pl_db) {
    const double rx_dbm = c.tx_power_dbm + c.antenna_gain_dbi - pl_db;
    const double rx_w = std::pow(10.0, (rx_dbm - 30.0) / 10.0);
    return rx_w / thermal_noise(c);
}

double ber_bpsk(double sinr) {
    // Q(sqrt(2*sinr)) with Q(x) ~= exp(-x^2/2)/2.
    const double ber = 0.5 * std::exp(-sinr);
    return std::clamp(ber, 0.0, 0.5);
}

double packet_loss_rate(double ber, int l_bits) {
    const double plr = 1.0 - std::pow(1.0 - ber, static_cast<double>(l_bits));
    return std::clamp(plr, 0.0, 1.0);
}

double collection_probability(const std::array<double, 3>& uav_pos,
                              const std::array<double, 3>& sensor_pos,
                              const CommParams& c) {
    const double dx = uav_pos[0] - sensor_pos[0];
    const double dy = uav_pos[1] - sensor_pos[1];
    const double dz = uav_pos[2] - sensor_pos[2];
    const double dist = std::max(std::sqrt(dx * dx + dy * dy + dz * dz), 1.0);
    const double pl = path_loss_db(dist, c);
    const double sinr = sinr_linear(c, pl);
    const double ber = ber_bpsk(sinr);
    return 1.0 - packet_loss_rate(ber, c.packet_length_bits);
}

}  // namespace agrisim
