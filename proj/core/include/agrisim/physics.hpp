#pragma once

#include <array>
#include <cstdint>

namespace agrisim {

// UAV energy model constants. Defaults match the reference quadrotor
// configuration used throughout the experiments.
struct PhysicsParams {
    double uav_mass = 1.0;            // kg
    double gravity = 9.8;             // m/s^2
    double air_density = 1.225;       // kg/m^3
    double viscosity_coeff = 0.5;     // C_d, dimensionless
    int propeller_count = 4;
    double propeller_radius = 0.1;    // m
    double mech_efficiency = 0.8;     // (0,1]
    double fuselage_area = 0.01;      // m^2
    double static_power = 4.0;        // W
    double load_capacitance = 6.4e-9; // F
    double voltage = 5.0;             // V
    double clock_freq = 200e6;        // Hz
    double activity_factor = 0.5;     // (0,1]
    double comm_sense_power = 1.0;    // W (30 dBm), stored linear
    double hover_speed_threshold = 0.1; // m/s
    double battery_capacity = 51840.0;  // J
    double max_acceleration = 28.284271247461902; // m/s^2, recorded but unused

    bool valid() const;
};

// Radio link constants for UAV <-> ground sensor transfers.
struct CommParams {
    double tx_power_dbm = 17.0;       // sensor TX power
    double antenna_gain_dbi = 0.0;
    double carrier_freq_hz = 2.8e9;
    double light_speed = 3e8;         // m/s
    int packet_length_bits = 160;     // 20 bytes
    double boltzmann = 1.38e-23;      // J/K
    double temperature_k = 298.0;
    double bandwidth_hz = 20e6;

    bool valid() const;
};

// Per-UAV cumulative energy account. total is kept equal to the
// component sum exactly (same additions, same order).
struct EnergyLedger {
    double e_cmp = 0.0;
    double e_cs = 0.0;
    double e_fly = 0.0;
    double total = 0.0;

    void accumulate(const EnergyLedger& delta) {
        e_cmp += delta.e_cmp;
        e_cs += delta.e_cs;
        e_fly += delta.e_fly;
        total += delta.total;
    }
};

// Drag coefficient c1 [kg/m] and lift coefficient c2 [kg*m].
struct DragLift {
    double c1;
    double c2;
};

DragLift drag_lift_coefficients(const PhysicsParams& p);

// Flight power [W] for a planar velocity (vx, vy). Speed is clamped to
// the hover threshold from below so the lift term stays bounded.
double flight_power(double vx, double vy, const PhysicsParams& p);

// Static + dynamic computation power [W].
double computation_power(const PhysicsParams& p);

// Energy spent over one step of duration dt at constant velocity.
// Throws std::invalid_argument on dt <= 0.
EnergyLedger step_energy(double vx, double vy, double dt, const PhysicsParams& p);

// Remaining battery [J]; may go negative to signal an outage.
double remaining_battery(double battery_capacity, double cumulative);

// Thermal noise power [W].
double thermal_noise(const CommParams& c);

// Path loss [dB] over a distance in meters: free-space term plus an
// excess-loss term with the carrier frequency in GHz.
// Throws std::domain_error on dist <= 0.
double path_loss_db(double dist_m, const CommParams& c);

// Linear SINR: link budget in the dB domain, then converted to watts
// and divided by thermal noise.
double sinr_linear(const CommParams& c, double pl_db);

// BPSK bit error rate with the exponential Q-function approximation,
// clamped to [0, 0.5].
double ber_bpsk(double sinr);

// 1 - (1 - ber)^L.
double packet_loss_rate(double ber, int l_bits);

// Success probability of one packet over the full physical chain.
// 3D distance (altitude included) with a 1 m floor.
double collection_probability(const std::array<double, 3>& uav_pos,
                              const std::array<double, 3>& sensor_pos,
                              const CommParams& c);

}  // namespace agrisim
