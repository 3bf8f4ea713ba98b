#pragma once

#include <array>

#include "lora/errors.hpp"

// Deterministic radio/geometry math: rates, durations, path gains, zone
// partitions, access rates, and the distance-based power-control policy.

namespace lora {

constexpr int kMinSf = 7;
constexpr int kMaxSf = 12;
constexpr int kNumSf = kMaxSf - kMinSf + 1;

inline int sf_index(int sf) { return sf - kMinSf; }

// Global physical and regulatory parameters. Defaults are the standard
// EU868 single-gateway evaluation setup.
struct NetworkConfig {
  double gateway_height_m = 25.0;
  double cell_radius_m = 1000.0;
  double active_density_per_m2 = 700e-6;  // lambda
  double all_density_per_m2 = 1400e-6;    // lambda_all >= lambda (finite-population MC)
  double pathloss_exponent = 3.5;         // n >= 2
  double carrier_hz = 868e6;
  double lightspeed_m_s = 3e8;
  double noise_w = 1.9952623149688828e-15;     // -117 dBm
  double fading_rate = 1.0;                    // mu; fading ~ Exp(mean 1/mu)
  double max_power_w = 0.025118864315095822;   // 14 dBm
  double max_duty = 0.01;                      // Delta_max < 1
  double ib_tolerance_bps = 0.02;              // epsilon for throughput balancing

  void validate() const;
};

// Per-SF radio parameters. Thresholds are linear ratios.
struct SfParams {
  int sf = kMinSf;
  double bandwidth_hz = 125e3;
  double code_rate = 0.8;
  double payload_bits = 200.0;
  double snr_threshold = 1.0;
  double sir_threshold = 1.0;

  void validate() const;
};

using SfTable = std::array<SfParams, kNumSf>;

// B = 125 kHz, C = 4/5, 25-byte payloads, the usual per-SF demodulation SNR
// floors (-6 .. -20 dB) and a 6 dB co-SF rejection threshold.
SfTable default_sf_table();
void validate(const SfTable& table);

// R_s = s/2^s * B * C
double bit_rate_bps(const SfParams& p);
// T_s = L_s / R_s
double packet_duration_s(const SfParams& p);

// alpha_0 = (4*pi*f_c/c)^-2, mean channel gain at 1 m
double reference_gain(const NetworkConfig& cfg);
// gbar(d) = alpha_0 * (H^2 + d^2)^(-n/2)
double mean_path_gain(double distance_m, const NetworkConfig& cfg);

// Distance at which P_max*gbar(d) = snr_threshold*noise; throws
// precondition_error when the SF cannot close the link even at d = 0.
double max_range_m(const SfParams& p, const NetworkConfig& cfg);

// SF zone boundaries r_7..r_11. r_6 = 0 and r_12 = cell radius by convention.
// Coincident boundaries (empty zones) are legal.
struct Partition {
  std::array<double, kNumSf - 1> boundaries_m{};
  double cell_radius_m = 0.0;

  double inner_edge_m(int sf) const;
  double outer_edge_m(int sf) const;
  // SF owning radius r; ties go to the innermost non-empty zone.
  int sf_at(double radius_m) const;
  void validate() const;
};

Partition equal_area_partition(double cell_radius_m);
// Boundaries at each SF's path-loss-only max range, clamped into [0, r_c].
Partition max_range_partition(const NetworkConfig& cfg, const SfTable& table);

// A_s = pi*(r_s^2 - r_{s-1}^2); sums to the cell area.
std::array<double, kNumSf> zone_areas_m2(const Partition& part);

// Transmission initiations per UE per second: rho = duty/((1-duty)*T_s).
double channel_access_rate(double duty, const SfParams& p);

// Per-SF duty cycles.
struct DutyPlan {
  std::array<double, kNumSf> duty{};
};

// Channel-inversion policy: every UE with SF s is received at the same mean
// power Qbar_s = P_s_edge * gbar(r_s), the zone-edge value.
struct PowerPolicy {
  std::array<double, kNumSf> edge_power_w{};     // P_s^edge (transmit, at r_s)
  std::array<double, kNumSf> mean_rx_power_w{};  // Qbar_s (received)
};

PowerPolicy channel_inversion_policy(const Partition& part, const NetworkConfig& cfg,
                                     double edge_power_w);

// P(s,r) = P_s_edge * ((H^2+r^2)/(H^2+r_s^2))^(n/2); throws when r lies
// outside zone s.
double transmit_power_w(int sf, double distance_m, const Partition& part,
                        const PowerPolicy& policy, const NetworkConfig& cfg);

}  // namespace lora
