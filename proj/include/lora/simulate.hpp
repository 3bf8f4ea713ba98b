#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lora/analytic.hpp"
#include "lora/model.hpp"
#include "lora/rng.hpp"

// Monte-Carlo ground truth. Samples the space-time Poisson rain of co-SF
// packets (and the finite-population variant), evaluates the exact joint
// SNR-and-SIR success event, and estimates success probabilities,
// throughputs, spatial throughput, and Laplace transforms with confidence
// intervals. Estimates are bit-identical for a given (scenario, trials,
// seed) at any thread count.

namespace lora::mc {

// One co-SF packet overlapping the reference window.
struct PacketEvent {
  double start_s = 0.0;          // t_k, relative to the reference packet start
  double distance_m = 0.0;       // d_k
  double fading = 0.0;           // zeta_k
  double mean_rx_power_w = 0.0;  // P_k * gbar(d_k)
};

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

enum class PowerMode {
  inversion,  // every UE received at its zone's Qbar_s
  fixed,      // every UE transmits at a fixed power (benchmark schemes)
};

// A zone prepared for simulation.
struct ZoneSim {
  ZoneScenario zone;
  double inner_radius_m = 0.0;
  double outer_radius_m = 0.0;
  double packet_duration_s = 0.0;
  PowerMode mode = PowerMode::inversion;
  double fixed_power_w = 0.0;
  double gateway_height_m = 0.0;
  double pathloss_exponent = 0.0;
  double reference_gain = 0.0;

  // Mean received power of a transmitter at radius r under this zone's mode.
  double mean_rx_at(double radius_m) const;
};

ZoneSim make_zone_sim(int sf, const Partition& part, const DutyPlan& duties,
                      const PowerPolicy& policy, const NetworkConfig& cfg, const SfTable& table,
                      PowerMode mode);

// Triangular kernel max(T - |t|, 0)/T: the fraction of the reference packet
// a transmission starting at t overlaps.
double overlap_fraction(double start_s, double packet_duration_s);

// One realization of the co-SF rain over the window (-T_s, T_s): event count
// ~ Poisson(lambda*A*rho*2T), start times uniform on the window, positions
// area-uniform on the ring, i.i.d. exponential fading marks.
std::vector<PacketEvent> sample_poisson_rain(const ZoneSim& sim, Rng& rng);
std::vector<PacketEvent> sample_poisson_rain(const ZoneSim& sim, std::uint64_t seed);

// Duration-averaged aggregate interference: sum of rx * zeta * h(t).
double average_interference_w(std::span<const PacketEvent> events, double packet_duration_s);

// Bernoulli mean of the exact joint event {SNR >= eta} and {SIR >= gamma}
// for a reference packet at ref_distance_m.
McEstimate estimate_success_prob(const ZoneSim& sim, double ref_distance_m,
                                 std::uint64_t trials, std::uint64_t seed, int threads = 1);

// Sample mean of exp(-z * Ibar) over rain realizations.
McEstimate estimate_laplace(double z, const ZoneSim& sim, std::uint64_t trials,
                            std::uint64_t seed, int threads = 1);

// Whole-cell scenario for the finite-population simulator.
struct FullScenario {
  NetworkConfig cfg;
  SfTable table;
  Partition partition;
  DutyPlan duties;
  PowerPolicy policy;  // used in inversion mode
  PowerMode mode = PowerMode::inversion;
  double fixed_power_w = 0.0;  // used in fixed mode
  double bin_width_m = 25.0;
};

struct BinEstimate {
  int sf = 0;
  double center_m = 0.0;
  double area_m2 = 0.0;
  McEstimate success;
  double throughput_bps = 0.0;  // R_s * duty_s * p_hat
};

struct FiniteResult {
  std::vector<BinEstimate> bins;
  // In-zone reference: area-uniform under power inversion (position does not
  // change the signal law), zone edge (worst case) under fixed power.
  std::array<McEstimate, kNumSf> zone_success{};
  std::array<double, kNumSf> zone_throughput_bps{};
  std::array<bool, kNumSf> zone_active{};
  double spatial_throughput_bps_m2 = 0.0;
  double spatial_std_error_bps_m2 = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
};

// The produce-and-thin population process: per realization, draw the full UE
// set (density lambda_all), keep each UE active with probability
// lambda/lambda_all, assign SFs by zone, give each active UE a Poisson packet
// process over the overlap window, then score one reference packet per zone
// and per radial bin against the exact joint success event.
FiniteResult simulate_finite_population(const FullScenario& scenario, std::uint64_t trials,
                                        std::uint64_t seed, int threads = 1);

// Total estimated UE throughput divided by cell area, in bps/m^2.
double spatial_throughput_mc(const FullScenario& scenario, std::uint64_t trials,
                             std::uint64_t seed, int threads = 1);

}  // namespace lora::mc
