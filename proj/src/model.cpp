#include "lora/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lora/units.hpp"

namespace lora {

namespace {

void require(bool cond, const char* what) {
  if (!cond) throw precondition_error(what);
}

}  // namespace

void NetworkConfig::validate() const {
  require(gateway_height_m > 0, "gateway_height_m must be positive");
  require(cell_radius_m > 0, "cell_radius_m must be positive");
  require(active_density_per_m2 > 0, "active_density_per_m2 must be positive");
  require(all_density_per_m2 >= active_density_per_m2,
          "all_density_per_m2 must be >= active_density_per_m2");
  require(pathloss_exponent >= 2.0, "pathloss_exponent must be >= 2");
  require(carrier_hz > 0, "carrier_hz must be positive");
  require(lightspeed_m_s > 0, "lightspeed_m_s must be positive");
  require(noise_w > 0, "noise_w must be positive");
  require(fading_rate > 0, "fading_rate must be positive");
  require(max_power_w > 0, "max_power_w must be positive");
  require(max_duty >= 0 && max_duty < 1, "max_duty must lie in [0,1)");
  require(ib_tolerance_bps > 0, "ib_tolerance_bps must be positive");
}

void SfParams::validate() const {
  require(sf >= kMinSf && sf <= kMaxSf, "sf must lie in 7..12");
  require(bandwidth_hz > 0, "bandwidth_hz must be positive");
  require(code_rate > 0, "code_rate must be positive");
  require(payload_bits > 0, "payload_bits must be positive");
  require(snr_threshold > 0, "snr_threshold must be positive");
  require(sir_threshold > 0, "sir_threshold must be positive");
}

SfTable default_sf_table() {
  const double eta_db[kNumSf] = {-6.0, -9.0, -12.0, -15.0, -17.5, -20.0};
  SfTable table;
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    SfParams& p = table[sf_index(s)];
    p.sf = s;
    p.bandwidth_hz = 125e3;
    p.code_rate = 0.8;
    p.payload_bits = 25 * 8.0;
    p.snr_threshold = db_to_linear(eta_db[sf_index(s)]);
    p.sir_threshold = db_to_linear(6.0);
  }
  return table;
}

void validate(const SfTable& table) {
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    require(table[sf_index(s)].sf == s, "SfTable entries must be ordered SF 7..12");
    table[sf_index(s)].validate();
  }
}

double bit_rate_bps(const SfParams& p) {
  return static_cast<double>(p.sf) / std::exp2(p.sf) * p.bandwidth_hz * p.code_rate;
}

double packet_duration_s(const SfParams& p) { return p.payload_bits / bit_rate_bps(p); }

double reference_gain(const NetworkConfig& cfg) {
  const double k = 4.0 * kPi * cfg.carrier_hz / cfg.lightspeed_m_s;
  return 1.0 / (k * k);
}

double mean_path_gain(double distance_m, const NetworkConfig& cfg) {
  const double h2 = cfg.gateway_height_m * cfg.gateway_height_m;
  return reference_gain(cfg) *
         std::pow(h2 + distance_m * distance_m, -cfg.pathloss_exponent / 2.0);
}

double max_range_m(const SfParams& p, const NetworkConfig& cfg) {
  // invert P_max*gbar(d) = eta*sigma^2 for d
  const double budget = cfg.max_power_w * reference_gain(cfg) / (p.snr_threshold * cfg.noise_w);
  const double h2 = cfg.gateway_height_m * cfg.gateway_height_m;
  const double reach2 = std::pow(budget, 2.0 / cfg.pathloss_exponent);
  if (reach2 < h2)
    throw precondition_error("SF " + std::to_string(p.sf) +
                             " cannot close the link even directly below the gateway");
  return std::sqrt(reach2 - h2);
}

double Partition::inner_edge_m(int sf) const {
  require(sf >= kMinSf && sf <= kMaxSf, "sf must lie in 7..12");
  return sf == kMinSf ? 0.0 : boundaries_m[sf_index(sf) - 1];
}

double Partition::outer_edge_m(int sf) const {
  require(sf >= kMinSf && sf <= kMaxSf, "sf must lie in 7..12");
  return sf == kMaxSf ? cell_radius_m : boundaries_m[sf_index(sf)];
}

int Partition::sf_at(double radius_m) const {
  require(radius_m >= 0 && radius_m <= cell_radius_m, "radius outside the cell");
  for (int s = kMinSf; s < kMaxSf; ++s) {
    if (radius_m <= outer_edge_m(s) && outer_edge_m(s) > inner_edge_m(s)) return s;
  }
  return kMaxSf;
}

void Partition::validate() const {
  require(cell_radius_m > 0, "cell_radius_m must be positive");
  double prev = 0.0;
  for (double b : boundaries_m) {
    require(b >= prev, "zone boundaries must be nondecreasing");
    prev = b;
  }
  require(prev <= cell_radius_m, "outermost boundary exceeds the cell radius");
}

Partition equal_area_partition(double cell_radius_m) {
  require(cell_radius_m > 0, "cell_radius_m must be positive");
  Partition part;
  part.cell_radius_m = cell_radius_m;
  for (int k = 1; k <= kNumSf - 1; ++k)
    part.boundaries_m[k - 1] = cell_radius_m * std::sqrt(static_cast<double>(k) / kNumSf);
  return part;
}

Partition max_range_partition(const NetworkConfig& cfg, const SfTable& table) {
  Partition part;
  part.cell_radius_m = cfg.cell_radius_m;
  double prev = 0.0;
  for (int s = kMinSf; s < kMaxSf; ++s) {
    double r = std::clamp(max_range_m(table[sf_index(s)], cfg), prev, cfg.cell_radius_m);
    part.boundaries_m[sf_index(s)] = r;
    prev = r;
  }
  return part;
}

std::array<double, kNumSf> zone_areas_m2(const Partition& part) {
  part.validate();
  std::array<double, kNumSf> areas{};
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    const double ri = part.inner_edge_m(s);
    const double ro = part.outer_edge_m(s);
    areas[sf_index(s)] = kPi * (ro * ro - ri * ri);
  }
  return areas;
}

double channel_access_rate(double duty, const SfParams& p) {
  require(duty >= 0 && duty < 1, "duty must lie in [0,1)");
  return duty / ((1.0 - duty) * packet_duration_s(p));
}

PowerPolicy channel_inversion_policy(const Partition& part, const NetworkConfig& cfg,
                                     double edge_power_w) {
  require(edge_power_w > 0 && edge_power_w <= cfg.max_power_w,
          "edge power must lie in (0, max_power_w]");
  PowerPolicy policy;
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    policy.edge_power_w[sf_index(s)] = edge_power_w;
    policy.mean_rx_power_w[sf_index(s)] = edge_power_w * mean_path_gain(part.outer_edge_m(s), cfg);
  }
  return policy;
}

double transmit_power_w(int sf, double distance_m, const Partition& part,
                        const PowerPolicy& policy, const NetworkConfig& cfg) {
  const double ri = part.inner_edge_m(sf);
  const double ro = part.outer_edge_m(sf);
  if (distance_m < ri || distance_m > ro)
    throw precondition_error("distance " + std::to_string(distance_m) + " m outside SF " +
                             std::to_string(sf) + " zone");
  const double h2 = cfg.gateway_height_m * cfg.gateway_height_m;
  const double ratio = (h2 + distance_m * distance_m) / (h2 + ro * ro);
  return policy.edge_power_w[sf_index(sf)] * std::pow(ratio, cfg.pathloss_exponent / 2.0);
}

}  // namespace lora
