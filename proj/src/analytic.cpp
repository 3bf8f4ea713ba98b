#include "lora/analytic.hpp"

#include <cmath>

#include "lora/units.hpp"

namespace lora {

namespace {

// 1 - ln(1+x)/x for x > 0, the bracket of the Laplace exponent. Series near
// zero where the direct form cancels.
double one_minus_log1p_over(double x) {
  if (x < 1e-4) return x * (0.5 - x * (1.0 / 3.0 - x * 0.25));
  return 1.0 - std::log1p(x) / x;
}

}  // namespace

void ZoneScenario::validate() const {
  if (sf < kMinSf || sf > kMaxSf) throw precondition_error("sf must lie in 7..12");
  if (area_m2 < 0) throw precondition_error("zone area must be nonnegative");
  if (mean_rx_power_w <= 0) throw precondition_error("mean_rx_power_w must be positive");
  if (duty < 0 || duty >= 1) throw precondition_error("duty must lie in [0,1)");
  if (density_per_m2 <= 0) throw precondition_error("density must be positive");
  if (noise_w <= 0) throw precondition_error("noise_w must be positive");
  if (fading_rate <= 0) throw precondition_error("fading_rate must be positive");
  if (snr_threshold <= 0 || sir_threshold <= 0)
    throw precondition_error("thresholds must be positive");
  if (bit_rate_bps <= 0) throw precondition_error("bit_rate_bps must be positive");
}

ZoneScenario make_zone_scenario(int sf, const Partition& part, const DutyPlan& duties,
                                const PowerPolicy& policy, const NetworkConfig& cfg,
                                const SfTable& table) {
  const SfParams& p = table[sf_index(sf)];
  ZoneScenario sc;
  sc.sf = sf;
  sc.area_m2 = zone_areas_m2(part)[sf_index(sf)];
  sc.mean_rx_power_w = policy.mean_rx_power_w[sf_index(sf)];
  sc.duty = duties.duty[sf_index(sf)];
  sc.density_per_m2 = cfg.active_density_per_m2;
  sc.noise_w = cfg.noise_w;
  sc.fading_rate = cfg.fading_rate;
  sc.snr_threshold = p.snr_threshold;
  sc.sir_threshold = p.sir_threshold;
  sc.bit_rate_bps = bit_rate_bps(p);
  return sc;
}

double sir_constant(double sir_threshold) {
  if (sir_threshold <= 0) throw precondition_error("sir_threshold must be positive");
  return one_minus_log1p_over(sir_threshold);
}

double interference_laplace(double z, const ZoneScenario& sc) {
  if (z < 0) throw precondition_error("Laplace argument must be nonnegative");
  if (z == 0.0 || sc.duty == 0.0 || sc.area_m2 == 0.0) return 1.0;
  const double load = 2.0 * sc.density_per_m2 * sc.area_m2 * sc.duty / (1.0 - sc.duty);
  const double x = sc.mean_rx_power_w * z / sc.fading_rate;
  return std::exp(-load * one_minus_log1p_over(x));
}

double noise_success_factor(const ZoneScenario& sc) {
  return std::exp(-sc.noise_w * sc.fading_rate * sc.snr_threshold / sc.mean_rx_power_w);
}

double packet_success_prob(const ZoneScenario& sc) {
  const double noise_exp = sc.noise_w * sc.fading_rate * sc.snr_threshold / sc.mean_rx_power_w;
  const double interf_exp = 2.0 * sc.density_per_m2 * sc.area_m2 *
                            sir_constant(sc.sir_threshold) * sc.duty / (1.0 - sc.duty);
  return std::exp(-noise_exp - interf_exp);
}

double zone_throughput_bps(const ZoneScenario& sc) {
  if (sc.duty == 0.0) return 0.0;
  return sc.bit_rate_bps * sc.duty * packet_success_prob(sc);
}

double optimal_duty_cycle(double lambda_area_c, double duty_cap) {
  if (lambda_area_c < 0) throw precondition_error("lambda*A*C must be nonnegative");
  if (lambda_area_c == 0.0) return duty_cap;
  const double y = lambda_area_c;
  const double unconstrained = 1.0 / (1.0 + y + std::sqrt(y * (2.0 + y)));
  return std::min(duty_cap, unconstrained);
}

double optimal_duty_cycle(const ZoneScenario& sc, double duty_cap) {
  return optimal_duty_cycle(sc.density_per_m2 * sc.area_m2 * sir_constant(sc.sir_threshold),
                            duty_cap);
}

ZoneResult evaluate_zone(const ZoneScenario& sc) {
  ZoneResult res;
  res.duty = sc.duty;
  res.sir_constant = sir_constant(sc.sir_threshold);
  res.success_prob = packet_success_prob(sc);
  res.throughput_bps = sc.bit_rate_bps * sc.duty * res.success_prob;
  return res;
}

double spatial_throughput_analytic(const Partition& part, const DutyPlan& duties,
                                   const PowerPolicy& policy, const NetworkConfig& cfg,
                                   const SfTable& table) {
  const auto areas = zone_areas_m2(part);
  double total = 0.0;
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    if (areas[sf_index(s)] == 0.0) continue;
    const ZoneScenario sc = make_zone_scenario(s, part, duties, policy, cfg, table);
    total += cfg.active_density_per_m2 * sc.area_m2 * zone_throughput_bps(sc);
  }
  return total / (kPi * part.cell_radius_m * part.cell_radius_m);
}

}  // namespace lora
