#pragma once

#include "lora/model.hpp"

// Closed-form engine: the Laplace transform of the duration-averaged co-SF
// interference under the Poisson rain model, the packet success probability
// it yields under channel-inversion power control, per-zone throughput, the
// throughput-optimal duty cycle, and analytic spatial throughput.

namespace lora {

// Everything the closed forms need about one SF zone.
struct ZoneScenario {
  int sf = kMinSf;
  double area_m2 = 0.0;          // A_s
  double mean_rx_power_w = 0.0;  // Qbar_s
  double duty = 0.0;             // Delta_s
  double density_per_m2 = 0.0;   // lambda
  double noise_w = 0.0;          // sigma^2
  double fading_rate = 1.0;      // mu
  double snr_threshold = 1.0;    // eta_bar
  double sir_threshold = 1.0;    // gamma_bar
  double bit_rate_bps = 0.0;     // R_s

  void validate() const;
};

struct ZoneResult {
  double success_prob = 0.0;
  double throughput_bps = 0.0;
  double duty = 0.0;
  double sir_constant = 0.0;
};

ZoneScenario make_zone_scenario(int sf, const Partition& part, const DutyPlan& duties,
                                const PowerPolicy& policy, const NetworkConfig& cfg,
                                const SfTable& table);

// C(gamma) = 1 + ln(1/(1+gamma))/gamma, in (0,1) and increasing in gamma.
double sir_constant(double sir_threshold);

// L(z) = exp{ -2*lambda*A*duty/(1-duty) * (1 + mu/(Q z) * ln(mu/(mu + Q z))) },
// the Laplace transform of the duration-averaged interference seen by a
// reference packet. Continuous limit 1 at z = 0 (and for duty = 0 or A = 0).
double interference_laplace(double z, const ZoneScenario& sc);

// exp(-sigma^2 * mu * eta / Qbar): the interference-free success probability.
double noise_success_factor(const ZoneScenario& sc);

// Joint success probability in closed form:
// exp{ -sigma^2*mu*eta/Q - 2*lambda*A*C*duty/(1-duty) }.
// Factorizes exactly as noise_success_factor * interference_laplace(mu*gamma/Q).
double packet_success_prob(const ZoneScenario& sc);

// theta_s = R_s * duty * success probability.
double zone_throughput_bps(const ZoneScenario& sc);

// argmax over duty of zone throughput, capped at duty_cap:
// min{cap, 1/(1 + y + sqrt(y*(2+y)))} with y = lambda*A*C. Empty zones get
// the cap (interference vanishes, throughput is monotone in duty up to it).
double optimal_duty_cycle(double lambda_area_c, double duty_cap);
double optimal_duty_cycle(const ZoneScenario& sc, double duty_cap);

ZoneResult evaluate_zone(const ZoneScenario& sc);

// Sum over zones of lambda*A_s*theta_s divided by the cell area, in bps/m^2.
double spatial_throughput_analytic(const Partition& part, const DutyPlan& duties,
                                   const PowerPolicy& policy, const NetworkConfig& cfg,
                                   const SfTable& table);

}  // namespace lora
