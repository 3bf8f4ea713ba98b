#include "lora/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "lora/units.hpp"

namespace lora::mc {

namespace {

constexpr double kEmptyWidthFrac = 1e-9;  // zone width below this (vs r_c) is empty

double bernoulli_std_error(double p, std::uint64_t n) {
  return n > 0 ? std::sqrt(p * (1.0 - p) / static_cast<double>(n)) : 0.0;
}

struct SumAcc {
  std::uint64_t hits = 0;
  void merge(const SumAcc& o) { hits += o.hits; }
};

struct MeanVarAcc {
  double sum = 0.0;
  double sum_sq = 0.0;
  void merge(const MeanVarAcc& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
};

}  // namespace

double ZoneSim::mean_rx_at(double radius_m) const {
  if (mode == PowerMode::inversion) return zone.mean_rx_power_w;
  const double h2 = gateway_height_m * gateway_height_m;
  return fixed_power_w * reference_gain *
         std::pow(h2 + radius_m * radius_m, -pathloss_exponent / 2.0);
}

ZoneSim make_zone_sim(int sf, const Partition& part, const DutyPlan& duties,
                      const PowerPolicy& policy, const NetworkConfig& cfg, const SfTable& table,
                      PowerMode mode) {
  ZoneSim sim;
  sim.zone = make_zone_scenario(sf, part, duties, policy, cfg, table);
  sim.inner_radius_m = part.inner_edge_m(sf);
  sim.outer_radius_m = part.outer_edge_m(sf);
  sim.packet_duration_s = packet_duration_s(table[sf_index(sf)]);
  sim.mode = mode;
  sim.fixed_power_w = cfg.max_power_w;
  sim.gateway_height_m = cfg.gateway_height_m;
  sim.pathloss_exponent = cfg.pathloss_exponent;
  sim.reference_gain = lora::reference_gain(cfg);
  return sim;
}

double overlap_fraction(double start_s, double packet_duration_s) {
  return std::max(packet_duration_s - std::fabs(start_s), 0.0) / packet_duration_s;
}

std::vector<PacketEvent> sample_poisson_rain(const ZoneSim& sim, Rng& rng) {
  std::vector<PacketEvent> events;
  if (sim.zone.duty <= 0.0 || sim.zone.area_m2 <= 0.0) return events;
  const double t_pkt = sim.packet_duration_s;
  const double rho = sim.zone.duty / ((1.0 - sim.zone.duty) * t_pkt);
  const double mean = sim.zone.density_per_m2 * sim.zone.area_m2 * rho * 2.0 * t_pkt;
  const std::uint64_t count = rng.poisson(mean);
  events.reserve(count);
  const double ri2 = sim.inner_radius_m * sim.inner_radius_m;
  const double ro2 = sim.outer_radius_m * sim.outer_radius_m;
  const double inv_mu = 1.0 / sim.zone.fading_rate;
  for (std::uint64_t k = 0; k < count; ++k) {
    PacketEvent ev;
    ev.start_s = rng.uniform(-t_pkt, t_pkt);
    ev.distance_m = std::sqrt(ri2 + rng.uniform01() * (ro2 - ri2));
    ev.fading = rng.exponential(inv_mu);
    ev.mean_rx_power_w = sim.mean_rx_at(ev.distance_m);
    events.push_back(ev);
  }
  return events;
}

std::vector<PacketEvent> sample_poisson_rain(const ZoneSim& sim, std::uint64_t seed) {
  Rng rng = Rng::substream(seed, 0);
  return sample_poisson_rain(sim, rng);
}

double average_interference_w(std::span<const PacketEvent> events, double packet_duration_s) {
  double total = 0.0;
  for (const PacketEvent& ev : events)
    total += ev.mean_rx_power_w * ev.fading * overlap_fraction(ev.start_s, packet_duration_s);
  return total;
}

McEstimate estimate_success_prob(const ZoneSim& sim, double ref_distance_m,
                                 std::uint64_t trials, std::uint64_t seed, int threads) {
  if (trials == 0) throw precondition_error("trials must be >= 1");
  if (ref_distance_m < sim.inner_radius_m || ref_distance_m > sim.outer_radius_m)
    throw precondition_error("reference distance outside the zone");
  const double signal_mean = sim.mean_rx_at(ref_distance_m);
  const double noise_gate = sim.zone.snr_threshold * sim.zone.noise_w;
  const double gamma = sim.zone.sir_threshold;
  const double inv_mu = 1.0 / sim.zone.fading_rate;

  SumAcc acc = run_trials<SumAcc>(trials, seed, threads, [&](Rng& rng, SumAcc& a) {
    const auto events = sample_poisson_rain(sim, rng);
    const double interference = average_interference_w(events, sim.packet_duration_s);
    const double signal = signal_mean * rng.exponential(inv_mu);
    if (signal >= noise_gate && signal >= gamma * interference) ++a.hits;
  });

  McEstimate est;
  est.trials = trials;
  est.seed = seed;
  est.estimate = static_cast<double>(acc.hits) / static_cast<double>(trials);
  est.std_error = bernoulli_std_error(est.estimate, trials);
  return est;
}

McEstimate estimate_laplace(double z, const ZoneSim& sim, std::uint64_t trials,
                            std::uint64_t seed, int threads) {
  if (trials == 0) throw precondition_error("trials must be >= 1");
  if (z < 0) throw precondition_error("Laplace argument must be nonnegative");

  MeanVarAcc acc = run_trials<MeanVarAcc>(trials, seed, threads, [&](Rng& rng, MeanVarAcc& a) {
    const auto events = sample_poisson_rain(sim, rng);
    const double v = std::exp(-z * average_interference_w(events, sim.packet_duration_s));
    a.sum += v;
    a.sum_sq += v * v;
  });

  McEstimate est;
  est.trials = trials;
  est.seed = seed;
  const double n = static_cast<double>(trials);
  est.estimate = acc.sum / n;
  if (trials > 1) {
    const double var = std::max(0.0, (acc.sum_sq - n * est.estimate * est.estimate) / (n - 1.0));
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

namespace {

// Precomputed zone context for the finite-population walk.
struct ZoneCtx {
  bool active = false;
  double inner2 = 0.0, outer2 = 0.0;
  double area_m2 = 0.0;
  double t_pkt = 0.0;
  double init_mean = 0.0;  // rho * 2T per UE
  double duty = 0.0;
  double bit_rate = 0.0;
  double noise_gate = 0.0;  // eta * sigma^2
  double gamma = 0.0;
  int first_bin = 0;
  int bin_count = 0;
};

struct FiniteAcc {
  std::vector<std::uint64_t> bin_hits;
  std::array<std::uint64_t, kNumSf> zone_hits{};
  double theta_sum = 0.0;
  double theta_sum_sq = 0.0;
  void merge(const FiniteAcc& o) {
    if (bin_hits.size() < o.bin_hits.size()) bin_hits.resize(o.bin_hits.size(), 0);
    for (std::size_t i = 0; i < o.bin_hits.size(); ++i) bin_hits[i] += o.bin_hits[i];
    for (int i = 0; i < kNumSf; ++i) zone_hits[i] += o.zone_hits[i];
    theta_sum += o.theta_sum;
    theta_sum_sq += o.theta_sum_sq;
  }
};

}  // namespace

FiniteResult simulate_finite_population(const FullScenario& scenario, std::uint64_t trials,
                                        std::uint64_t seed, int threads) {
  if (trials == 0) throw precondition_error("trials must be >= 1");
  const NetworkConfig& cfg = scenario.cfg;
  cfg.validate();
  scenario.partition.validate();
  if (scenario.bin_width_m <= 0) throw precondition_error("bin_width_m must be positive");

  const double rc = scenario.partition.cell_radius_m;
  const double cell_area = kPi * rc * rc;
  const double h2 = cfg.gateway_height_m * cfg.gateway_height_m;
  const double alpha0 = reference_gain(cfg);
  const double half_n = cfg.pathloss_exponent / 2.0;
  const double inv_mu = 1.0 / cfg.fading_rate;
  const double p_active = cfg.active_density_per_m2 / cfg.all_density_per_m2;
  const double population_mean = cfg.all_density_per_m2 * cell_area;
  const bool inversion = scenario.mode == PowerMode::inversion;
  const double fixed_power =
      scenario.fixed_power_w > 0 ? scenario.fixed_power_w : cfg.max_power_w;

  auto rx_at = [&](int zi, double r) {
    return inversion ? scenario.policy.mean_rx_power_w[zi]
                     : fixed_power * alpha0 * std::pow(h2 + r * r, -half_n);
  };

  // zone contexts and radial bins
  std::array<ZoneCtx, kNumSf> zones{};
  std::vector<BinEstimate> bins;
  std::vector<double> bin_rx;  // reference mean rx power per bin
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    ZoneCtx& z = zones[sf_index(s)];
    const SfParams& p = scenario.table[sf_index(s)];
    const double ri = scenario.partition.inner_edge_m(s);
    const double ro = scenario.partition.outer_edge_m(s);
    z.active = (ro - ri) > kEmptyWidthFrac * rc;
    z.inner2 = ri * ri;
    z.outer2 = ro * ro;
    z.area_m2 = kPi * (z.outer2 - z.inner2);
    z.t_pkt = packet_duration_s(p);
    z.duty = scenario.duties.duty[sf_index(s)];
    z.init_mean = z.duty > 0 ? z.duty / ((1.0 - z.duty) * z.t_pkt) * 2.0 * z.t_pkt : 0.0;
    z.bit_rate = bit_rate_bps(p);
    z.noise_gate = p.snr_threshold * cfg.noise_w;
    z.gamma = p.sir_threshold;
    z.first_bin = static_cast<int>(bins.size());
    if (!z.active) continue;
    const int nb = std::max(1, static_cast<int>(std::lround((ro - ri) / scenario.bin_width_m)));
    z.bin_count = nb;
    for (int b = 0; b < nb; ++b) {
      BinEstimate bin;
      bin.sf = s;
      const double lo = ri + (ro - ri) * b / nb;
      const double hi = ri + (ro - ri) * (b + 1) / nb;
      bin.center_m = 0.5 * (lo + hi);
      bin.area_m2 = kPi * (hi * hi - lo * lo);
      bins.push_back(bin);
      bin_rx.push_back(rx_at(sf_index(s), bin.center_m));
    }
  }
  const std::size_t nbins = bins.size();

  FiniteAcc total = run_trials<FiniteAcc>(trials, seed, threads, [&](Rng& rng, FiniteAcc& acc) {
    if (acc.bin_hits.empty()) acc.bin_hits.resize(nbins, 0);

    std::array<double, kNumSf> interference{};
    const std::uint64_t population = rng.poisson(population_mean);
    for (std::uint64_t k = 0; k < population; ++k) {
      if (rng.uniform01() >= p_active) continue;
      const double r2 = rng.uniform01() * rc * rc;  // area-uniform on the disk
      int zi = -1;
      for (int i = 0; i < kNumSf; ++i) {
        if (!zones[i].active) continue;
        zi = i;
        if (r2 <= zones[i].outer2) break;
      }
      const ZoneCtx& z = zones[zi];
      if (z.init_mean <= 0.0) continue;
      const std::uint64_t inits = rng.poisson(z.init_mean);
      if (inits == 0) continue;
      const double rx = rx_at(zi, std::sqrt(r2));
      for (std::uint64_t j = 0; j < inits; ++j) {
        const double t = rng.uniform(-z.t_pkt, z.t_pkt);
        const double zeta = rng.exponential(inv_mu);
        interference[zi] += rx * zeta * overlap_fraction(t, z.t_pkt);
      }
    }

    double theta = 0.0;
    for (int zi = 0; zi < kNumSf; ++zi) {
      const ZoneCtx& z = zones[zi];
      if (!z.active) continue;
      const double gate = z.gamma * interference[zi];
      // zone-level reference: anywhere in-zone under power control (the
      // received signal law does not depend on position), the zone edge
      // under fixed power (worst case)
      const double rr = inversion
                            ? std::sqrt(z.inner2 + rng.uniform01() * (z.outer2 - z.inner2))
                            : std::sqrt(z.outer2);
      const double signal = rx_at(zi, rr) * rng.exponential(inv_mu);
      const bool zone_ok = signal >= z.noise_gate && signal >= gate;
      if (zone_ok) ++acc.zone_hits[zi];
      // the spatial total is area-weighted, so fixed power needs its own
      // area-uniform reference
      bool theta_ok = zone_ok;
      if (!inversion) {
        const double ra = std::sqrt(z.inner2 + rng.uniform01() * (z.outer2 - z.inner2));
        const double sa = rx_at(zi, ra) * rng.exponential(inv_mu);
        theta_ok = sa >= z.noise_gate && sa >= gate;
      }
      if (theta_ok) theta += cfg.active_density_per_m2 * z.area_m2 * z.bit_rate * z.duty;
      for (int b = 0; b < z.bin_count; ++b) {
        const double sb = bin_rx[z.first_bin + b] * rng.exponential(inv_mu);
        if (sb >= z.noise_gate && sb >= gate) ++acc.bin_hits[z.first_bin + b];
      }
    }
    theta /= cell_area;
    acc.theta_sum += theta;
    acc.theta_sum_sq += theta * theta;
  });

  FiniteResult result;
  result.trials = trials;
  result.seed = seed;
  result.bins = std::move(bins);
  const double n = static_cast<double>(trials);
  for (std::size_t i = 0; i < nbins; ++i) {
    BinEstimate& bin = result.bins[i];
    const ZoneCtx& z = zones[sf_index(bin.sf)];
    bin.success.trials = trials;
    bin.success.seed = seed;
    bin.success.estimate = total.bin_hits.empty() ? 0.0 : total.bin_hits[i] / n;
    bin.success.std_error = bernoulli_std_error(bin.success.estimate, trials);
    bin.throughput_bps = z.bit_rate * z.duty * bin.success.estimate;
  }
  for (int zi = 0; zi < kNumSf; ++zi) {
    const ZoneCtx& z = zones[zi];
    result.zone_active[zi] = z.active;
    McEstimate& est = result.zone_success[zi];
    est.trials = trials;
    est.seed = seed;
    est.estimate = z.active ? total.zone_hits[zi] / n : 0.0;
    est.std_error = bernoulli_std_error(est.estimate, trials);
    result.zone_throughput_bps[zi] = z.bit_rate * z.duty * est.estimate;
  }
  result.spatial_throughput_bps_m2 = total.theta_sum / n;
  if (trials > 1) {
    const double mean = result.spatial_throughput_bps_m2;
    const double var = std::max(0.0, (total.theta_sum_sq - n * mean * mean) / (n - 1.0));
    result.spatial_std_error_bps_m2 = std::sqrt(var / n);
  }
  return result;
}

double spatial_throughput_mc(const FullScenario& scenario, std::uint64_t trials,
                             std::uint64_t seed, int threads) {
  return simulate_finite_population(scenario, trials, seed, threads).spatial_throughput_bps_m2;
}

}  // namespace lora::mc
