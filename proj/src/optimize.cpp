#include "lora/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lora/units.hpp"

namespace lora::opt {

namespace {

constexpr double kBoundaryTolM = 1e-3;     // bisection width target
constexpr double kEmptyWidthFrac = 1e-9;   // zone width below this (vs r_c) is empty
constexpr double kMoveTolFrac = 1e-9;      // moves below this (vs r_c) are "no move"

// Throughput of SF s occupying the ring [r_in, r_out] with zone-edge power
// P_max. Continuous at r_out = r_in: the empty-zone limit is the duty-capped
// noise-only value, which keeps balancing gap functions well defined.
double ring_throughput(int sf, double r_in, double r_out, const NetworkConfig& cfg,
                       const SfTable& table, const DutySpec& spec, double* duty_out = nullptr) {
  const SfParams& p = table[sf_index(sf)];
  const double area = kPi * (r_out * r_out - r_in * r_in);
  const double qbar = cfg.max_power_w * mean_path_gain(r_out, cfg);
  const double c_s = sir_constant(p.sir_threshold);
  const double duty = spec.mode == DutyMode::optimal
                          ? optimal_duty_cycle(cfg.active_density_per_m2 * area * c_s, cfg.max_duty)
                          : spec.fixed_value;
  if (duty_out) *duty_out = duty;
  if (duty <= 0.0) return 0.0;
  const double noise_exp = cfg.noise_w * cfg.fading_rate * p.snr_threshold / qbar;
  const double interf_exp =
      2.0 * cfg.active_density_per_m2 * area * c_s * duty / (1.0 - duty);
  return bit_rate_bps(p) * duty * std::exp(-noise_exp - interf_exp);
}

// Root of g(t) = theta_left(.., t) - theta_right(t, ..) on [lo, hi]; g is
// nonincreasing in t. Falls back to the endpoint minimizing |g| when g does
// not change sign.
double balance_span(int sf_left, int sf_right, double lo, double hi, const NetworkConfig& cfg,
                    const SfTable& table, const DutySpec& spec) {
  auto gap = [&](double t) {
    return ring_throughput(sf_left, lo, t, cfg, table, spec) -
           ring_throughput(sf_right, t, hi, cfg, table, spec);
  };
  if (gap(lo) <= 0.0) return lo;
  if (gap(hi) >= 0.0) return hi;
  double a = lo, b = hi;
  while (b - a > kBoundaryTolM) {
    const double mid = 0.5 * (a + b);
    if (gap(mid) > 0.0)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

struct UsedZone {
  int sf;
  double r_in;
  double r_out;
  double duty;
  double theta;
};

void validate_duty_spec(const DutySpec& spec) {
  if (spec.mode == DutyMode::fixed && (spec.fixed_value < 0.0 || spec.fixed_value >= 1.0))
    throw precondition_error("fixed duty must lie in [0,1)");
}

}  // namespace

ZoneEval zone_optimal_throughput(int sf, const Partition& part, const NetworkConfig& cfg,
                                 const SfTable& table, const DutySpec& duty) {
  part.validate();
  validate_duty_spec(duty);
  const double r_in = part.inner_edge_m(sf);
  const double r_out = part.outer_edge_m(sf);
  ZoneEval eval;
  eval.sf = sf;
  eval.area_m2 = kPi * (r_out * r_out - r_in * r_in);
  eval.active = (r_out - r_in) > kEmptyWidthFrac * part.cell_radius_m;
  eval.throughput_bps = ring_throughput(sf, r_in, r_out, cfg, table, duty, &eval.duty);
  return eval;
}

double balance_boundary(int sf, const Partition& part, const NetworkConfig& cfg,
                        const SfTable& table, const DutySpec& duty) {
  if (sf < kMinSf || sf > kMaxSf - 1)
    throw precondition_error("balance_boundary needs sf in 7..11");
  part.validate();
  validate_duty_spec(duty);
  return balance_span(sf, sf + 1, part.inner_edge_m(sf), part.outer_edge_m(sf + 1), cfg, table,
                      duty);
}

MaxMinSolution iterative_balancing(const NetworkConfig& cfg, const SfTable& table,
                                   const Partition& initial, const DutySpec& duty,
                                   int max_iterations) {
  cfg.validate();
  initial.validate();
  validate_duty_spec(duty);
  const double rc = initial.cell_radius_m;
  const double move_tol = kMoveTolFrac * rc;
  const double eps = cfg.ib_tolerance_bps;

  MaxMinSolution sol;
  sol.partition = initial;

  auto collect_used = [&](std::array<ZoneEval, kNumSf>& evals) {
    std::vector<UsedZone> used;
    for (int s = kMinSf; s <= kMaxSf; ++s) {
      evals[sf_index(s)] = zone_optimal_throughput(s, sol.partition, cfg, table, duty);
      const ZoneEval& e = evals[sf_index(s)];
      if (e.active)
        used.push_back({s, sol.partition.inner_edge_m(s), sol.partition.outer_edge_m(s), e.duty,
                        e.throughput_bps});
    }
    return used;
  };

  std::array<ZoneEval, kNumSf> evals{};
  int moves = 0;
  bool converged = false;
  bool certified = false;
  for (int iter = 0; iter <= max_iterations; ++iter) {
    const auto used = collect_used(evals);
    double spread = 0.0;
    if (used.size() >= 2) {
      double lo = used[0].theta, hi = used[0].theta;
      for (const UsedZone& u : used) {
        lo = std::min(lo, u.theta);
        hi = std::max(hi, u.theta);
      }
      spread = hi - lo;
    }
    sol.max_gap_bps = spread;
    if (used.size() <= 1 || spread <= eps) {
      converged = true;
      break;
    }
    if (iter == max_iterations) break;

    // largest inter-neighbor gap first; ties go to the lowest SF
    std::vector<std::size_t> order(used.size() - 1);
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return std::fabs(used[a].theta - used[a + 1].theta) >
             std::fabs(used[b].theta - used[b + 1].theta);
    });

    bool progressed = false;
    for (std::size_t idx : order) {
      const UsedZone& left = used[idx];
      const UsedZone& right = used[idx + 1];
      if (std::fabs(left.theta - right.theta) <= 0.0) break;
      const double t =
          balance_span(left.sf, right.sf, left.r_in, right.r_out, cfg, table, duty);
      if (std::fabs(t - left.r_out) <= move_tol) continue;  // endpoint-blocked, try next gap
      for (int s = left.sf; s < right.sf; ++s) sol.partition.boundaries_m[sf_index(s)] = t;
      ++moves;
      progressed = true;
      break;
    }
    if (!progressed) {
      converged = true;
      certified = spread > eps;
      break;
    }
  }

  (void)collect_used(evals);
  sol.iterations = moves;
  sol.converged = converged;
  sol.gap_certified = certified;
  double min_theta = 0.0, max_theta = 0.0;
  bool first = true;
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    const ZoneEval& e = evals[sf_index(s)];
    sol.zone_throughput_bps[sf_index(s)] = e.throughput_bps;
    sol.zone_active[sf_index(s)] = e.active;
    sol.duties.duty[sf_index(s)] = e.duty;
    if (e.active) {
      min_theta = first ? e.throughput_bps : std::min(min_theta, e.throughput_bps);
      max_theta = first ? e.throughput_bps : std::max(max_theta, e.throughput_bps);
      first = false;
    }
  }
  sol.min_throughput_bps = min_theta;
  sol.max_gap_bps = max_theta - min_theta;
  return sol;
}

Partition benchmark_partition(const BenchmarkSpec& spec, const NetworkConfig& cfg,
                              const SfTable& table) {
  if (spec.scheme == 1) return equal_area_partition(cfg.cell_radius_m);
  if (spec.scheme == 2) return max_range_partition(cfg, table);
  throw precondition_error("benchmark scheme must be 1 or 2");
}

mc::FiniteResult evaluate_benchmark(const BenchmarkSpec& spec, const NetworkConfig& cfg,
                                    const SfTable& table, std::uint64_t trials,
                                    std::uint64_t seed, int threads) {
  mc::FullScenario scenario;
  scenario.cfg = cfg;
  scenario.table = table;
  scenario.partition = benchmark_partition(spec, cfg, table);
  for (double& d : scenario.duties.duty) d = spec.fixed_duty;
  scenario.policy = channel_inversion_policy(scenario.partition, cfg, cfg.max_power_w);
  scenario.mode = mc::PowerMode::fixed;
  scenario.fixed_power_w = spec.fixed_power_w > 0 ? spec.fixed_power_w : cfg.max_power_w;
  scenario.bin_width_m = spec.bin_width_m;
  return mc::simulate_finite_population(scenario, trials, seed, threads);
}

}  // namespace lora::opt
