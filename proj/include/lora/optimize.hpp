#pragma once

#include <cstdint>

#include "lora/analytic.hpp"
#include "lora/model.hpp"
#include "lora/simulate.hpp"

// Max-min optimization: per-zone optimal duty cycles, bisection-based
// boundary balancing, the Iterative Balancing loop, and benchmark-scheme
// evaluation.

namespace lora::opt {

enum class DutyMode { optimal, fixed };

struct DutySpec {
  DutyMode mode = DutyMode::optimal;
  double fixed_value = 0.01;

  static DutySpec optimal() { return {DutyMode::optimal, 0.0}; }
  static DutySpec fixed(double duty) { return {DutyMode::fixed, duty}; }
};

// Per-zone operating point under a given partition. Empty zones carry
// active = false and are excluded from min/gap computations; their
// throughput field holds the empty-zone limit (duty-capped, noise-only),
// which keeps the balancing gap function continuous.
struct ZoneEval {
  int sf = kMinSf;
  bool active = false;
  double area_m2 = 0.0;
  double duty = 0.0;
  double throughput_bps = 0.0;
};

ZoneEval zone_optimal_throughput(int sf, const Partition& part, const NetworkConfig& cfg,
                                 const SfTable& table, const DutySpec& duty);

// Move the boundary r_s shared by zones s and s+1 to equalize their
// throughputs: returns the bisection root of
//   g(r_s) = theta_s(r_s) - theta_{s+1}(r_s)
// on [r_{s-1}, r_{s+1}] to 1e-3 m, or the endpoint minimizing |g| when g
// does not change sign (g is nonincreasing in r_s).
double balance_boundary(int sf, const Partition& part, const NetworkConfig& cfg,
                        const SfTable& table, const DutySpec& duty);

struct MaxMinSolution {
  Partition partition;
  DutyPlan duties;
  std::array<double, kNumSf> zone_throughput_bps{};
  std::array<bool, kNumSf> zone_active{};
  double min_throughput_bps = 0.0;
  double max_gap_bps = 0.0;  // residual spread over non-empty zones
  int iterations = 0;        // boundary moves performed
  bool converged = false;    // spread <= epsilon or every gap certified unreducible
  bool gap_certified = false;  // stopped with an endpoint-blocked gap > epsilon
};

// Repeatedly balance the largest throughput gap between spatially adjacent
// non-empty zones until the spread over non-empty zones falls within the
// configured tolerance or no remaining gap can be reduced. Boundary moves
// across a run of empty zones shift the coincident boundaries together.
MaxMinSolution iterative_balancing(const NetworkConfig& cfg, const SfTable& table,
                                   const Partition& initial, const DutySpec& duty,
                                   int max_iterations = 10000);

// Fixed-power, fixed-duty reference schemes evaluated by the finite
// population simulator: scheme 1 = equal-area partition, scheme 2 =
// max-range partition.
struct BenchmarkSpec {
  int scheme = 1;
  double fixed_power_w = 0.0;  // 0 -> cfg.max_power_w
  double fixed_duty = 0.01;
  double bin_width_m = 25.0;
};

mc::FiniteResult evaluate_benchmark(const BenchmarkSpec& spec, const NetworkConfig& cfg,
                                    const SfTable& table, std::uint64_t trials,
                                    std::uint64_t seed, int threads = 1);

Partition benchmark_partition(const BenchmarkSpec& spec, const NetworkConfig& cfg,
                              const SfTable& table);

}  // namespace lora::opt
