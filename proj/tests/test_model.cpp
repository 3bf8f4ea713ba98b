#include <doctest.h>

#include <cmath>

#include "lora/model.hpp"
#include "lora/rng.hpp"
#include "lora/units.hpp"

using namespace lora;

namespace {

bool close_rel(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max(std::fabs(a), std::fabs(b));
}

}  // namespace

TEST_CASE("bit rates reproduce the standard SF table") {
  const SfTable table = default_sf_table();
  const double expected[] = {5468.75, 3125.0, 1757.8125, 976.5625, 537.109375, 292.96875};
  const int rounded[] = {5469, 3125, 1758, 977, 537, 293};
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    const double r = bit_rate_bps(table[sf_index(s)]);
    CHECK(r == doctest::Approx(expected[sf_index(s)]).epsilon(1e-12));
    CHECK(static_cast<int>(std::lround(r)) == rounded[sf_index(s)]);
  }
  // strictly decreasing in s at fixed B, C
  for (int s = kMinSf; s < kMaxSf; ++s)
    CHECK(bit_rate_bps(table[sf_index(s)]) > bit_rate_bps(table[sf_index(s + 1)]));
}

TEST_CASE("packet durations") {
  const SfTable table = default_sf_table();
  CHECK(packet_duration_s(table[0]) == doctest::Approx(0.036571428571428574).epsilon(1e-12));
  CHECK(packet_duration_s(table[5]) == doctest::Approx(0.6826666666666666).epsilon(1e-12));
  for (int s = kMinSf; s < kMaxSf; ++s)
    CHECK(packet_duration_s(table[sf_index(s)]) < packet_duration_s(table[sf_index(s + 1)]));

  SfParams bad = table[0];
  bad.payload_bits = 0.0;
  CHECK_THROWS_AS(bad.validate(), precondition_error);
}

TEST_CASE("reference gain and mean path gain") {
  NetworkConfig cfg;
  CHECK(reference_gain(cfg) == doctest::Approx(7.564554062362628e-4).epsilon(1e-12));
  CHECK(mean_path_gain(0.0, cfg) == doctest::Approx(9.682629199824164e-9).epsilon(1e-10));

  // strictly decreasing in distance
  mc::Rng rng = mc::Rng::substream(7, 0);
  for (int i = 0; i < 200; ++i) {
    const double d1 = rng.uniform(0.0, 5000.0);
    const double d2 = d1 + rng.uniform(1e-6, 100.0);
    CHECK(mean_path_gain(d1, cfg) > mean_path_gain(d2, cfg));
  }
}

TEST_CASE("max ranges reproduce the SF table within 1 m") {
  NetworkConfig cfg;
  const SfTable table = default_sf_table();
  const double expected[] = {1053, 1283, 1563, 1904, 2244, 2645};
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    const double d = max_range_m(table[sf_index(s)], cfg);
    CHECK(std::fabs(d - expected[sf_index(s)]) <= 1.0);
  }

  // at the max range the link budget meets the threshold exactly
  const double d7 = max_range_m(table[0], cfg);
  const double snr = cfg.max_power_w * mean_path_gain(d7, cfg) / cfg.noise_w;
  CHECK(close_rel(snr, table[0].snr_threshold, 1e-9));

  // monotone in the threshold
  for (int s = kMinSf; s < kMaxSf; ++s)
    CHECK(max_range_m(table[sf_index(s)], cfg) < max_range_m(table[sf_index(s + 1)], cfg));

  // unreachable SF: drown the link in noise
  NetworkConfig deaf = cfg;
  deaf.noise_w = 1.0;
  CHECK_THROWS_AS(max_range_m(table[0], deaf), precondition_error);
}

TEST_CASE("equal-area partition reproduces the SF table within 1 m") {
  const Partition part = equal_area_partition(1000.0);
  const double expected[] = {408, 577, 707, 816, 913, 1000};
  for (int s = kMinSf; s <= kMaxSf; ++s)
    CHECK(std::fabs(part.outer_edge_m(s) - expected[sf_index(s)]) <= 1.0);
  CHECK(part.outer_edge_m(kMaxSf) == 1000.0);

  // linear scaling in the cell radius
  const Partition half = equal_area_partition(500.0);
  for (int s = kMinSf; s < kMaxSf; ++s)
    CHECK(close_rel(half.outer_edge_m(s), 0.5 * part.outer_edge_m(s), 1e-12));
}

TEST_CASE("zone areas") {
  const Partition eq = equal_area_partition(1000.0);
  const auto areas = zone_areas_m2(eq);
  double sum = 0.0;
  for (double a : areas) {
    CHECK(a == doctest::Approx(kPi * 1e6 / 6.0).epsilon(1e-9));
    sum += a;
  }
  CHECK(close_rel(sum, kPi * 1e6, 1e-9));

  // degenerate ring
  Partition deg = eq;
  deg.boundaries_m[1] = deg.boundaries_m[0];
  CHECK(zone_areas_m2(deg)[1] == 0.0);

  // rounded max-range boundaries, plain ring arithmetic
  Partition table_part;
  table_part.cell_radius_m = 2645.0;
  table_part.boundaries_m = {1053, 1283, 1563, 1904, 2244};
  CHECK(zone_areas_m2(table_part)[1] == doctest::Approx(1687914.900920724).epsilon(1e-12));

  // area sums for random valid partitions
  mc::Rng rng = mc::Rng::substream(11, 0);
  for (int i = 0; i < 100; ++i) {
    Partition p;
    p.cell_radius_m = rng.uniform(10.0, 5000.0);
    double prev = 0.0;
    for (auto& b : p.boundaries_m) {
      b = prev + rng.uniform01() * (p.cell_radius_m - prev) * 0.5;
      prev = b;
    }
    const auto a = zone_areas_m2(p);
    double total = 0.0;
    for (double v : a) total += v;
    CHECK(close_rel(total, kPi * p.cell_radius_m * p.cell_radius_m, 1e-9));
  }

  Partition bad = eq;
  bad.boundaries_m[2] = bad.boundaries_m[1] - 1.0;
  CHECK_THROWS_AS(bad.validate(), precondition_error);
}

TEST_CASE("channel access rate") {
  const SfTable table = default_sf_table();
  const SfParams& sf7 = table[0];
  CHECK(channel_access_rate(0.0, sf7) == 0.0);
  CHECK(close_rel(channel_access_rate(0.5, sf7), 1.0 / packet_duration_s(sf7), 1e-12));
  CHECK(channel_access_rate(0.01, sf7) == doctest::Approx(0.276199494949495).epsilon(1e-12));
  CHECK_THROWS_AS(channel_access_rate(1.0, sf7), precondition_error);
  CHECK_THROWS_AS(channel_access_rate(-0.1, sf7), precondition_error);

  // round trip: rho*T/(1 + rho*T) recovers the duty
  mc::Rng rng = mc::Rng::substream(13, 0);
  for (int i = 0; i < 200; ++i) {
    const double duty = rng.uniform(0.0, 0.999);
    const double rt = channel_access_rate(duty, sf7) * packet_duration_s(sf7);
    CHECK((close_rel(rt / (1.0 + rt), duty, 1e-9) || (duty == 0.0 && rt == 0.0)));
  }
}

TEST_CASE("channel inversion power control") {
  NetworkConfig cfg;
  const Partition part = equal_area_partition(1000.0);
  const PowerPolicy policy = channel_inversion_policy(part, cfg, cfg.max_power_w);

  for (int s = kMinSf; s <= kMaxSf; ++s) {
    CHECK(policy.edge_power_w[sf_index(s)] == cfg.max_power_w);
    CHECK(close_rel(policy.mean_rx_power_w[sf_index(s)],
                    cfg.max_power_w * mean_path_gain(part.outer_edge_m(s), cfg), 1e-12));
    // zone-edge UE transmits at the edge power
    CHECK(close_rel(transmit_power_w(s, part.outer_edge_m(s), part, policy, cfg),
                    policy.edge_power_w[sf_index(s)], 1e-12));
  }

  // cell-center UE with a 408 m zone edge
  Partition round_part = part;
  round_part.boundaries_m[0] = 408.0;
  const PowerPolicy round_policy = channel_inversion_policy(round_part, cfg, cfg.max_power_w);
  CHECK(transmit_power_w(7, 0.0, round_part, round_policy, cfg) ==
        doctest::Approx(cfg.max_power_w * 5.657587449971312e-5).epsilon(1e-10));

  // received mean power equals Qbar everywhere in the zone, and the transmit
  // power is nondecreasing with distance
  mc::Rng rng = mc::Rng::substream(17, 0);
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    const double ri = part.inner_edge_m(s);
    const double ro = part.outer_edge_m(s);
    double prev_power = 0.0;
    for (int i = 0; i <= 20; ++i) {
      const double r = ri + (ro - ri) * i / 20.0;
      const double p = transmit_power_w(s, r, part, policy, cfg);
      CHECK(close_rel(p * mean_path_gain(r, cfg), policy.mean_rx_power_w[sf_index(s)], 1e-12));
      CHECK(p >= prev_power);
      prev_power = p;
    }
  }

  CHECK_THROWS_AS(transmit_power_w(7, part.outer_edge_m(7) + 1.0, part, policy, cfg),
                  precondition_error);
  CHECK_THROWS_AS(transmit_power_w(9, 0.0, part, policy, cfg), precondition_error);
}

TEST_CASE("partition zone lookup") {
  const Partition eq = equal_area_partition(1000.0);
  CHECK(eq.sf_at(0.0) == 7);
  CHECK(eq.sf_at(1000.0) == 12);
  CHECK(eq.sf_at(500.0) == 8);

  Partition deg = eq;
  deg.boundaries_m[1] = deg.boundaries_m[0];  // SF 8 empty
  CHECK(deg.sf_at(deg.boundaries_m[0]) == 7);
  CHECK(deg.sf_at(deg.boundaries_m[0] + 1.0) == 9);
}

TEST_CASE("config validation") {
  NetworkConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  NetworkConfig bad = cfg;
  bad.max_duty = 1.0;
  CHECK_THROWS_AS(bad.validate(), precondition_error);
  bad = cfg;
  bad.all_density_per_m2 = 0.5 * cfg.active_density_per_m2;
  CHECK_THROWS_AS(bad.validate(), precondition_error);
  bad = cfg;
  bad.pathloss_exponent = 1.5;
  CHECK_THROWS_AS(bad.validate(), precondition_error);
}
