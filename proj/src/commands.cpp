#include "lora/commands.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "lora/optimize.hpp"
#include "lora/simulate.hpp"
#include "lora/units.hpp"

namespace lora::cli {

namespace {

std::string num(double v) {
  if (!std::isfinite(v)) throw precondition_error("non-finite value in report");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct ZoneRow {
  std::string experiment;
  int sf = 0;
  double r_outer_m = 0.0;
  double area_m2 = 0.0;
  double duty = 0.0;
  bool has_analytic = false;
  double p_analytic = 0.0;
  bool has_mc = false;
  double p_mc = 0.0;
  double p_mc_stderr = 0.0;
  double throughput_bps = 0.0;
  double spatial_bps_km2 = 0.0;
  bool active = true;
};

void write_zone_row(std::ostream& out, const ZoneRow& r) {
  out << r.experiment << ',' << r.sf << ',' << num(r.r_outer_m) << ',' << num(r.area_m2) << ','
      << num(r.duty) << ',' << (r.has_analytic ? num(r.p_analytic) : "") << ','
      << (r.has_mc ? num(r.p_mc) : "") << ',' << (r.has_mc ? num(r.p_mc_stderr) : "") << ','
      << num(r.throughput_bps) << ',' << num(r.spatial_bps_km2) << ',' << (r.active ? 1 : 0)
      << '\n';
}

mc::FullScenario make_full_scenario(const Scenario& scn, const Partition& part,
                                    const DutyPlan& duties, mc::PowerMode mode) {
  mc::FullScenario full;
  full.cfg = scn.cfg;
  full.table = scn.table;
  full.partition = part;
  full.duties = duties;
  full.policy = channel_inversion_policy(part, scn.cfg, scn.cfg.max_power_w);
  full.mode = mode;
  full.fixed_power_w = scn.cfg.max_power_w;
  full.bin_width_m = scn.run.bin_width_m;
  return full;
}

}  // namespace

const char* zone_csv_header() {
  return "experiment,sf,r_outer_m,area_m2,duty,p_success_analytic,p_success_mc,"
         "p_success_mc_stderr,throughput_bps,spatial_throughput_bps_km2,active";
}

const char* bin_csv_header() {
  return "experiment,scheme,sf,bin_center_m,bin_area_m2,duty,p_success_mc,"
         "p_success_mc_stderr,throughput_bps,spatial_throughput_bps_km2";
}

const char* ranges_csv_header() {
  return "sf,bit_rate_bps,snr_threshold_db,max_range_m,equal_area_range_m";
}

Partition resolve_partition(const Scenario& scn, const std::string& source) {
  if (source.empty() || source == "equal-area")
    return equal_area_partition(scn.cfg.cell_radius_m);
  if (source == "max-range") return max_range_partition(scn.cfg, scn.table);
  if (source.rfind("file:", 0) == 0)
    return load_plan(source.substr(5), scn.cfg.cell_radius_m).partition;
  throw precondition_error("partition must be equal-area, max-range, or file:<path>, got '" +
                           source + "'");
}

DutyPlan make_duty_plan(const Scenario& scn, const Partition& part, const opt::DutySpec& duty) {
  DutyPlan plan;
  for (int s = kMinSf; s <= kMaxSf; ++s)
    plan.duty[sf_index(s)] =
        opt::zone_optimal_throughput(s, part, scn.cfg, scn.table, duty).duty;
  return plan;
}

int cmd_ranges(const Scenario& scn, std::ostream& csv, std::ostream& log) {
  const Partition eq = equal_area_partition(scn.cfg.cell_radius_m);
  csv << ranges_csv_header() << '\n';
  log << "SF   bit rate (bps)   SNR thr (dB)   max range (m)   equal-area range (m)\n";
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    const SfParams& p = scn.table[sf_index(s)];
    const double rate = bit_rate_bps(p);
    const double eta_db = linear_to_db(p.snr_threshold);
    const double reach = max_range_m(p, scn.cfg);
    const double eq_r = eq.outer_edge_m(s);
    csv << s << ',' << num(rate) << ',' << num(eta_db) << ',' << num(reach) << ',' << num(eq_r)
        << '\n';
    char line[128];
    std::snprintf(line, sizeof line, "%-4d %14.2f %14.1f %15.1f %22.1f\n", s, rate, eta_db, reach,
                  eq_r);
    log << line;
  }
  return kExitOk;
}

int cmd_analyze(const Scenario& scn, const Partition& part, const opt::DutySpec& duty,
                std::ostream& csv, std::ostream& log) {
  part.validate();
  const DutyPlan duties = make_duty_plan(scn, part, duty);
  const PowerPolicy policy = channel_inversion_policy(part, scn.cfg, scn.cfg.max_power_w);
  const double spatial =
      per_m2_to_per_km2(spatial_throughput_analytic(part, duties, policy, scn.cfg, scn.table));
  csv << zone_csv_header() << '\n';
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    const auto eval = opt::zone_optimal_throughput(s, part, scn.cfg, scn.table, duty);
    ZoneRow row;
    row.experiment = "analyze";
    row.sf = s;
    row.r_outer_m = part.outer_edge_m(s);
    row.area_m2 = eval.area_m2;
    row.duty = eval.duty;
    row.has_analytic = true;
    const ZoneScenario sc = make_zone_scenario(s, part, duties, policy, scn.cfg, scn.table);
    row.p_analytic = packet_success_prob(sc);
    row.throughput_bps = eval.throughput_bps;
    row.spatial_bps_km2 = spatial;
    row.active = eval.active;
    write_zone_row(csv, row);
  }
  log << "analytic spatial throughput: " << spatial << " bps/km^2\n";
  return kExitOk;
}

int cmd_simulate(const Scenario& scn, const Partition& part, const opt::DutySpec& duty,
                 std::ostream& csv, std::ostream& log) {
  part.validate();
  if (scn.run.trials == 0) throw precondition_error("trials must be >= 1");
  const DutyPlan duties = make_duty_plan(scn, part, duty);
  const auto full = make_full_scenario(scn, part, duties, mc::PowerMode::inversion);
  const auto result =
      mc::simulate_finite_population(full, scn.run.trials, scn.run.seed, scn.run.threads);
  const double spatial_mc = per_m2_to_per_km2(result.spatial_throughput_bps_m2);
  csv << zone_csv_header() << '\n';
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    const int i = sf_index(s);
    ZoneRow row;
    row.experiment = "simulate";
    row.sf = s;
    row.r_outer_m = part.outer_edge_m(s);
    row.area_m2 = zone_areas_m2(part)[i];
    row.duty = duties.duty[i];
    row.has_analytic = true;
    row.p_analytic =
        packet_success_prob(make_zone_scenario(s, part, duties, full.policy, scn.cfg, scn.table));
    row.has_mc = result.zone_active[i];
    row.p_mc = result.zone_success[i].estimate;
    row.p_mc_stderr = result.zone_success[i].std_error;
    row.throughput_bps = result.zone_throughput_bps[i];
    row.spatial_bps_km2 = spatial_mc;
    row.active = result.zone_active[i];
    write_zone_row(csv, row);
  }
  log << "mc spatial throughput: " << spatial_mc << " bps/km^2 (stderr "
      << per_m2_to_per_km2(result.spatial_std_error_bps_m2) << ", trials " << scn.run.trials
      << ", seed " << scn.run.seed << ")\n";
  return kExitOk;
}

int cmd_optimize(const Scenario& scn, const Partition& initial, const opt::DutySpec& duty,
                 bool validate_mc, std::ostream& csv, std::ostream& log,
                 const std::string& plan_path) {
  const auto sol = opt::iterative_balancing(scn.cfg, scn.table, initial, duty);
  const PowerPolicy policy = channel_inversion_policy(sol.partition, scn.cfg, scn.cfg.max_power_w);
  const double spatial = per_m2_to_per_km2(
      spatial_throughput_analytic(sol.partition, sol.duties, policy, scn.cfg, scn.table));

  csv << zone_csv_header() << '\n';
  for (int s = kMinSf; s <= kMaxSf; ++s) {
    const int i = sf_index(s);
    ZoneRow row;
    row.experiment = "optimize";
    row.sf = s;
    row.r_outer_m = sol.partition.outer_edge_m(s);
    row.area_m2 = zone_areas_m2(sol.partition)[i];
    row.duty = sol.duties.duty[i];
    row.has_analytic = true;
    row.p_analytic = packet_success_prob(
        make_zone_scenario(s, sol.partition, sol.duties, policy, scn.cfg, scn.table));
    row.throughput_bps = sol.zone_throughput_bps[i];
    row.spatial_bps_km2 = spatial;
    row.active = sol.zone_active[i];
    write_zone_row(csv, row);
  }

  log << "max-min throughput: " << sol.min_throughput_bps << " bps\n";
  log << "residual spread: " << sol.max_gap_bps << " bps (tolerance " << scn.cfg.ib_tolerance_bps
      << ")\n";
  log << "boundary moves: " << sol.iterations << (sol.converged ? ", converged" : ", NOT converged")
      << (sol.gap_certified ? " (unreducible gap certified)" : "") << "\n";
  log << "boundaries (m):";
  for (int s = kMinSf; s < kMaxSf; ++s) log << ' ' << sol.partition.outer_edge_m(s);
  log << "\nanalytic spatial throughput: " << spatial << " bps/km^2\n";

  if (validate_mc) {
    const auto full = make_full_scenario(scn, sol.partition, sol.duties, mc::PowerMode::inversion);
    const auto mc_res =
        mc::simulate_finite_population(full, scn.run.trials, scn.run.seed, scn.run.threads);
    log << "mc spatial throughput: " << per_m2_to_per_km2(mc_res.spatial_throughput_bps_m2)
        << " bps/km^2 (stderr " << per_m2_to_per_km2(mc_res.spatial_std_error_bps_m2)
        << ", trials " << scn.run.trials << ", seed " << scn.run.seed << ")\n";
  }

  if (!plan_path.empty()) {
    std::ofstream plan(plan_path);
    if (!plan) throw precondition_error("cannot open plan file for writing: " + plan_path);
    write_plan(plan, sol.partition, &sol.duties);
    log << "plan written to " << plan_path << "\n";
  }
  return sol.converged ? kExitOk : kExitNoConvergence;
}

int cmd_benchmark(const Scenario& scn, std::ostream& csv, std::ostream& log) {
  if (scn.run.trials == 0) throw precondition_error("trials must be >= 1");
  opt::BenchmarkSpec spec;
  spec.scheme = scn.run.scheme;
  spec.fixed_duty = scn.run.duty.mode == opt::DutyMode::fixed ? scn.run.duty.fixed_value : 0.01;
  spec.bin_width_m = scn.run.bin_width_m;
  const auto result = opt::evaluate_benchmark(spec, scn.cfg, scn.table, scn.run.trials,
                                              scn.run.seed, scn.run.threads);
  const double spatial = per_m2_to_per_km2(result.spatial_throughput_bps_m2);
  csv << bin_csv_header() << '\n';
  for (const auto& bin : result.bins) {
    csv << "benchmark," << spec.scheme << ',' << bin.sf << ',' << num(bin.center_m) << ','
        << num(bin.area_m2) << ',' << num(spec.fixed_duty) << ',' << num(bin.success.estimate)
        << ',' << num(bin.success.std_error) << ',' << num(bin.throughput_bps) << ','
        << num(spatial) << '\n';
  }
  log << "benchmark scheme " << spec.scheme << " spatial throughput: " << spatial
      << " bps/km^2 (stderr " << per_m2_to_per_km2(result.spatial_std_error_bps_m2) << ", trials "
      << scn.run.trials << ", seed " << scn.run.seed << ")\n";
  return kExitOk;
}

}  // namespace lora::cli
