#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "lora/model.hpp"
#include "lora/optimize.hpp"

// Scenario files: flat sectioned key = value text. dB/dBm and per-km^2
// spellings are accepted where conventional and converted to SI linear at
// parse time. Unknown keys and malformed values fail with file:line errors.

namespace lora::cli {

struct RunParams {
  std::uint64_t trials = 100000;
  std::uint64_t seed = 1;
  opt::DutySpec duty = opt::DutySpec::optimal();
  int scheme = 1;
  double bin_width_m = 25.0;
  int threads = 1;
  std::string out_path;
};

struct Scenario {
  NetworkConfig cfg;
  SfTable table = default_sf_table();
  RunParams run;
};

Scenario parse_scenario(std::istream& in, const std::string& name);
Scenario load_scenario(const std::string& path);

// "optimal" or "fixed:<duty>"
opt::DutySpec parse_duty_spec(const std::string& text);

// Emitted operating plans re-parse bit-exactly.
struct PlanFile {
  Partition partition;
  std::optional<DutyPlan> duties;
};

PlanFile parse_plan(std::istream& in, const std::string& name, double default_cell_radius_m);
PlanFile load_plan(const std::string& path, double default_cell_radius_m);
void write_plan(std::ostream& out, const Partition& part, const DutyPlan* duties);

}  // namespace lora::cli
