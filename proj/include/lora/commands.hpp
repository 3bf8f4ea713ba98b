#pragma once

#include <iosfwd>
#include <string>

#include "lora/scenario.hpp"

// Subcommand implementations behind the lora-maxmin CLI. All take a resolved
// scenario, write CSV to `csv` and a human-readable summary to `log`, and
// return the process exit code:
//   0 success, 1 usage/parse, 2 non-convergence, 3 precondition violation.

namespace lora::cli {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNoConvergence = 2;
constexpr int kExitPrecondition = 3;

// "equal-area", "max-range", or "file:<path>".
Partition resolve_partition(const Scenario& scn, const std::string& source);

// Per-zone duty plan for a partition under the duty spec.
DutyPlan make_duty_plan(const Scenario& scn, const Partition& part, const opt::DutySpec& duty);

int cmd_ranges(const Scenario& scn, std::ostream& csv, std::ostream& log);
int cmd_analyze(const Scenario& scn, const Partition& part, const opt::DutySpec& duty,
                std::ostream& csv, std::ostream& log);
int cmd_simulate(const Scenario& scn, const Partition& part, const opt::DutySpec& duty,
                 std::ostream& csv, std::ostream& log);
// validate_mc: re-evaluate the converged operating point with the simulator.
int cmd_optimize(const Scenario& scn, const Partition& initial, const opt::DutySpec& duty,
                 bool validate_mc, std::ostream& csv, std::ostream& log,
                 const std::string& plan_path = "");
int cmd_benchmark(const Scenario& scn, std::ostream& csv, std::ostream& log);

const char* zone_csv_header();
const char* bin_csv_header();
const char* ranges_csv_header();

}  // namespace lora::cli
