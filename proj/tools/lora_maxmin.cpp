// lora-maxmin: LoRa uplink capacity planning.
//
//   ranges     per-SF bit rates, max ranges, equal-area ranges
//   analyze    closed-form per-zone success probability and throughput
//   simulate   Monte-Carlo estimates for a partition and duty plan
//   optimize   max-min SF partition via Iterative Balancing
//   benchmark  fixed-power/fixed-duty reference schemes (1: equal-area,
//              2: max-range), per-radial-bin throughput profile

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "lora/commands.hpp"

namespace {

struct CliOptions {
  std::string config_path;
  std::string partition = "equal-area";
  std::string duty;
  std::optional<double> trials;
  std::optional<std::uint64_t> seed;
  std::optional<int> scheme;
  std::optional<double> bin_width_m;
  std::optional<int> threads;
  std::string out_path;
  bool validate_mc = false;
};

void add_common(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_path, "scenario file (defaults when omitted)");
  cmd->add_option("--trials", opt.trials, "Monte-Carlo trials");
  cmd->add_option("--seed", opt.seed, "Monte-Carlo seed");
  cmd->add_option("--threads", opt.threads, "worker threads (results are thread-count invariant)");
  cmd->add_option("--out", opt.out_path, "CSV output path (default stdout)");
}

lora::cli::Scenario resolve_scenario(const CliOptions& opt) {
  lora::cli::Scenario scn = opt.config_path.empty() ? lora::cli::Scenario{}
                                                    : lora::cli::load_scenario(opt.config_path);
  if (opt.trials) {
    if (*opt.trials < 0 || *opt.trials != std::floor(*opt.trials))
      throw lora::precondition_error("--trials must be a nonnegative integer");
    scn.run.trials = static_cast<std::uint64_t>(*opt.trials);
  }
  if (opt.seed) scn.run.seed = *opt.seed;
  if (opt.scheme) scn.run.scheme = *opt.scheme;
  if (opt.bin_width_m) scn.run.bin_width_m = *opt.bin_width_m;
  if (opt.threads) scn.run.threads = *opt.threads;
  if (!opt.duty.empty()) scn.run.duty = lora::cli::parse_duty_spec(opt.duty);
  if (!opt.out_path.empty()) scn.run.out_path = opt.out_path;
  return scn;
}

int dispatch(const std::string& command, const CliOptions& opt) {
  const lora::cli::Scenario scn = resolve_scenario(opt);

  std::ofstream file;
  std::ostream* csv = &std::cout;
  if (!scn.run.out_path.empty()) {
    file.open(scn.run.out_path);
    if (!file) throw lora::precondition_error("cannot open output file: " + scn.run.out_path);
    csv = &file;
  }
  std::ostream& log = std::cerr;

  if (command == "ranges") return lora::cli::cmd_ranges(scn, *csv, log);
  if (command == "analyze") {
    const auto part = lora::cli::resolve_partition(scn, opt.partition);
    return lora::cli::cmd_analyze(scn, part, scn.run.duty, *csv, log);
  }
  if (command == "simulate") {
    const auto part = lora::cli::resolve_partition(scn, opt.partition);
    return lora::cli::cmd_simulate(scn, part, scn.run.duty, *csv, log);
  }
  if (command == "optimize") {
    const auto part = lora::cli::resolve_partition(scn, opt.partition);
    const std::string plan_path =
        scn.run.out_path.empty() ? std::string{} : scn.run.out_path + ".plan";
    return lora::cli::cmd_optimize(scn, part, scn.run.duty, opt.validate_mc, *csv, log,
                                   plan_path);
  }
  if (command == "benchmark") return lora::cli::cmd_benchmark(scn, *csv, log);
  throw lora::precondition_error("unknown command " + command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LoRa uplink max-min throughput planning"};
  app.require_subcommand(1);
  CliOptions opt;

  CLI::App* ranges = app.add_subcommand("ranges", "per-SF rate and range table");
  add_common(ranges, opt);

  CLI::App* analyze = app.add_subcommand("analyze", "closed-form per-zone report");
  add_common(analyze, opt);
  analyze->add_option("--partition", opt.partition, "equal-area | max-range | file:<path>");
  analyze->add_option("--duty", opt.duty, "optimal | fixed:<value>");

  CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo per-zone report");
  add_common(simulate, opt);
  simulate->add_option("--partition", opt.partition, "equal-area | max-range | file:<path>");
  simulate->add_option("--duty", opt.duty, "optimal | fixed:<value>");

  CLI::App* optimize = app.add_subcommand("optimize", "Iterative Balancing max-min solution");
  add_common(optimize, opt);
  optimize->add_option("--partition", opt.partition, "initial partition (default equal-area)");
  optimize->add_option("--duty", opt.duty, "optimal | fixed:<value>");
  optimize->add_flag("--validate-mc", opt.validate_mc,
                     "re-evaluate the solution with the simulator");

  CLI::App* benchmark = app.add_subcommand("benchmark", "fixed power/duty reference scheme");
  add_common(benchmark, opt);
  benchmark->add_option("--scheme", opt.scheme, "1: equal-area 2: max-range");
  benchmark->add_option("--bin-width", opt.bin_width_m, "radial bin width (m)");
  benchmark->add_option("--duty", opt.duty, "fixed:<value> (default fixed:0.01)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lora::cli::kExitUsage;
  }

  try {
    return dispatch(app.get_subcommands().front()->get_name(), opt);
  } catch (const lora::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lora::cli::kExitUsage;
  } catch (const lora::precondition_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lora::cli::kExitPrecondition;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lora::cli::kExitUsage;
  }
}
