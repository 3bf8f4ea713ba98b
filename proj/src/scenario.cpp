#include "lora/scenario.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "lora/units.hpp"

namespace lora::cli {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string strip_comment(const std::string& s) {
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s[i] == '#' || s[i] == ';') return s.substr(0, i);
  return s;
}

double parse_number(const std::string& file, int line, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0')
    throw parse_error(file, line, "expected a number, got '" + value + "'");
  return v;
}

std::uint64_t parse_count(const std::string& file, int line, const std::string& value) {
  char* end = nullptr;
  // accept scientific notation for trial counts (1e6)
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || v < 0 || v != std::floor(v))
    throw parse_error(file, line, "expected a nonnegative integer, got '" + value + "'");
  return static_cast<std::uint64_t>(v);
}

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line;
};

std::vector<Entry> read_entries(std::istream& in, const std::string& name) {
  std::vector<Entry> entries;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string text = trim(strip_comment(raw));
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']')
        throw parse_error(name, line, "unterminated section header '" + text + "'");
      section = trim(text.substr(1, text.size() - 2));
      if (section.empty()) throw parse_error(name, line, "empty section name");
      continue;
    }
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos)
      throw parse_error(name, line, "expected 'key = value', got '" + text + "'");
    Entry e;
    e.section = section;
    e.key = trim(text.substr(0, eq));
    e.value = trim(text.substr(eq + 1));
    e.line = line;
    if (e.key.empty()) throw parse_error(name, line, "empty key");
    if (e.value.empty()) throw parse_error(name, line, "empty value for '" + e.key + "'");
    entries.push_back(e);
  }
  return entries;
}

int sf_of_section(const std::string& section) {
  if (section.size() == 3 && section.compare(0, 2, "sf") == 0) {
    const int sf = section[2] - '0';
    if (sf >= kMinSf && sf <= 9) return sf;
  }
  if (section.size() == 4 && section.compare(0, 2, "sf") == 0) {
    if (section == "sf10") return 10;
    if (section == "sf11") return 11;
    if (section == "sf12") return 12;
  }
  return 0;
}

void apply_network_key(NetworkConfig& cfg, const std::string& file, const Entry& e) {
  const double v = parse_number(file, e.line, e.value);
  if (e.key == "gateway_height_m") cfg.gateway_height_m = v;
  else if (e.key == "cell_radius_m") cfg.cell_radius_m = v;
  else if (e.key == "active_density_per_m2") cfg.active_density_per_m2 = v;
  else if (e.key == "active_density_per_km2") cfg.active_density_per_m2 = per_km2_to_per_m2(v);
  else if (e.key == "all_density_per_m2") cfg.all_density_per_m2 = v;
  else if (e.key == "all_density_per_km2") cfg.all_density_per_m2 = per_km2_to_per_m2(v);
  else if (e.key == "pathloss_exponent") cfg.pathloss_exponent = v;
  else if (e.key == "carrier_hz") cfg.carrier_hz = v;
  else if (e.key == "lightspeed_m_s") cfg.lightspeed_m_s = v;
  else if (e.key == "noise_w") cfg.noise_w = v;
  else if (e.key == "noise_dbm") cfg.noise_w = dbm_to_watts(v);
  else if (e.key == "fading_rate") cfg.fading_rate = v;
  else if (e.key == "max_power_w") cfg.max_power_w = v;
  else if (e.key == "max_power_dbm") cfg.max_power_w = dbm_to_watts(v);
  else if (e.key == "max_duty") cfg.max_duty = v;
  else if (e.key == "ib_tolerance_bps") cfg.ib_tolerance_bps = v;
  else throw parse_error(file, e.line, "unknown [network] key '" + e.key + "'");
}

void apply_sf_key(SfParams& p, const std::string& file, const Entry& e) {
  const double v = parse_number(file, e.line, e.value);
  if (e.key == "bandwidth_hz") p.bandwidth_hz = v;
  else if (e.key == "code_rate") p.code_rate = v;
  else if (e.key == "payload_bits") p.payload_bits = v;
  else if (e.key == "payload_bytes") p.payload_bits = 8.0 * v;
  else if (e.key == "snr_threshold") p.snr_threshold = v;
  else if (e.key == "snr_threshold_db") p.snr_threshold = db_to_linear(v);
  else if (e.key == "sir_threshold") p.sir_threshold = v;
  else if (e.key == "sir_threshold_db") p.sir_threshold = db_to_linear(v);
  else throw parse_error(file, e.line, "unknown [" + e.section + "] key '" + e.key + "'");
}

void apply_run_key(RunParams& run, const std::string& file, const Entry& e) {
  if (e.key == "trials") run.trials = parse_count(file, e.line, e.value);
  else if (e.key == "seed") run.seed = parse_count(file, e.line, e.value);
  else if (e.key == "duty") {
    try {
      run.duty = parse_duty_spec(e.value);
    } catch (const std::exception& ex) {
      throw parse_error(file, e.line, ex.what());
    }
  } else if (e.key == "scheme") {
    run.scheme = static_cast<int>(parse_count(file, e.line, e.value));
  } else if (e.key == "bin_width_m") {
    run.bin_width_m = parse_number(file, e.line, e.value);
  } else if (e.key == "threads") {
    run.threads = static_cast<int>(parse_count(file, e.line, e.value));
  } else if (e.key == "out") {
    run.out_path = e.value;
  } else {
    throw parse_error(file, e.line, "unknown [run] key '" + e.key + "'");
  }
}

std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

opt::DutySpec parse_duty_spec(const std::string& text) {
  if (text == "optimal") return opt::DutySpec::optimal();
  if (text.rfind("fixed:", 0) == 0) {
    char* end = nullptr;
    const std::string num = text.substr(6);
    const double v = std::strtod(num.c_str(), &end);
    if (end == num.c_str() || *end != '\0' || v < 0 || v >= 1)
      throw precondition_error("fixed duty must be a number in [0,1), got '" + num + "'");
    return opt::DutySpec::fixed(v);
  }
  throw precondition_error("duty must be 'optimal' or 'fixed:<value>', got '" + text + "'");
}

Scenario parse_scenario(std::istream& in, const std::string& name) {
  Scenario scn;
  for (const Entry& e : read_entries(in, name)) {
    if (e.section == "network" || e.section.empty()) {
      apply_network_key(scn.cfg, name, e);
    } else if (int sf = sf_of_section(e.section); sf != 0) {
      apply_sf_key(scn.table[sf_index(sf)], name, e);
    } else if (e.section == "run") {
      apply_run_key(scn.run, name, e);
    } else {
      throw parse_error(name, e.line, "unknown section [" + e.section + "]");
    }
  }
  try {
    scn.cfg.validate();
    validate(scn.table);
  } catch (const std::exception& ex) {
    throw parse_error(name, 0, ex.what());
  }
  return scn;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error(path, 0, "cannot open scenario file");
  return parse_scenario(in, path);
}

PlanFile parse_plan(std::istream& in, const std::string& name, double default_cell_radius_m) {
  PlanFile plan;
  plan.partition.cell_radius_m = default_cell_radius_m;
  DutyPlan duties{};
  bool has_duty = false;
  for (const Entry& e : read_entries(in, name)) {
    if (e.section == "partition" || e.section.empty()) {
      if (e.key == "cell_radius_m") {
        plan.partition.cell_radius_m = parse_number(name, e.line, e.value);
      } else if (e.key.size() >= 4 && e.key[0] == 'r' && e.key.substr(e.key.size() - 2) == "_m") {
        const std::string num = e.key.substr(1, e.key.size() - 3);
        char* end = nullptr;
        const long sf = std::strtol(num.c_str(), &end, 10);
        if (*end != '\0' || sf < kMinSf || sf > kMaxSf - 1)
          throw parse_error(name, e.line, "unknown [partition] key '" + e.key + "'");
        plan.partition.boundaries_m[sf_index(static_cast<int>(sf))] =
            parse_number(name, e.line, e.value);
      } else {
        throw parse_error(name, e.line, "unknown [partition] key '" + e.key + "'");
      }
    } else if (e.section == "duties") {
      const int sf = sf_of_section(e.key);
      if (sf == 0) throw parse_error(name, e.line, "unknown [duties] key '" + e.key + "'");
      duties.duty[sf_index(sf)] = parse_number(name, e.line, e.value);
      has_duty = true;
    } else {
      throw parse_error(name, e.line, "unknown section [" + e.section + "]");
    }
  }
  if (has_duty) plan.duties = duties;
  try {
    plan.partition.validate();
  } catch (const std::exception& ex) {
    throw parse_error(name, 0, ex.what());
  }
  return plan;
}

PlanFile load_plan(const std::string& path, double default_cell_radius_m) {
  std::ifstream in(path);
  if (!in) throw parse_error(path, 0, "cannot open partition file");
  return parse_plan(in, path, default_cell_radius_m);
}

void write_plan(std::ostream& out, const Partition& part, const DutyPlan* duties) {
  out << "[partition]\n";
  out << "cell_radius_m = " << format_full(part.cell_radius_m) << "\n";
  for (int s = kMinSf; s <= kMaxSf - 1; ++s)
    out << "r" << s << "_m = " << format_full(part.boundaries_m[sf_index(s)]) << "\n";
  if (duties) {
    out << "\n[duties]\n";
    for (int s = kMinSf; s <= kMaxSf; ++s)
      out << "sf" << s << " = " << format_full(duties->duty[sf_index(s)]) << "\n";
  }
}

}  // namespace lora::cli
