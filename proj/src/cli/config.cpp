#include "slice_embed/config.hpp"

#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <set>

#include "slice_embed/errors.hpp"
#include "slice_embed/text.hpp"

namespace slice_embed {

namespace {

using Handler = std::function<void(RunSettings&, std::string_view)>;

std::vector<std::string_view> list_items(std::string_view value) {
  std::vector<std::string_view> items;
  for (const auto item : split(value, ',')) {
    const auto trimmed = trim(item);
    if (trimmed.empty()) throw std::invalid_argument("empty list item");
    items.push_back(trimmed);
  }
  return items;
}

std::size_t count_value(std::string_view value) {
  const auto n = parse_integer(value);
  if (n < 0) throw std::invalid_argument("expected a non-negative integer");
  return static_cast<std::size_t>(n);
}

double real_value(std::string_view value) { return parse_number(value); }

DemandRange range_value(std::string_view value) {
  const auto items = list_items(value);
  if (items.size() != 2) throw std::invalid_argument("expected 'lo, hi'");
  return DemandRange{parse_number(items[0]), parse_number(items[1])};
}

bool bool_value(std::string_view value) {
  if (value == "true" || value == "on" || value == "1") return true;
  if (value == "false" || value == "off" || value == "0") return false;
  throw std::invalid_argument("expected true or false");
}

struct KeySpec {
  std::string key;
  bool required;
  Handler apply;
};

const std::vector<KeySpec>& key_specs() {
  static const std::vector<KeySpec> specs = {
      {"topology.server_count", true,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.server_count = count_value(v); }},
      {"topology.servers_per_edge_switch", true,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.servers_per_edge_switch = count_value(v); }},
      {"topology.edge_switch_count", true,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.edge_switch_count = count_value(v); }},
      {"topology.aggregation_switch_count", true,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.aggregation_switch_count = count_value(v); }},
      {"topology.datacenter_switch_count", true,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.datacenter_switch_count = count_value(v); }},
      {"topology.server_cpu_ghz", false,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.server_cpu_ghz = real_value(v); }},
      {"topology.server_edge_bw_mbps", false,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.server_edge_bw = real_value(v); }},
      {"topology.edge_agg_bw_mbps", false,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.edge_agg_bw = real_value(v); }},
      {"topology.agg_dc_bw_mbps", false,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.agg_dc_bw = real_value(v); }},
      {"topology.server_edge_delay_ms", false,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.server_edge_delay = real_value(v); }},
      {"topology.edge_agg_delay_ms", false,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.edge_agg_delay = real_value(v); }},
      {"topology.agg_dc_delay_ms", false,
       [](RunSettings& s, std::string_view v) { s.experiment.topology.agg_dc_delay = real_value(v); }},
      {"workload.request_count", true,
       [](RunSettings& s, std::string_view v) { s.experiment.workload.request_count = count_value(v); }},
      {"workload.vnfs_per_slice", true,
       [](RunSettings& s, std::string_view v) { s.experiment.workload.vnfs_per_slice = count_value(v); }},
      {"workload.cpu_demand_ghz", false,
       [](RunSettings& s, std::string_view v) { s.experiment.workload.cpu_demand = range_value(v); }},
      {"workload.bw_demand_mbps", false,
       [](RunSettings& s, std::string_view v) { s.experiment.workload.bw_demand = range_value(v); }},
      {"workload.proc_delay_ms", false,
       [](RunSettings& s, std::string_view v) { s.experiment.workload.proc_delay = range_value(v); }},
      {"workload.incompatible", false,
       [](RunSettings& s, std::string_view v) {
         // `vnf:server` pairs, applied to every request.
         for (const auto item : list_items(v)) {
           const auto parts = split(item, ':');
           if (parts.size() != 2) throw std::invalid_argument("expected vnf:server pairs");
           s.experiment.workload.incompatible.emplace(count_value(trim(parts[0])), count_value(trim(parts[1])));
         }
       }},
      {"experiment.k_rel", true,
       [](RunSettings& s, std::string_view v) {
         s.k_rel.clear();
         for (const auto item : list_items(v)) s.k_rel.push_back(static_cast<unsigned>(count_value(item)));
       }},
      {"experiment.d_e2e_ms", true,
       [](RunSettings& s, std::string_view v) {
         s.d_e2e_ms.clear();
         for (const auto item : list_items(v)) s.d_e2e_ms.push_back(parse_number(item));
       }},
      {"experiment.seeds", false,
       [](RunSettings& s, std::string_view v) {
         s.experiment.seeds.clear();
         for (const auto item : list_items(v)) s.experiment.seeds.push_back(count_value(item));
       }},
      {"experiment.bound_mode", false,
       [](RunSettings& s, std::string_view v) {
         const auto mode = parse_bound_mode(v);
         if (!mode) throw std::invalid_argument("expected cpu or bw");
         s.experiment.bound_mode = *mode;
       }},
      {"experiment.delay_mode", false,
       [](RunSettings& s, std::string_view v) {
         const auto mode = parse_delay_mode(v);
         if (!mode) throw std::invalid_argument("expected recompute or frozen");
         s.experiment.delay_mode = *mode;
       }},
      {"experiment.jobs", false,
       [](RunSettings& s, std::string_view v) { s.experiment.jobs = static_cast<unsigned>(count_value(v)); }},
      {"solver.strategy", false,
       [](RunSettings& s, std::string_view v) {
         if (v == "assignment-tree") {
           s.experiment.solver.strategy = BranchStrategy::kAssignmentTree;
         } else if (v == "most-fractional") {
           s.experiment.solver.strategy = BranchStrategy::kMostFractional;
         } else {
           throw std::invalid_argument("expected assignment-tree or most-fractional");
         }
       }},
      {"solver.node_limit", false,
       [](RunSettings& s, std::string_view v) { s.experiment.solver.node_limit = count_value(v); }},
      {"output.dir", false, [](RunSettings& s, std::string_view v) { s.output_dir = std::string(v); }},
      {"output.timing", false, [](RunSettings& s, std::string_view v) { s.timing = bool_value(v); }},
  };
  return specs;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> out;
    for (const auto& spec : key_specs()) out.push_back(spec.key);
    return out;
  }();
  return keys;
}

ExperimentConfig RunSettings::resolved() const {
  ExperimentConfig config = experiment;
  config.cells.clear();
  for (const auto k : k_rel) {
    for (const auto d : d_e2e_ms) config.cells.push_back(SweepCell{k, d});
  }
  return config;
}

RunSettings parse_config(std::istream& in) {
  std::map<std::string_view, const KeySpec*> by_key;
  for (const auto& spec : key_specs()) by_key.emplace(spec.key, &spec);
  RunSettings settings;
  std::set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = text.substr(0, hash);
    text = trim(text);
    if (text.empty()) continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no);
    const std::string key(trim(text.substr(0, eq)));
    const auto value = trim(text.substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw ParseError("unknown key '" + key + "'", line_no);
    if (!seen.insert(key).second) throw ParseError("duplicate key '" + key + "'", line_no);
    if (value.empty()) throw ParseError("missing value for '" + key + "'", line_no);
    try {
      it->second->apply(settings, value);
    } catch (const std::invalid_argument& e) {
      throw ParseError("bad value for '" + key + "': " + e.what(), line_no);
    }
  }
  for (const auto& spec : key_specs()) {
    if (spec.required && !seen.contains(spec.key)) {
      throw ParseError("missing required key '" + spec.key + "'", line_no);
    }
  }
  try {
    settings.resolved().validate();
  } catch (const ConfigurationError& e) {
    throw ParseError(e.what(), line_no);
  }
  return settings;
}

RunSettings load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
  return parse_config(in);
}

void apply_overrides(RunSettings& settings, const RunOverrides& overrides) {
  if (overrides.seed) settings.experiment.seeds = {*overrides.seed};
  if (overrides.k_rel) settings.k_rel = {*overrides.k_rel};
  if (overrides.d_e2e_ms) settings.d_e2e_ms = {*overrides.d_e2e_ms};
  if (overrides.bound_mode) settings.experiment.bound_mode = *overrides.bound_mode;
  if (overrides.delay_mode) settings.experiment.delay_mode = *overrides.delay_mode;
  if (overrides.output_dir) settings.output_dir = *overrides.output_dir;
  if (overrides.requests) settings.experiment.workload.request_count = *overrides.requests;
  if (overrides.jobs) settings.experiment.jobs = *overrides.jobs;
  if (overrides.timing) settings.timing = *overrides.timing;
}

}  // namespace slice_embed
