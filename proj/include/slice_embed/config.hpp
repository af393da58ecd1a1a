#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "slice_embed/admission.hpp"

namespace slice_embed {

/// Contents of an experiment config file. Cells are the cartesian product
/// of `k_rel` and `d_e2e_ms` (k-major).
struct RunSettings {
  ExperimentConfig experiment;
  std::vector<unsigned> k_rel;
  std::vector<double> d_e2e_ms;
  std::string output_dir = "out";
  /// Record solver wall-clock time. Off by default so repeated runs produce
  /// identical files.
  bool timing = false;

  /// Experiment with cells rebuilt from the current k_rel/d_e2e_ms lists.
  ExperimentConfig resolved() const;
};

/// Flat `key = value` lines with `#` comments; lists are comma separated.
/// Unknown or duplicate keys, bad values and missing required keys raise
/// ParseError with the offending line.
RunSettings parse_config(std::istream& in);
RunSettings load_config(const std::string& path);

/// Every key the parser accepts, in documentation order.
const std::vector<std::string>& config_keys();

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> k_rel;
  std::optional<double> d_e2e_ms;
  std::optional<BoundMode> bound_mode;
  std::optional<DelayMode> delay_mode;
  std::optional<std::string> output_dir;
  std::optional<std::size_t> requests;
  std::optional<unsigned> jobs;
  std::optional<bool> timing;
};

void apply_overrides(RunSettings& settings, const RunOverrides& overrides);

}  // namespace slice_embed
