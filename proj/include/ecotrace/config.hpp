#pragma once

// Run configuration: INI-style text with sections, `key = value` lines and
// `#` or `;` comments. Keys are addressed in dotted form, so
//
//   [model]
//   name = "sc4bp"
//   alpha = 1.1
//
// and `model.name = "sc4bp"` at top level are the same thing.

#include <optional>
#include <string>
#include <vector>

#include "ecotrace/eco.hpp"
#include "ecotrace/manifolds1d.hpp"
#include "ecotrace/potentials.hpp"

namespace ecotrace {

enum class OutputFormat { csv, json };

struct RunConfig {
  // model
  std::string model_name;                   // rec4bp | rh4bp | sc4bp | c3bp | sym2n
  std::optional<double> alpha;              // rh4bp, sc4bp
  std::optional<std::vector<double>> masses;  // c3bp: m1, m2, m3
  std::optional<double> c3bp_lambda, c3bp_gap_left, c3bp_gap_right;
  std::optional<int> sym2n_n;
  double sym2n_vtilde = 1.0;  // constant regular part of sym2n
  double mass_a1 = 1.0, mass_a2 = 1.0;

  double h = kDefaultEnergy;

  // integrator
  double rtol = 1e-12, atol = 1e-12;
  long max_steps = 400000;
  double v_escape = 0.0;
  double eq_ball = 1e-3;
  double theta_tol = 1e-6;
  double h_max = 2.0;

  // 1D branches
  double trace_eps = 1e-6;
  int trace_max_crossings = 200;
  double trace_ball = 1e-3;

  // arcs and ECO search
  std::string sigma;  // "bab"; empty is the homothetic orbit
  double search_eps = 1e-6;
  double search_max_eps = 1e-3;
  int search_points = 65;
  double search_dv_max = 0.05, search_dr_max = 0.05;
  long search_budget = 100000;
  double verify_ball = 1e-3;
  double decades = 3;
  double match_tol = 1e-4;
  int search_max_crossings = 64;
  bool mirror = true;  // find-eco also writes the symmetric ECO

  // arcs subcommand
  char arcs_side = 'b';
  char arcs_family = 'J';  // J (forward images) or K (backward images)
  int arcs_iterates = 0;

  // trace-orbit
  std::optional<double> orbit_r0;      // default: half the zero velocity radius
  std::optional<double> orbit_theta0;  // default: theta_c
  double orbit_w0 = 0.0;
  double orbit_v_sign = 1.0;
  double orbit_s_end = 20.0;

  // sweep over alpha
  double sweep_min = 0.1, sweep_max = 4.5, sweep_step = 0.1;

  // export-figure
  int mesh_theta = 61, mesh_phi = 61;
  double figure_phi = 0.25;  // seed of the configuration-space ejection trajectory

  std::string output_dir = ".";
  OutputFormat format = OutputFormat::csv;

  bool operator==(const RunConfig&) const = default;
};

/// Reads the text into a config without checking that the model is complete.
/// Error{parse} with the line number for malformed lines and bad values,
/// Error{unknown_key} with the line number for keys not in the table.
RunConfig parse_config_text(const std::string& text);

/// parse_config_text followed by validate_config.
RunConfig parse_config(const std::string& text);

/// Error{missing_key} listing every key the selected model still needs,
/// Error{invalid_argument} for out-of-range values.
void validate_config(const RunConfig& cfg);

/// Sets one key from its text form, as a config line would.
/// Error{unknown_key} or Error{parse}.
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);

/// Text form of a key's current value ("" for an unset optional).
std::string get_config_value(const RunConfig& cfg, const std::string& key);

/// Canonical text: one section per key group, keys in table order, optional
/// keys only when set, numbers with 17 significant digits.
std::string emit_config(const RunConfig& cfg);

/// CRC-32 of the canonical text with output.dir left out, 8 hex digits.
std::string config_hash(const RunConfig& cfg);

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};
/// Every accepted key with its default.
std::vector<ConfigKey> config_keys();

/// Builds the model the config selects (validate_config first).
PotentialModel make_model(const RunConfig& cfg);

IntegOptions integ_options(const RunConfig& cfg);
TraceOptions trace_options(const RunConfig& cfg);
SearchOptions search_options(const RunConfig& cfg);

}  // namespace ecotrace
