#pragma once

// Subcommands as pure functions of a validated RunConfig. Each returns the
// files it would write (name relative to output.dir, full content), so
// results can be compared byte for byte. Every file starts with a header
// naming the tool version and the config hash: a `#` line in CSV, a
// "_meta" object in JSON.

#include <string>
#include <vector>

#include "ecotrace/config.hpp"
#include "ecotrace/eco.hpp"
#include "ecotrace/error.hpp"

namespace ecotrace {

const char* version() noexcept;

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  std::vector<OutputFile> files;
  std::vector<std::string> notes;  // warnings worth showing on stderr
  ErrorCode status = ErrorCode::ok;  // non-ok with files: result written but negative
  std::string message;
};

/// "# ecotrace <version> config <hash>"
std::string header_line(const RunConfig& cfg);

CommandResult run_model_info(const RunConfig& cfg);
CommandResult run_equilibria(const RunConfig& cfg);
CommandResult run_trace_orbit(const RunConfig& cfg);
CommandResult run_trace_1d(const RunConfig& cfg);
CommandResult run_classify(const RunConfig& cfg);
CommandResult run_sweep(const RunConfig& cfg, int jobs);
CommandResult run_arcs(const RunConfig& cfg);
/// Error{not_found | not_found_guaranteed} when the search fails.
CommandResult run_find_eco(const RunConfig& cfg);
/// status not_found when the saved ECO no longer verifies.
CommandResult run_verify_eco(const RunConfig& cfg, const std::string& eco_json);
/// figure: collision-manifold | branches | arcs | ejection | all
CommandResult run_export_figure(const RunConfig& cfg, const std::string& figure);

struct SweepRow {
  double alpha = 0;
  std::string kind;  // Kind name, "undecided" or "invalid"
  int n = 0;
  std::string code_pos, code_neg;
  std::string note;
};

/// Classification at every alpha of the sweep range, rows in alpha order
/// whatever the number of worker threads.
std::vector<SweepRow> sweep(const RunConfig& cfg, int jobs);

std::string eco_to_json(const EcoResult& eco, const RunConfig& cfg);
/// Error{parse} on malformed input.
EcoResult eco_from_json(const std::string& text);

}  // namespace ecotrace
