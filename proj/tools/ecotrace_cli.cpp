// ecotrace command-line tool. Talks to the library through the C API only.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ecotrace/ecotrace.h"

namespace fs = std::filesystem;

namespace {

struct CliError {
  ecot_status status;
  std::string message;
};

void check(ecot_status st) {
  if (st != ECOT_OK) throw CliError{st, ecot_last_error()};
}

std::string take(char* s) {
  std::string out = s ? s : "";
  ecot_string_free(s);
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{ECOT_ERR_IO, "cannot read " + path};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int exit_code(ecot_status st) {
  switch (st) {
    case ECOT_OK: return 0;
    case ECOT_ERR_NOT_FOUND: return 2;
    case ECOT_ERR_NOT_FOUND_GUARANTEED: return 3;
    default: return 1;
  }
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("ecotrace");
  logger->set_pattern("%^%l%$: %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("ECO_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off")
      spdlog::warn("ECO_LOG: unknown level '{}', keeping warn", env);
    else
      spdlog::set_level(level);
  }
}

// writes the files of an output handle, frees it, returns the run status
ecot_status deliver(ecot_status st, ecot_output* out, const std::string& dir) {
  if (!out) check(st);
  const std::string message = st == ECOT_OK ? "" : ecot_last_error();
  try {
    for (size_t i = 0; i < ecot_output_note_count(out); ++i) spdlog::warn("{}", ecot_output_note(out, i));
    fs::create_directories(dir);
    for (size_t i = 0; i < ecot_output_file_count(out); ++i) {
      const fs::path path = fs::path(dir) / ecot_output_file_name(out, i);
      std::ofstream f(path, std::ios::binary);
      f << ecot_output_file_content(out, i);
      if (!f) throw CliError{ECOT_ERR_IO, "cannot write " + path.string()};
      spdlog::info("wrote {}", path.string());
      std::cout << path.string() << "\n";
    }
  } catch (const fs::filesystem_error& e) {
    ecot_output_free(out);
    throw CliError{ECOT_ERR_IO, e.what()};
  } catch (...) {
    ecot_output_free(out);
    throw;
  }
  ecot_output_free(out);
  if (st != ECOT_OK) spdlog::error("{}", message);
  return st;
}

// "lo:hi:step" into the sweep keys
void set_range(ecot_config* cfg, const std::string& range) {
  std::vector<std::string> parts;
  std::stringstream ss(range);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw CliError{ECOT_ERR_PARSE, "--alpha-range: expected lo:hi:step"};
  check(ecot_config_set(cfg, "sweep.alpha_min", parts[0].c_str()));
  check(ecot_config_set(cfg, "sweep.alpha_max", parts[1].c_str()));
  check(ecot_config_set(cfg, "sweep.alpha_step", parts[2].c_str()));
}

std::string key_table() {
  std::string text = take([] {
    char* s = nullptr;
    ecot_config_describe(&s);
    return s;
  }());
  std::ostringstream os;
  os << "Config keys (INI sections or dotted names, '#' comments), default in brackets:\n";
  std::stringstream ss(text);
  for (std::string line; std::getline(ss, line);) {
    const auto t1 = line.find('\t'), t2 = line.find('\t', t1 + 1);
    const std::string def = line.substr(t1 + 1, t2 - t1 - 1);
    os << "  " << line.substr(0, t1) << " [" << (def.empty() ? "unset" : def) << "]  " << line.substr(t2 + 1) << "\n";
  }
  os << "Exit codes: 0 ok, 1 error, 2 not found, 3 not found although guaranteed.\n"
        "ECO_LOG sets the log level (trace, debug, info, warn, error, off).";
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();

  CLI::App app{std::string("ecotrace ") + ecot_version() +
               ": ejection-collision orbits of two-degree-of-freedom homogeneous problems"};
  app.set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", ecot_version());
  app.footer(key_table());

  std::string config_path, model, alpha, h, sigma, out_dir, format, alpha_range;
  std::vector<std::string> sets;
  int jobs = 1;
  app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
  app.add_option("--model", model, "model.name");
  app.add_option("--alpha", alpha, "model.alpha");
  app.add_option("--h", h, "energy level");
  app.add_option("--sigma", sigma, "ECO symbol sequence, e.g. b,a,b (search.sigma)");
  app.add_option("--out", out_dir, "output directory (output.dir)");
  app.add_option("--format", format, "csv or json (output.format)");
  app.add_option("--jobs", jobs, "worker threads for sweep")->check(CLI::PositiveNumber);
  app.add_option("--set", sets, "key=value override, repeatable");

  auto* c_info = app.add_subcommand("model-info", "angles, critical point and constants of the model");
  auto* c_eq = app.add_subcommand("equilibria", "E+ and E- with their linearization (JSON)");
  auto* c_orbit = app.add_subcommand("trace-orbit", "integrate one orbit (orbit.* keys)");
  auto* c_1d = app.add_subcommand("trace-1d", "crossings of the 1D branches on the collision manifold");
  auto* c_cls = app.add_subcommand("classify", "type and turn count of the model");
  c_cls->add_option("--alpha-range", alpha_range, "lo:hi:step, classify every alpha (as sweep)");
  auto* c_sweep = app.add_subcommand("sweep", "classification over an alpha grid");
  c_sweep->add_option("--alpha-range", alpha_range, "lo:hi:step");
  auto* c_arcs = app.add_subcommand("arcs", "traces of the 2D manifolds on the section");
  std::string side, family;
  int iterates = -1;
  c_arcs->add_option("--side", side, "a or b (arcs.side)");
  c_arcs->add_option("--family", family, "J or K (arcs.family)");
  c_arcs->add_option("--iterates", iterates, "arcs.iterates");
  auto* c_find = app.add_subcommand("find-eco", "search and verify an ECO of type sigma");
  auto* c_verify = app.add_subcommand("verify-eco", "re-integrate a saved ECO");
  std::string input;
  c_verify->add_option("--input", input, "ECO JSON written by find-eco")->required()->check(CLI::ExistingFile);
  auto* c_fig = app.add_subcommand("export-figure", "plot data files");
  std::string figure = "all";
  c_fig->add_option("figure", figure, "collision-manifold | branches | arcs | ejection | all");

  CLI11_PARSE(app, argc, argv);

  ecot_config* cfg = nullptr;
  try {
    if (!config_path.empty())
      check(ecot_config_parse(read_file(config_path).c_str(), &cfg));
    else
      check(ecot_config_new(&cfg));
    const auto set = [&](const char* key, const std::string& value) {
      if (!value.empty()) check(ecot_config_set(cfg, key, value.c_str()));
    };
    set("model.name", model);
    set("model.alpha", alpha);
    set("h", h);
    set("search.sigma", sigma);
    set("output.dir", out_dir);
    set("output.format", format);
    set("arcs.side", side);
    set("arcs.family", family);
    if (iterates >= 0) set("arcs.iterates", std::to_string(iterates));
    for (const auto& kv : sets) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw CliError{ECOT_ERR_PARSE, "--set: expected key=value, got '" + kv + "'"};
      check(ecot_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()));
    }
    if (!alpha_range.empty()) set_range(cfg, alpha_range);
    spdlog::debug("config hash {}", take([&] {
                    char* s = nullptr;
                    ecot_config_hash(cfg, &s);
                    return s;
                  }()));
    const std::string dir = take([&] {
      char* s = nullptr;
      check(ecot_config_get(cfg, "output.dir", &s));
      return s;
    }());

    ecot_output* out = nullptr;
    ecot_status st = ECOT_OK;
    if (*c_info) {
      st = ecot_run_model_info(cfg, &out);
    } else if (*c_eq) {
      st = ecot_run_equilibria(cfg, &out);
    } else if (*c_orbit) {
      st = ecot_run_trace_orbit(cfg, &out);
    } else if (*c_1d) {
      st = ecot_run_trace_1d(cfg, &out);
    } else if (*c_cls) {
      st = alpha_range.empty() ? ecot_run_classify(cfg, &out) : ecot_run_sweep(cfg, jobs, &out);
    } else if (*c_sweep) {
      st = ecot_run_sweep(cfg, jobs, &out);
    } else if (*c_arcs) {
      st = ecot_run_arcs(cfg, &out);
    } else if (*c_find) {
      st = ecot_run_find_eco(cfg, &out);
    } else if (*c_verify) {
      st = ecot_run_verify_eco(cfg, read_file(input).c_str(), &out);
    } else if (*c_fig) {
      st = ecot_run_export_figure(cfg, figure.c_str(), &out);
    }
    st = deliver(st, out, dir);
    ecot_config_free(cfg);
    return exit_code(st);
  } catch (const CliError& e) {
    ecot_config_free(cfg);
    spdlog::error("{} ({})", e.message, ecot_status_name(e.status));
    return exit_code(e.status);
  }
}
