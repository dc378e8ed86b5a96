#include "ecotrace/ecotrace.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <sstream>

#include "ecotrace/commands.hpp"
#include "ecotrace/config.hpp"
#include "ecotrace/error.hpp"

struct ecot_config {
  ecotrace::RunConfig cfg;
};

struct ecot_model {
  ecotrace::PotentialModel model;
};

struct ecot_output {
  ecotrace::CommandResult result;
};

namespace {

thread_local std::string g_last_error;

template <class F>
ecot_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const ecotrace::Error& e) {
    g_last_error = e.what();
    return static_cast<ecot_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return ECOT_ERR_INTERNAL;
}

ecot_status null_arg(const char* what) {
  g_last_error = std::string(what) + " is null";
  return ECOT_ERR_INVALID_ARGUMENT;
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <class Run>
ecot_status run_command(const ecot_config* cfg, ecot_output** out, Run&& run) {
  if (!cfg) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    auto* o = new ecot_output{run(cfg->cfg)};
    *out = o;
    if (o->result.status != ecotrace::ErrorCode::ok) g_last_error = o->result.message;
    return static_cast<ecot_status>(o->result.status);
  });
}

}  // namespace

extern "C" {

const char* ecot_version(void) { return ecotrace::version(); }

const char* ecot_last_error(void) { return g_last_error.c_str(); }

const char* ecot_status_name(ecot_status status) {
  return ecotrace::to_string(static_cast<ecotrace::ErrorCode>(status));
}

void ecot_string_free(char* s) { std::free(s); }

ecot_status ecot_config_new(ecot_config** out) {
  if (!out) return null_arg("out");
  return guarded([&] {
    *out = new ecot_config{};
    return ECOT_OK;
  });
}

ecot_status ecot_config_parse(const char* text, ecot_config** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new ecot_config{ecotrace::parse_config_text(text)};
    return ECOT_OK;
  });
}

ecot_status ecot_config_set(ecot_config* cfg, const char* key, const char* value) {
  if (!cfg) return null_arg("config");
  if (!key || !value) return null_arg("key or value");
  return guarded([&] {
    ecotrace::RunConfig next = cfg->cfg;
    ecotrace::set_config_value(next, key, value);
    cfg->cfg = std::move(next);
    return ECOT_OK;
  });
}

ecot_status ecot_config_get(const ecot_config* cfg, const char* key, char** value) {
  if (!cfg) return null_arg("config");
  if (!key || !value) return null_arg("key or value");
  return guarded([&] {
    *value = dup(ecotrace::get_config_value(cfg->cfg, key));
    return ECOT_OK;
  });
}

ecot_status ecot_config_validate(const ecot_config* cfg) {
  if (!cfg) return null_arg("config");
  return guarded([&] {
    ecotrace::validate_config(cfg->cfg);
    return ECOT_OK;
  });
}

ecot_status ecot_config_emit(const ecot_config* cfg, char** text) {
  if (!cfg) return null_arg("config");
  if (!text) return null_arg("text");
  return guarded([&] {
    *text = dup(ecotrace::emit_config(cfg->cfg));
    return ECOT_OK;
  });
}

ecot_status ecot_config_hash(const ecot_config* cfg, char** hex) {
  if (!cfg) return null_arg("config");
  if (!hex) return null_arg("hex");
  return guarded([&] {
    *hex = dup(ecotrace::config_hash(cfg->cfg));
    return ECOT_OK;
  });
}

ecot_status ecot_config_describe(char** text) {
  if (!text) return null_arg("text");
  return guarded([&] {
    std::ostringstream os;
    for (const auto& k : ecotrace::config_keys()) os << k.name << '\t' << k.default_value << '\t' << k.help << '\n';
    *text = dup(os.str());
    return ECOT_OK;
  });
}

void ecot_config_free(ecot_config* cfg) { delete cfg; }

ecot_status ecot_model_new(const ecot_config* cfg, ecot_model** out) {
  if (!cfg) return null_arg("config");
  if (!out) return null_arg("out");
  *out = nullptr;
  return guarded([&] {
    *out = new ecot_model{ecotrace::make_model(cfg->cfg)};
    return ECOT_OK;
  });
}

ecot_status ecot_model_angles(const ecot_model* m, double* theta_a, double* theta_b, double* theta_c) {
  if (!m) return null_arg("model");
  if (theta_a) *theta_a = m->model.theta_a();
  if (theta_b) *theta_b = m->model.theta_b();
  if (theta_c) *theta_c = m->model.theta_c();
  return ECOT_OK;
}

ecot_status ecot_model_potential(const ecot_model* m, double theta, double* V) {
  if (!m) return null_arg("model");
  if (!V) return null_arg("V");
  return guarded([&] {
    *V = m->model.V(theta);
    return ECOT_OK;
  });
}

ecot_status ecot_model_field(const ecot_model* m, double h, const double x[4], double dx[4]) {
  if (!m) return null_arg("model");
  if (!x || !dx) return null_arg("state");
  const ecotrace::Vec4 d = ecotrace::field_regularized(ecotrace::Vec4{x[0], x[1], x[2], x[3]}, h, m->model);
  for (int i = 0; i < 4; ++i) dx[i] = d[i];
  return ECOT_OK;
}

ecot_status ecot_model_energy_residual(const ecot_model* m, double h, const double x[4], double* residual) {
  if (!m) return null_arg("model");
  if (!x || !residual) return null_arg("state");
  *residual = ecotrace::energy_residual(ecotrace::RegState{x[0], x[1], x[2], x[3]}, h, m->model);
  return ECOT_OK;
}

ecot_status ecot_model_integrate(const ecot_model* m, const ecot_config* cfg, const double x0[4],
                                 double s_end, size_t* count, double** samples) {
  if (!m) return null_arg("model");
  if (!cfg) return null_arg("config");
  if (!x0 || !count || !samples) return null_arg("state or output");
  *count = 0;
  *samples = nullptr;
  return guarded([&] {
    const ecotrace::Orbit o =
        ecotrace::integrate(ecotrace::RegState{x0[0], x0[1], x0[2], x0[3]}, cfg->cfg.h, m->model, 0.0,
                            s_end, ecotrace::integ_options(cfg->cfg));
    auto* buf = static_cast<double*>(std::malloc(sizeof(double) * 5 * (o.s.size() ? o.s.size() : 1)));
    if (!buf) throw std::bad_alloc();
    for (std::size_t i = 0; i < o.s.size(); ++i) {
      const auto& x = o.states[i];
      double* row = buf + 5 * i;
      row[0] = o.s[i];
      row[1] = x.r;
      row[2] = x.v;
      row[3] = x.theta;
      row[4] = x.w;
    }
    *count = o.s.size();
    *samples = buf;
    return ECOT_OK;
  });
}

void ecot_samples_free(double* samples) { std::free(samples); }

void ecot_model_free(ecot_model* m) { delete m; }

ecot_status ecot_run_model_info(const ecot_config* cfg, ecot_output** out) {
  return run_command(cfg, out, ecotrace::run_model_info);
}

ecot_status ecot_run_equilibria(const ecot_config* cfg, ecot_output** out) {
  return run_command(cfg, out, ecotrace::run_equilibria);
}

ecot_status ecot_run_trace_orbit(const ecot_config* cfg, ecot_output** out) {
  return run_command(cfg, out, ecotrace::run_trace_orbit);
}

ecot_status ecot_run_trace_1d(const ecot_config* cfg, ecot_output** out) {
  return run_command(cfg, out, ecotrace::run_trace_1d);
}

ecot_status ecot_run_classify(const ecot_config* cfg, ecot_output** out) {
  return run_command(cfg, out, ecotrace::run_classify);
}

ecot_status ecot_run_sweep(const ecot_config* cfg, int jobs, ecot_output** out) {
  return run_command(cfg, out, [jobs](const ecotrace::RunConfig& c) { return ecotrace::run_sweep(c, jobs); });
}

ecot_status ecot_run_arcs(const ecot_config* cfg, ecot_output** out) {
  return run_command(cfg, out, ecotrace::run_arcs);
}

ecot_status ecot_run_find_eco(const ecot_config* cfg, ecot_output** out) {
  return run_command(cfg, out, ecotrace::run_find_eco);
}

ecot_status ecot_run_verify_eco(const ecot_config* cfg, const char* eco_json, ecot_output** out) {
  if (!eco_json) return null_arg("eco_json");
  return run_command(cfg, out, [eco_json](const ecotrace::RunConfig& c) {
    return ecotrace::run_verify_eco(c, eco_json);
  });
}

ecot_status ecot_run_export_figure(const ecot_config* cfg, const char* figure, ecot_output** out) {
  if (!figure) return null_arg("figure");
  return run_command(cfg, out, [figure](const ecotrace::RunConfig& c) {
    return ecotrace::run_export_figure(c, figure);
  });
}

size_t ecot_output_file_count(const ecot_output* out) { return out ? out->result.files.size() : 0; }

const char* ecot_output_file_name(const ecot_output* out, size_t i) {
  return out && i < out->result.files.size() ? out->result.files[i].name.c_str() : nullptr;
}

const char* ecot_output_file_content(const ecot_output* out, size_t i) {
  return out && i < out->result.files.size() ? out->result.files[i].content.c_str() : nullptr;
}

size_t ecot_output_note_count(const ecot_output* out) { return out ? out->result.notes.size() : 0; }

const char* ecot_output_note(const ecot_output* out, size_t i) {
  return out && i < out->result.notes.size() ? out->result.notes[i].c_str() : nullptr;
}

void ecot_output_free(ecot_output* out) { delete out; }

}  // extern "C"
