#include "ecotrace/config.hpp"

#include <boost/crc.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>

#include "ecotrace/error.hpp"

namespace ecotrace {

namespace {

// shortest text that reads back to the same double
std::string fmt_num(double x) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& s) {
  double x = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || p != end || !std::isfinite(x))
    throw Error(ErrorCode::parse, key + ": not a number: '" + s + "'");
  return x;
}

long to_long(const std::string& key, const std::string& s) {
  long x = 0;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, x);
  if (ec != std::errc() || p != end)
    throw Error(ErrorCode::parse, key + ": not an integer: '" + s + "'");
  return x;
}

int to_int(const std::string& key, const std::string& s) {
  const long x = to_long(key, s);
  if (x < -2147483647L || x > 2147483647L)
    throw Error(ErrorCode::parse, key + ": integer out of range: '" + s + "'");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw Error(ErrorCode::parse, key + ": expected true or false: '" + s + "'");
}

char to_choice(const std::string& key, const std::string& s, const std::string& allowed) {
  if (s.size() == 1 && allowed.find(s[0]) != std::string::npos) return s[0];
  throw Error(ErrorCode::parse, key + ": expected one of " + allowed + ": '" + s + "'");
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct KeyDef {
  const char* name;
  const char* help;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <class T>
std::string opt_num(const std::optional<T>& x) {
  return x ? fmt_num(static_cast<double>(*x)) : std::string();
}

#define NUM(field)                                                   \
  [](const RunConfig& c) { return fmt_num(static_cast<double>(c.field)); }
#define INT(field) [](const RunConfig& c) { return std::to_string(c.field); }
#define SET_D(key, field) [](RunConfig& c, const std::string& s) { c.field = to_double(key, s); }
#define SET_L(key, field) [](RunConfig& c, const std::string& s) { c.field = to_long(key, s); }
#define SET_I(key, field) [](RunConfig& c, const std::string& s) { c.field = to_int(key, s); }

const std::vector<KeyDef>& table() {
  static const std::vector<KeyDef> t = {
      {"h", "energy level, negative", NUM(h), SET_D("h", h)},
      {"model.name", "rec4bp | rh4bp | sc4bp | c3bp | sym2n",
       [](const RunConfig& c) { return c.model_name; },
       [](RunConfig& c, const std::string& s) { c.model_name = s; }},
      {"model.alpha", "mass ratio (rh4bp, sc4bp)", [](const RunConfig& c) { return opt_num(c.alpha); },
       [](RunConfig& c, const std::string& s) { c.alpha = to_double("model.alpha", s); }},
      {"model.masses", "m1,m2,m3 (c3bp)",
       [](const RunConfig& c) {
         std::string out;
         if (c.masses)
           for (std::size_t i = 0; i < c.masses->size(); ++i)
             out += (i ? "," : "") + fmt_num((*c.masses)[i]);
         return out;
       },
       [](RunConfig& c, const std::string& s) {
         std::vector<double> m;
         std::stringstream ss(s);
         std::string item;
         while (std::getline(ss, item, ',')) m.push_back(to_double("model.masses", trim(item)));
         if (m.size() != 3) throw Error(ErrorCode::parse, "model.masses: expected three values");
         c.masses = m;
       }},
      {"model.c3bp.lambda", "chart scale (c3bp)",
       [](const RunConfig& c) { return opt_num(c.c3bp_lambda); },
       [](RunConfig& c, const std::string& s) { c.c3bp_lambda = to_double("model.c3bp.lambda", s); }},
      {"model.c3bp.gap_left", "b2 - b1 (c3bp)",
       [](const RunConfig& c) { return opt_num(c.c3bp_gap_left); },
       [](RunConfig& c, const std::string& s) { c.c3bp_gap_left = to_double("model.c3bp.gap_left", s); }},
      {"model.c3bp.gap_right", "a3 - a2 (c3bp)",
       [](const RunConfig& c) { return opt_num(c.c3bp_gap_right); },
       [](RunConfig& c, const std::string& s) { c.c3bp_gap_right = to_double("model.c3bp.gap_right", s); }},
      {"model.sym2n.n", "N of the 2N-body problem (sym2n)",
       [](const RunConfig& c) { return opt_num(c.sym2n_n); },
       [](RunConfig& c, const std::string& s) { c.sym2n_n = to_int("model.sym2n.n", s); }},
      {"model.sym2n.vtilde", "constant regular part (sym2n)", NUM(sym2n_vtilde),
       SET_D("model.sym2n.vtilde", sym2n_vtilde)},
      {"model.mass.a1", "kinetic matrix entry, configuration export only", NUM(mass_a1),
       SET_D("model.mass.a1", mass_a1)},
      {"model.mass.a2", "kinetic matrix entry, configuration export only", NUM(mass_a2),
       SET_D("model.mass.a2", mass_a2)},
      {"integ.rtol", "relative tolerance", NUM(rtol), SET_D("integ.rtol", rtol)},
      {"integ.atol", "absolute tolerance", NUM(atol), SET_D("integ.atol", atol)},
      {"integ.max_steps", "step limit per integration", INT(max_steps), SET_L("integ.max_steps", max_steps)},
      {"integ.v_escape", "escape threshold on r = 0 (0: 1.5 v_c)", NUM(v_escape),
       SET_D("integ.v_escape", v_escape)},
      {"integ.eq_ball", "near-equilibrium radius", NUM(eq_ball), SET_D("integ.eq_ball", eq_ball)},
      {"integ.theta_tol", "side classification tolerance", NUM(theta_tol),
       SET_D("integ.theta_tol", theta_tol)},
      {"integ.h_max", "step size cap", NUM(h_max), SET_D("integ.h_max", h_max)},
      {"trace.eps", "seed offset of the 1D branches", NUM(trace_eps), SET_D("trace.eps", trace_eps)},
      {"trace.max_crossings", "crossings before a branch is undecided", INT(trace_max_crossings),
       SET_I("trace.max_crossings", trace_max_crossings)},
      {"trace.ball", "heteroclinic detection radius", NUM(trace_ball), SET_D("trace.ball", trace_ball)},
      {"search.sigma", "ECO symbol sequence, e.g. b,a,b", [](const RunConfig& c) { return c.sigma; },
       [](RunConfig& c, const std::string& s) {
         try {
           c.sigma = parse_sigma(s);
         } catch (const Error& e) {
           throw Error(ErrorCode::parse, std::string("search.sigma: ") + e.what());
         }
       }},
      {"search.eps", "fundamental arc offset", NUM(search_eps), SET_D("search.eps", search_eps)},
      {"search.max_eps", "largest offset tried", NUM(search_max_eps), SET_D("search.max_eps", search_max_eps)},
      {"search.points", "initial points per arc", INT(search_points), SET_I("search.points", search_points)},
      {"search.dv_max", "refinement threshold in v", NUM(search_dv_max), SET_D("search.dv_max", search_dv_max)},
      {"search.dr_max", "refinement threshold in r", NUM(search_dr_max), SET_D("search.dr_max", search_dr_max)},
      {"search.budget", "point evaluations per arc map", INT(search_budget),
       SET_L("search.budget", search_budget)},
      {"search.verify_ball", "equilibrium ball of the verification", NUM(verify_ball),
       SET_D("search.verify_ball", verify_ball)},
      {"search.decades", "required decrease of r in each tail", NUM(decades), SET_D("search.decades", decades)},
      {"search.match_tol", "segment matching tolerance in (r, v)", NUM(match_tol),
       SET_D("search.match_tol", match_tol)},
      {"search.max_crossings", "crossing cap of the middle segment", INT(search_max_crossings),
       SET_I("search.max_crossings", search_max_crossings)},
      {"search.mirror", "also write the symmetric ECO",
       [](const RunConfig& c) { return std::string(c.mirror ? "true" : "false"); },
       [](RunConfig& c, const std::string& s) { c.mirror = to_bool("search.mirror", s); }},
      {"arcs.side", "a or b", [](const RunConfig& c) { return std::string(1, c.arcs_side); },
       [](RunConfig& c, const std::string& s) { c.arcs_side = to_choice("arcs.side", s, "ab"); }},
      {"arcs.family", "J (forward images) or K (backward images)",
       [](const RunConfig& c) { return std::string(1, c.arcs_family); },
       [](RunConfig& c, const std::string& s) { c.arcs_family = to_choice("arcs.family", s, "JK"); }},
      {"arcs.iterates", "number of maps applied to the first arc", INT(arcs_iterates),
       SET_I("arcs.iterates", arcs_iterates)},
      {"orbit.r0", "initial r (default: half the zero velocity radius)",
       [](const RunConfig& c) { return opt_num(c.orbit_r0); },
       [](RunConfig& c, const std::string& s) { c.orbit_r0 = to_double("orbit.r0", s); }},
      {"orbit.theta0", "initial theta (default: theta_c)",
       [](const RunConfig& c) { return opt_num(c.orbit_theta0); },
       [](RunConfig& c, const std::string& s) { c.orbit_theta0 = to_double("orbit.theta0", s); }},
      {"orbit.w0", "initial w", NUM(orbit_w0), SET_D("orbit.w0", orbit_w0)},
      {"orbit.v_sign", "sign of the initial v", NUM(orbit_v_sign), SET_D("orbit.v_sign", orbit_v_sign)},
      {"orbit.s_end", "regularized time span", NUM(orbit_s_end), SET_D("orbit.s_end", orbit_s_end)},
      {"sweep.alpha_min", "first alpha", NUM(sweep_min), SET_D("sweep.alpha_min", sweep_min)},
      {"sweep.alpha_max", "last alpha", NUM(sweep_max), SET_D("sweep.alpha_max", sweep_max)},
      {"sweep.alpha_step", "alpha increment", NUM(sweep_step), SET_D("sweep.alpha_step", sweep_step)},
      {"figure.mesh_theta", "collision manifold mesh: theta samples", INT(mesh_theta),
       SET_I("figure.mesh_theta", mesh_theta)},
      {"figure.mesh_phi", "collision manifold mesh: samples around each circle", INT(mesh_phi),
       SET_I("figure.mesh_phi", mesh_phi)},
      {"figure.phi", "seed of the ejection trajectory (fraction of pi)", NUM(figure_phi),
       SET_D("figure.phi", figure_phi)},
      {"output.dir", "output directory", [](const RunConfig& c) { return c.output_dir; },
       [](RunConfig& c, const std::string& s) { c.output_dir = s; }},
      {"output.format", "csv or json (tables)",
       [](const RunConfig& c) { return std::string(c.format == OutputFormat::csv ? "csv" : "json"); },
       [](RunConfig& c, const std::string& s) {
         if (s == "csv")
           c.format = OutputFormat::csv;
         else if (s == "json")
           c.format = OutputFormat::json;
         else
           throw Error(ErrorCode::parse, "output.format: expected csv or json: '" + s + "'");
       }},
  };
  return t;
}

#undef NUM
#undef INT
#undef SET_D
#undef SET_L
#undef SET_I

const KeyDef* find_key(const std::string& key) {
  for (const auto& k : table())
    if (key == k.name) return &k;
  return nullptr;
}

bool is_string_key(const std::string& key) {
  return key == "model.name" || key == "search.sigma" || key == "output.dir" ||
         key == "model.masses" || key == "arcs.side" || key == "arcs.family" ||
         key == "output.format";
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

// dotted key -> first line it appears on
std::map<std::string, int> key_lines(const std::string& text) {
  std::map<std::string, int> out;
  std::istringstream in(text);
  std::string line, section;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line[0] == '[') {
      section = trim(line.substr(1, line.find(']') - 1));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    const std::string k = trim(line.substr(0, eq));
    out.emplace(section.empty() ? k : section + "." + k, no);
  }
  return out;
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  const KeyDef* k = find_key(key);
  if (!k) throw Error(ErrorCode::unknown_key, "unknown key '" + key + "'");
  k->set(cfg, strip_quotes(trim(value)));
}

std::string get_config_value(const RunConfig& cfg, const std::string& key) {
  const KeyDef* k = find_key(key);
  if (!k) throw Error(ErrorCode::unknown_key, "unknown key '" + key + "'");
  return k->get(cfg);
}

RunConfig parse_config_text(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::parse, "line " + std::to_string(e.line()) + ": " + e.message());
  }
  const auto lines = key_lines(text);
  const auto where = [&](const std::string& key) {
    const auto it = lines.find(key);
    return it == lines.end() ? std::string("line ?") : "line " + std::to_string(it->second);
  };

  RunConfig cfg;
  std::map<std::string, bool> seen;
  const auto apply = [&](const std::string& key, const std::string& value) {
    if (seen[key]) throw Error(ErrorCode::parse, where(key) + ": duplicate key '" + key + "'");
    seen[key] = true;
    try {
      set_config_value(cfg, key, value);
    } catch (const Error& e) {
      throw Error(e.code(), where(key) + ": " + e.what());
    }
  };
  for (const auto& [name, node] : tree) {
    if (node.empty()) {
      apply(name, node.data());
      continue;
    }
    for (const auto& [sub, leaf] : node) apply(name + "." + sub, leaf.data());
  }
  return cfg;
}

void validate_config(const RunConfig& cfg) {
  std::vector<std::string> missing;
  const std::string& n = cfg.model_name;
  if (n.empty()) {
    missing.push_back("model.name");
  } else if (n == "rh4bp" || n == "sc4bp") {
    if (!cfg.alpha) missing.push_back("model.alpha");
  } else if (n == "c3bp") {
    if (!cfg.masses) missing.push_back("model.masses");
    if (!cfg.c3bp_lambda) missing.push_back("model.c3bp.lambda");
    if (!cfg.c3bp_gap_left) missing.push_back("model.c3bp.gap_left");
    if (!cfg.c3bp_gap_right) missing.push_back("model.c3bp.gap_right");
  } else if (n == "sym2n") {
    if (!cfg.sym2n_n) missing.push_back("model.sym2n.n");
  } else if (n != "rec4bp") {
    throw Error(ErrorCode::invalid_argument, "model.name: unknown model '" + n + "'");
  }
  if (!missing.empty()) {
    std::string msg = "missing key";
    msg += missing.size() > 1 ? "s: " : ": ";
    for (std::size_t i = 0; i < missing.size(); ++i) msg += (i ? ", " : "") + missing[i];
    if (!n.empty()) msg += " (required by model.name = " + n + ")";
    throw Error(ErrorCode::missing_key, msg);
  }
  const auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::invalid_argument, what);
  };
  require(cfg.h < 0, "h must be negative");
  require(cfg.rtol > 0 && cfg.atol > 0, "integ.rtol and integ.atol must be positive");
  require(cfg.max_steps > 0, "integ.max_steps must be positive");
  require(cfg.eq_ball > 0 && cfg.trace_ball > 0 && cfg.verify_ball > 0,
          "equilibrium balls must be positive");
  require(cfg.h_max > 0, "integ.h_max must be positive");
  require(cfg.trace_eps > 0 && cfg.search_eps > 0, "seed offsets must be positive");
  require(cfg.search_max_eps >= cfg.search_eps, "search.max_eps must not be below search.eps");
  require(cfg.search_points >= 33, "search.points must be at least 33");
  require(cfg.trace_max_crossings > 0 && cfg.search_max_crossings > 0,
          "crossing caps must be positive");
  require(cfg.arcs_iterates >= 0, "arcs.iterates must be nonnegative");
  require(cfg.orbit_v_sign == 1.0 || cfg.orbit_v_sign == -1.0, "orbit.v_sign must be 1 or -1");
  require(cfg.sweep_step > 0 && cfg.sweep_max >= cfg.sweep_min, "bad sweep range");
  require(cfg.mesh_theta >= 2 && cfg.mesh_phi >= 3, "mesh too coarse");
  require(cfg.figure_phi > 0 && cfg.figure_phi < 1, "figure.phi must lie in (0, 1)");
  require(!cfg.output_dir.empty(), "output.dir must not be empty");
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg = parse_config_text(text);
  validate_config(cfg);
  return cfg;
}

std::string emit_config(const RunConfig& cfg) {
  std::ostringstream os;
  std::string section;
  for (const auto& k : table()) {
    const std::string value = k.get(cfg);
    const std::string name = k.name;
    if (value.empty() && name != "model.name" && name != "search.sigma") continue;
    const auto dot = name.find('.');
    const std::string sec = dot == std::string::npos ? "" : name.substr(0, dot);
    const std::string key = dot == std::string::npos ? name : name.substr(dot + 1);
    if (sec != section) {
      os << "\n[" << sec << "]\n";
      section = sec;
    }
    os << key << " = " << (is_string_key(name) ? quote(value) : value) << "\n";
  }
  return os.str();
}

std::string config_hash(const RunConfig& cfg) {
  RunConfig c = cfg;
  c.output_dir = RunConfig{}.output_dir;
  const std::string text = emit_config(c);
  boost::crc_32_type crc;
  crc.process_bytes(text.data(), text.size());
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(crc.checksum()));
  return buf;
}

std::vector<ConfigKey> config_keys() {
  const RunConfig defaults;
  std::vector<ConfigKey> out;
  for (const auto& k : table()) out.push_back({k.name, k.get(defaults), k.help});
  return out;
}

PotentialModel make_model(const RunConfig& cfg) {
  validate_config(cfg);
  const std::string& n = cfg.model_name;
  const MassMatrix mass{cfg.mass_a1, cfg.mass_a2};
  if (n == "rec4bp") return rec4bp().with_mass(mass);
  if (n == "rh4bp") return rh4bp(*cfg.alpha).with_mass(mass);
  if (n == "sc4bp") return sc4bp(*cfg.alpha).with_mass(mass);
  if (n == "c3bp") {
    const auto& m = *cfg.masses;
    return c3bp(m[0], m[1], m[2], *cfg.c3bp_lambda, *cfg.c3bp_gap_left, *cfg.c3bp_gap_right)
        .with_mass(mass);
  }
  const double c = cfg.sym2n_vtilde;
  RegularPart vt{[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
  return sym2n(*cfg.sym2n_n, vt).with_mass(mass);
}

IntegOptions integ_options(const RunConfig& cfg) {
  IntegOptions o;
  o.rtol = cfg.rtol;
  o.atol = cfg.atol;
  o.max_steps = cfg.max_steps;
  o.v_escape = cfg.v_escape;
  o.eq_ball = cfg.eq_ball;
  o.theta_tol = cfg.theta_tol;
  o.h_max = cfg.h_max;
  return o;
}

TraceOptions trace_options(const RunConfig& cfg) {
  TraceOptions o;
  o.eps = cfg.trace_eps;
  o.max_crossings = cfg.trace_max_crossings;
  o.ball = cfg.trace_ball;
  o.integ = integ_options(cfg);
  return o;
}

SearchOptions search_options(const RunConfig& cfg) {
  SearchOptions o;
  o.arcs.eps = cfg.search_eps;
  o.arcs.points = cfg.search_points;
  o.arcs.dv_max = cfg.search_dv_max;
  o.arcs.dr_max = cfg.search_dr_max;
  o.arcs.budget = cfg.search_budget;
  o.arcs.integ = integ_options(cfg);
  o.arcs.integ.project_shell = true;
  o.verify_ball = cfg.verify_ball;
  o.decades = cfg.decades;
  o.match_tol = cfg.match_tol;
  o.max_crossings = cfg.search_max_crossings;
  o.max_eps = cfg.search_max_eps;
  return o;
}

}  // namespace ecotrace
