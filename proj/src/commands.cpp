#include "ecotrace/commands.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <sstream>
#include <thread>
#include <variant>

#include "ecotrace/equilibria.hpp"
#include "ecotrace/manifolds1d.hpp"
#include "json.hpp"

namespace ecotrace {

using nlohmann::json;

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json meta(const RunConfig& cfg) {
  return {{"tool", "ecotrace"}, {"version", version()}, {"config_hash", config_hash(cfg)}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// CSV or JSON depending on output.format
OutputFile render(const RunConfig& cfg, const std::string& stem, const Table& t) {
  if (cfg.format == OutputFormat::json) {
    json rows = json::array();
    for (const auto& r : t.rows) {
      json row = json::array();
      for (const auto& c : r) std::visit([&](const auto& v) { row.push_back(v); }, c);
      rows.push_back(std::move(row));
    }
    return {stem + ".json", dump({{"_meta", meta(cfg)}, {"columns", t.columns}, {"rows", rows}})};
  }
  std::ostringstream os;
  os << header_line(cfg) << "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
  os << "\n";
  for (const auto& r : t.rows) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) os << ',';
      if (const auto* d = std::get_if<double>(&r[i]))
        os << num(*d);
      else if (const auto* l = std::get_if<long>(&r[i]))
        os << *l;
      else
        os << csv_field(std::get<std::string>(r[i]));
    }
    os << "\n";
  }
  return {stem + ".csv", os.str()};
}

json vec(const Vec4& v) { return json::array({v[0], v[1], v[2], v[3]}); }
json vec(const RegState& x) { return vec(x.to_array()); }

std::string side_name(Side s) { return std::string(1, side_symbol(s)); }

Table orbit_table(const std::vector<double>& s, const std::vector<RegState>& xs, double h,
                  const PotentialModel& m) {
  Table t{{"s", "r", "v", "theta", "w", "residual"}, {}};
  for (std::size_t i = 0; i < s.size(); ++i) {
    const RegState& x = xs[i];
    t.rows.push_back({s[i], x.r, x.v, x.theta, x.w, energy_residual_normalized(x, h, m)});
  }
  return t;
}

std::string eco_stem(const std::string& sigma) { return sigma.empty() ? "homothetic" : sigma; }

json branch_json(const BranchTrace& b) {
  json j = {{"code", b.code},
            {"crossings", b.crossings.size()},
            {"end", to_string(b.end)},
            {"full_turns", b.full_turns}};
  if (b.end == BranchEnd::escape) j["arm"] = to_string(b.arm);
  if (b.end == BranchEnd::heteroclinic) j["target"] = to_string(b.target);
  return j;
}

struct NamedBranch {
  const char* name;
  const BranchTrace* trace;
};

std::vector<NamedBranch> named(const BranchSet& set) {
  return {{"u_plus", &set.u_plus},   {"u_minus", &set.u_minus}, {"s_plus", &set.s_plus},
          {"s_minus", &set.s_minus}, {"p_plus", &set.p_plus},   {"p_minus", &set.p_minus}};
}

Table arc_table(const SigmaArc& arc) {
  Table t{{"phi", "r", "v", "label"}, {}};
  for (std::size_t i = 0; i < arc.points.size(); ++i) {
    const auto& p = arc.points[i];
    std::string label;
    if (i == 0) label = arc.label_lo;
    if (i + 1 == arc.points.size()) label = label.empty() ? arc.label_hi : label + "|" + arc.label_hi;
    t.rows.push_back({p.phi, p.crossing.r, p.crossing.v, label});
  }
  return t;
}

std::vector<SigmaArc> iterate_arcs(ArcContext& ctx, const SigmaArc& first, Direction dir, int k) {
  std::vector<SigmaArc> cur{first};
  for (int i = 0; i < k; ++i) {
    std::vector<SigmaArc> next;
    for (const auto& arc : cur)
      for (auto& piece : map_arc(ctx, arc, dir)) next.push_back(std::move(piece));
    cur = std::move(next);
  }
  return cur;
}

SweepRow classify_row(const RunConfig& base, double alpha) {
  SweepRow row;
  row.alpha = alpha;
  RunConfig cfg = base;
  cfg.alpha = alpha;
  try {
    const PotentialModel m = make_model(cfg);
    const BranchSet set = trace_all(m, cfg.h, trace_options(cfg));
    row.code_pos = set.u_plus.code;
    row.code_neg = set.u_minus.code;
    try {
      const Classification c = classify(set);
      row.kind = to_string(c.kind);
      row.n = c.n;
      row.note = c.caveat;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::undecided) throw;
      row.kind = "undecided";
      row.note = e.what();
    }
  } catch (const Error& e) {
    row.kind = "invalid";
    row.note = e.what();
  }
  return row;
}

Table sweep_table(const std::vector<SweepRow>& rows, bool with_alpha) {
  Table t{{"alpha", "kind", "n", "code_pos", "code_neg"}, {}};
  for (const auto& r : rows)
    t.rows.push_back({with_alpha ? Cell(r.alpha) : Cell(std::string()), r.kind,
                      static_cast<long>(r.n), r.code_pos, r.code_neg});
  return t;
}

}  // namespace

const char* version() noexcept { return ECOTRACE_VERSION; }

std::string header_line(const RunConfig& cfg) {
  return std::string("# ecotrace ") + version() + " config " + config_hash(cfg);
}

CommandResult run_model_info(const RunConfig& cfg) {
  const PotentialModel m = make_model(cfg);
  const double tc = m.theta_c();
  json j = {{"_meta", meta(cfg)},
            {"name", m.name()},
            {"theta_a", m.theta_a()},
            {"theta_b", m.theta_b()},
            {"theta_c", tc},
            {"c_a", m.c_a()},
            {"c_b", m.c_b()},
            {"single_singularity", m.single_singularity()},
            {"V_min", m.V(tc)},
            {"d2V_min", m.d2V(tc)},
            {"v_c", critical_velocity(m)},
            {"h", cfg.h},
            {"zero_velocity_r_min", zero_velocity_curve(m, cfg.h, tc)},
            {"mass_matrix", {m.mass_matrix().a1, m.mass_matrix().a2}}};
  if (cfg.alpha) j["alpha"] = *cfg.alpha;
  return {{{"model_info.json", dump(j)}}, {}, ErrorCode::ok, ""};
}

CommandResult run_equilibria(const RunConfig& cfg) {
  const PotentialModel m = make_model(cfg);
  const auto [ep, em] = find_equilibria(m, cfg.h);
  const auto one = [](const EquilibriumInfo& e) {
    json pairs = json::array();
    for (const auto& p : e.eigenpairs)
      pairs.push_back({{"re", p.value.real()}, {"im", p.value.imag()}, {"shell_tangent", p.shell_tangent}});
    return json{{"state", vec(e.state)},
                {"v_c", e.v_c},
                {"eigenvalues", pairs},
                {"shell_unstable", e.shell_unstable},
                {"shell_stable", e.shell_stable},
                {"lambda_radial", e.lambda_radial},
                {"lambda_transverse", e.lambda_transverse},
                {"lambda_unstable", e.lambda_unstable},
                {"lambda_stable", e.lambda_stable},
                {"e_radial", vec(e.e_radial)},
                {"e_unstable", vec(e.e_unstable)},
                {"e_stable", vec(e.e_stable)}};
  };
  json j = {{"_meta", meta(cfg)}, {"model", m.name()}, {"h", cfg.h},
            {"E_plus", one(ep)}, {"E_minus", one(em)}};
  return {{{"equilibria.json", dump(j)}}, {}, ErrorCode::ok, ""};
}

CommandResult run_trace_orbit(const RunConfig& cfg) {
  const PotentialModel m = make_model(cfg);
  RegState x;
  x.theta = cfg.orbit_theta0.value_or(m.theta_c());
  x.r = cfg.orbit_r0 ? *cfg.orbit_r0 : 0.5 * zero_velocity_curve(m, cfg.h, x.theta);
  x.w = cfg.orbit_w0;
  if (!solve_shell_v(x, cfg.h, m, cfg.orbit_v_sign))
    throw Error(ErrorCode::domain, "trace-orbit: initial point is outside the Hill region");
  const Orbit o = integrate(x, cfg.h, m, 0.0, cfg.orbit_s_end, integ_options(cfg));
  CommandResult res;
  res.files.push_back(render(cfg, "orbit", orbit_table(o.s, o.states, cfg.h, m)));
  res.notes.push_back(std::string("termination: ") + to_string(o.termination));
  return res;
}

CommandResult run_trace_1d(const RunConfig& cfg) {
  const PotentialModel m = make_model(cfg);
  const BranchSet set = trace_all(m, cfg.h, trace_options(cfg));
  CommandResult res;
  json summary = {{"_meta", meta(cfg)}, {"model", m.name()}};
  for (const auto& b : named(set)) {
    Table t{{"index", "side", "v"}, {}};
    for (const auto& c : b.trace->crossings) t.rows.push_back({static_cast<long>(c.index), side_name(c.side), c.v});
    res.files.push_back(render(cfg, std::string("trace1d_") + b.name, t));
    summary["branches"][b.name] = branch_json(*b.trace);
  }
  try {
    const Classification c = classify(set);
    summary["classification"] = {{"kind", to_string(c.kind)}, {"n", c.n}, {"caveat", c.caveat}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::undecided) throw;
    summary["classification"] = {{"kind", "undecided"}, {"reason", e.what()}};
  }
  res.files.push_back({"trace1d.json", dump(summary)});
  return res;
}

CommandResult run_classify(const RunConfig& cfg) {
  validate_config(cfg);
  SweepRow row = classify_row(cfg, cfg.alpha.value_or(std::nan("")));
  CommandResult res;
  res.files.push_back(render(cfg, "classify", sweep_table({row}, cfg.alpha.has_value())));
  if (!row.note.empty()) res.notes.push_back(row.note);
  if (row.kind == "invalid") {
    res.status = ErrorCode::invalid_model;
    res.message = row.note;
  }
  return res;
}

std::vector<SweepRow> sweep(const RunConfig& base, int jobs) {
  RunConfig cfg = base;
  if (!cfg.alpha) cfg.alpha = cfg.sweep_min;  // replaced per row
  validate_config(cfg);
  if (cfg.model_name != "sc4bp" && cfg.model_name != "rh4bp")
    throw Error(ErrorCode::invalid_argument, "sweep: model.name must take model.alpha");
  const long count =
      static_cast<long>(std::floor((cfg.sweep_max - cfg.sweep_min) / cfg.sweep_step + 1e-9)) + 1;
  std::vector<SweepRow> rows(static_cast<std::size_t>(count));
  std::atomic<long> next{0};
  const auto worker = [&] {
    for (long i; (i = next++) < count;) {
      // snap to the decimal grid so 0.1 + 2 * 0.1 prints as 0.3
      const double a = std::round((cfg.sweep_min + static_cast<double>(i) * cfg.sweep_step) * 1e12) / 1e12;
      rows[static_cast<std::size_t>(i)] = classify_row(cfg, a);
    }
  };
  const int n = std::max(1, std::min<int>(jobs, static_cast<int>(count)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

CommandResult run_sweep(const RunConfig& cfg, int jobs) {
  const auto rows = sweep(cfg, jobs);
  CommandResult res;
  res.files.push_back(render(cfg, "sweep", sweep_table(rows, true)));
  for (const auto& r : rows)
    if (r.kind == "invalid" || r.kind == "undecided")
      res.notes.push_back("alpha " + num(r.alpha) + ": " + r.note);
  return res;
}

CommandResult run_arcs(const RunConfig& cfg) {
  const PotentialModel m = make_model(cfg);
  SearchOptions so = search_options(cfg);
  so.arcs.strict_ends = false;
  ArcContext ctx = make_context(m, cfg.h, so.arcs);
  const FirstArcs fa = first_arcs(ctx);
  const bool J = cfg.arcs_family == 'J';
  const SigmaArc& first = J ? (cfg.arcs_side == 'a' ? fa.Ja : fa.Jb) : (cfg.arcs_side == 'a' ? fa.Ka : fa.Kb);
  const auto pieces =
      iterate_arcs(ctx, first, J ? Direction::forward : Direction::backward, cfg.arcs_iterates);

  CommandResult res;
  res.notes = fa.warnings;
  const std::string stem = std::string("arcs_") + cfg.arcs_family + cfg.arcs_side + "_k" +
                           std::to_string(cfg.arcs_iterates);
  json summary = {{"_meta", meta(cfg)}, {"eps", so.arcs.eps}, {"pieces", json::array()}};
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const auto& p = pieces[i];
    const OutputFile f = render(cfg, stem + "_" + std::to_string(i), arc_table(p));
    summary["pieces"].push_back({{"file", f.name},
                                 {"provenance", p.provenance()},
                                 {"side", side_name(p.side)},
                                 {"points", p.points.size()},
                                 {"label_lo", p.label_lo},
                                 {"label_hi", p.label_hi}});
    res.files.push_back(f);
  }
  summary["warnings"] = fa.warnings;
  res.files.push_back({stem + ".json", dump(summary)});
  return res;
}

std::string eco_to_json(const EcoResult& eco, const RunConfig& cfg) {
  json crossings = json::array();
  for (const auto& c : eco.crossing_states)
    crossings.push_back({{"index", c.index}, {"side", side_name(c.side)}, {"r", c.r}, {"v", c.v}, {"s", c.s}});
  const auto& v = eco.verification;
  json model = {{"name", cfg.model_name}};
  if (cfg.alpha) model["alpha"] = *cfg.alpha;
  json j = {{"_meta", meta(cfg)},
            {"model", model},
            {"h", cfg.h},
            {"sigma", eco.sigma},
            {"code", format_code(eco.sigma)},
            {"phi", eco.phi},
            {"eps", eco.eps},
            {"seed", vec(eco.seed)},
            {"anchor", {{"ejection", vec(eco.anchor.ejection)}, {"collision", vec(eco.anchor.collision)}}},
            {"crossings", crossings},
            {"verification",
             {{"ok", v.ok(eco.sigma)},
              {"forward_target", v.forward_target},
              {"backward_target", v.backward_target},
              {"realized_code", v.realized_code},
              {"min_r_forward", v.min_r_forward},
              {"min_r_backward", v.min_r_backward},
              {"anchor_gap", v.anchor_gap},
              {"segments_match", v.segments_match},
              {"energy_drift", v.energy_drift}}},
            {"guaranteed", eco.guaranteed},
            {"candidates", eco.candidates},
            {"warnings", eco.warnings}};
  return dump(j);
}

EcoResult eco_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    const auto state = [](const json& a) {
      if (!a.is_array() || a.size() != 4) throw Error(ErrorCode::parse, "eco json: state needs 4 numbers");
      return RegState{a[0].get<double>(), a[1].get<double>(), a[2].get<double>(), a[3].get<double>()};
    };
    EcoResult r;
    r.sigma = parse_sigma(j.at("sigma").get<std::string>());
    r.phi = j.at("phi").is_null() ? std::nan("") : j.at("phi").get<double>();
    r.eps = j.at("eps").get<double>();
    r.seed = state(j.at("seed"));
    r.anchor.ejection = state(j.at("anchor").at("ejection"));
    r.anchor.collision = state(j.at("anchor").at("collision"));
    for (const auto& c : j.at("crossings")) {
      SigmaCrossing s;
      s.index = c.at("index").get<int>();
      s.side = c.at("side").get<std::string>() == "a" ? Side::a : Side::b;
      s.r = c.at("r").get<double>();
      s.v = c.at("v").get<double>();
      s.s = c.at("s").get<double>();
      r.crossing_states.push_back(s);
    }
    r.guaranteed = j.value("guaranteed", false);
    r.candidates = j.value("candidates", 0);
    r.warnings = j.value("warnings", std::vector<std::string>{});
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse, std::string("eco json: ") + e.what());
  }
}

CommandResult run_find_eco(const RunConfig& cfg) {
  const PotentialModel m = make_model(cfg);
  const SearchOptions so = search_options(cfg);
  const EcoResult eco = find_eco(m, cfg.h, cfg.sigma, so);
  CommandResult res;
  res.notes = eco.warnings;
  const auto emit = [&](const EcoResult& e, const std::string& stem) {
    res.files.push_back({stem + ".json", eco_to_json(e, cfg)});
    const Orbit o = eco_trajectory(e, m, cfg.h, so);
    res.files.push_back(render(cfg, stem + "_trajectory", orbit_table(o.s, o.states, cfg.h, m)));
  };
  emit(eco, "eco_" + eco_stem(eco.sigma));
  if (cfg.mirror && !cfg.sigma.empty()) {
    const EcoResult mir = eco_mirror(eco, m, cfg.h, so);
    emit(mir, "eco_" + eco_stem(eco.sigma) + "_mirror");
    if (!mir.verification.ok(mir.sigma)) {
      res.status = ErrorCode::not_found;
      res.message = "mirror of (" + format_code(eco.sigma) + ") failed verification";
    }
  }
  return res;
}

CommandResult run_verify_eco(const RunConfig& cfg, const std::string& eco_json) {
  const PotentialModel m = make_model(cfg);
  const json saved = [&] {
    try {
      return json::parse(eco_json);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse, std::string("eco json: ") + e.what());
    }
  }();
  const std::string saved_model = saved.contains("model") ? saved["model"].value("name", "") : "";
  if (!saved_model.empty() && saved_model != cfg.model_name)
    throw Error(ErrorCode::invalid_argument,
                "verify-eco: saved ECO belongs to model " + saved_model + ", config selects " + cfg.model_name);
  const EcoResult eco = eco_from_json(eco_json);
  const EcoVerification v = verify_eco(eco.anchor, cfg.h, m, search_options(cfg));
  const bool ok = v.ok(eco.sigma);
  json j = {{"_meta", meta(cfg)},
            {"sigma", eco.sigma},
            {"ok", ok},
            {"realized_code", v.realized_code},
            {"forward_target", v.forward_target},
            {"backward_target", v.backward_target},
            {"segments_match", v.segments_match},
            {"anchor_gap", v.anchor_gap},
            {"min_r_forward", v.min_r_forward},
            {"min_r_backward", v.min_r_backward},
            {"energy_drift", v.energy_drift}};
  CommandResult res;
  res.files.push_back({"verify_" + eco_stem(eco.sigma) + ".json", dump(j)});
  if (!ok) {
    res.status = ErrorCode::not_found;
    res.message = "saved ECO (" + format_code(eco.sigma) + ") realizes (" + format_code(v.realized_code) + ")";
  }
  return res;
}

namespace {

OutputFile figure_collision_manifold(const RunConfig& cfg, const PotentialModel& m) {
  // w^2 / f + f v^2 / W = 2 on r = 0, away from the collision lines where f = 0
  Table t{{"i", "j", "theta", "v", "w", "residual"}, {}};
  const double width = m.theta_b() - m.theta_a();
  for (int i = 1; i <= cfg.mesh_theta; ++i) {
    const double th = m.theta_a() + width * i / (cfg.mesh_theta + 1);
    const double f = m.f(th), W = m.W(th);
    for (int j = 0; j < cfg.mesh_phi; ++j) {
      const double psi = 2 * M_PI * j / cfg.mesh_phi;
      RegState x{0.0, std::sqrt(2 * W / f) * std::sin(psi), th, std::sqrt(2 * f) * std::cos(psi)};
      t.rows.push_back({static_cast<long>(i), static_cast<long>(j), x.theta, x.v, x.w,
                        energy_residual(x, cfg.h, m)});
    }
  }
  return render(cfg, "figure_collision_manifold", t);
}

OutputFile figure_branches(const RunConfig& cfg, const PotentialModel& m) {
  TraceOptions to = trace_options(cfg);
  to.keep_samples = true;
  const BranchSet set = trace_all(m, cfg.h, to);
  Table t{{"branch", "s", "v", "theta", "w"}, {}};
  for (const auto& b : named(set))
    for (std::size_t i = 0; i < b.trace->s.size(); ++i) {
      const RegState& x = b.trace->samples[i];
      t.rows.push_back({std::string(b.name), b.trace->s[i], x.v, x.theta, x.w});
    }
  return render(cfg, "figure_branches", t);
}

OutputFile figure_arcs(const RunConfig& cfg, const PotentialModel& m, std::vector<std::string>& notes) {
  SearchOptions so = search_options(cfg);
  so.arcs.strict_ends = false;
  ArcContext ctx = make_context(m, cfg.h, so.arcs);
  const FirstArcs fa = first_arcs(ctx);
  notes.insert(notes.end(), fa.warnings.begin(), fa.warnings.end());
  Table t{{"arc", "side", "phi", "r", "v", "label"}, {}};
  const auto add = [&](const std::string& name, const SigmaArc& arc) {
    const Table a = arc_table(arc);
    for (const auto& row : a.rows) t.rows.push_back({name, side_name(arc.side), row[0], row[1], row[2], row[3]});
  };
  add("J^a", fa.Ja);
  add("J^b", fa.Jb);
  add("K^a", fa.Ka);
  add("K^b", fa.Kb);
  for (const SigmaArc* first : {&fa.Ja, &fa.Jb}) {
    const auto img = iterate_arcs(ctx, *first, Direction::forward, 1);
    for (std::size_t i = 0; i < img.size(); ++i) add(img[i].provenance() + "#" + std::to_string(i), img[i]);
  }
  for (const SigmaArc* first : {&fa.Ka, &fa.Kb}) {
    const auto img = iterate_arcs(ctx, *first, Direction::backward, 1);
    for (std::size_t i = 0; i < img.size(); ++i) add(img[i].provenance() + "#" + std::to_string(i), img[i]);
  }
  return render(cfg, "figure_arcs", t);
}

OutputFile figure_ejection(const RunConfig& cfg, const PotentialModel& m) {
  const auto eq = find_equilibria(m, cfg.h);
  const RegState seed = fundamental_seed(eq.first, cfg.search_eps, cfg.figure_phi, m);
  StopRules stop;
  stop.stop_after_crossings = 8;
  const Orbit o = integrate(seed, cfg.h, m, 0.0, 200.0, integ_options(cfg), stop);
  Table t{{"s", "r", "theta", "q1", "q2"}, {}};
  for (std::size_t i = 0; i < o.s.size(); ++i) {
    const auto q = to_configuration(o.states[i], m);
    t.rows.push_back({o.s[i], o.states[i].r, o.states[i].theta, q[0], q[1]});
  }
  return render(cfg, "figure_ejection", t);
}

}  // namespace

CommandResult run_export_figure(const RunConfig& cfg, const std::string& figure) {
  const PotentialModel m = make_model(cfg);
  const bool all = figure == "all";
  CommandResult res;
  bool any = false;
  if (all || figure == "collision-manifold") {
    res.files.push_back(figure_collision_manifold(cfg, m));
    any = true;
  }
  if (all || figure == "branches") {
    res.files.push_back(figure_branches(cfg, m));
    any = true;
  }
  if (all || figure == "arcs") {
    res.files.push_back(figure_arcs(cfg, m, res.notes));
    any = true;
  }
  if (all || figure == "ejection") {
    res.files.push_back(figure_ejection(cfg, m));
    any = true;
  }
  if (!any)
    throw Error(ErrorCode::invalid_argument,
                "export-figure: expected collision-manifold, branches, arcs, ejection or all, got '" + figure + "'");
  return res;
}

}  // namespace ecotrace
