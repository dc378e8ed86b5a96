// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any of them fails.

#include <Eigen/Dense>
#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ecotrace/commands.hpp"
#include "ecotrace/eco.hpp"
#include "ecotrace/equilibria.hpp"
#include "ecotrace/manifolds1d.hpp"
#include "oracles.hpp"

using namespace ecotrace;
namespace odeint = boost::numeric::odeint;
using State = std::array<double, 4>;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<PotentialModel> split_models() {
  return {rec4bp(), rh4bp(0.5), rh4bp(1.0), rh4bp(2.0), sc4bp(0.5), sc4bp(1.0), sc4bp(2.0)};
}

// ---- independent linear algebra at an equilibrium

Eigen::Matrix4d fd_jacobian(const State& e, const PotentialModel& m) {
  Eigen::Matrix4d J;
  const double d = 1e-6;
  for (int j = 0; j < 4; ++j) {
    State p = e, q = e;
    p[j] += d;
    q[j] -= d;
    const Vec4 fp = field_regularized(p, -1.0, m), fq = field_regularized(q, -1.0, m);
    for (int i = 0; i < 4; ++i) J(i, j) = (fp[i] - fq[i]) / (2 * d);
  }
  return J;
}

Eigen::Vector4d fd_energy_gradient(const State& e, const PotentialModel& m) {
  Eigen::Vector4d g;
  const double d = 1e-6;
  for (int j = 0; j < 4; ++j) {
    State p = e, q = e;
    p[j] += d;
    q[j] -= d;
    g(j) = (oracle::residual(RegState::from_array(p), -1.0, m) - oracle::residual(RegState::from_array(q), -1.0, m)) /
           (2 * d);
  }
  return g;
}

struct Split {
  int unstable = 0, stable = 0;
  // real eigenvectors tangent to the shell and to r = 0
  Eigen::Vector4d collision_unstable = Eigen::Vector4d::Zero(), collision_stable = Eigen::Vector4d::Zero();
};

Split shell_split(const State& e, const PotentialModel& m) {
  const Eigen::Matrix4d J = fd_jacobian(e, m);
  const Eigen::Vector4d g = fd_energy_gradient(e, m);
  Eigen::EigenSolver<Eigen::Matrix4d> es(J);
  Split s;
  for (int k = 0; k < 4; ++k) {
    const Eigen::Vector4d vec = es.eigenvectors().col(k).real();
    const double re = es.eigenvalues()(k).real();
    if (vec.norm() == 0) continue;
    if (std::abs(g.dot(vec)) / (g.norm() * vec.norm()) > 1e-4) continue;  // leaves the shell
    if (re > 1e-8) ++s.unstable;
    if (re < -1e-8) ++s.stable;
    if (std::abs(vec(0)) < 1e-8 * vec.norm()) (re > 0 ? s.collision_unstable : s.collision_stable) = vec / vec.norm();
  }
  return s;
}

// ---- independent tracing of the one-dimensional manifolds on r = 0

struct OracleHit {
  bool ok = false;
  Side side = Side::b;
  double v = 0;
};

// Integrates dir * field with dense output until w vanishes on a boundary line.
OracleHit first_sigma(const PotentialModel& m, State x, double dir) {
  const auto rhs = [&](const State& y, State& dy, double) {
    const Vec4 f = field_regularized(y, -1.0, m);
    for (int i = 0; i < 4; ++i) dy[i] = dir * f[i];
  };
  auto st = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
  st.initialize(x, 0.0, 1e-3);
  State prev = x;
  for (int k = 0; k < 2000000 && st.current_time() < 1e4; ++k) {
    const auto [t0, t1] = st.do_step(rhs);
    const State cur = st.current_state();
    if (prev[3] != 0 && cur[3] != 0 && (prev[3] > 0) != (cur[3] > 0)) {
      double lo = t0, hi = t1;
      State y;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        st.calc_state(mid, y);
        if ((y[3] > 0) == (prev[3] > 0))
          lo = mid;
        else
          hi = mid;
      }
      st.calc_state(0.5 * (lo + hi), y);
      if (std::abs(y[2] - m.theta_b()) < 1e-6) return {true, Side::b, y[1]};
      if (std::abs(y[2] - m.theta_a()) < 1e-6) return {true, Side::a, y[1]};
    }
    prev = cur;
  }
  return {};
}

// seed at distance eps along a collision-manifold eigenvector, put back on the shell at r = 0
State collision_seed(const State& e, const Eigen::Vector4d& dir, double eps, const PotentialModel& m) {
  State x = e;
  for (int i = 0; i < 4; ++i) x[i] += eps * dir(i);
  x[0] = 0;
  const double f = m.f(x[2]), W = m.W(x[2]);
  x[1] = std::copysign(std::sqrt((2 * W * f - W * x[3] * x[3]) / (f * f)), e[1]);
  return x;
}

struct OracleFirst {
  double u_b = NAN, u_a = NAN, s_b = NAN, s_a = NAN, p_b = NAN, p_a = NAN, q_b = NAN, q_a = NAN;
};

OracleFirst oracle_first_crossings(const PotentialModel& m) {
  // equilibria from the closed conditions: W'(theta_c) = 0 and v = +-sqrt(2 W / f)
  const double tc = m.theta_c();
  const double vc = std::sqrt(2 * m.W(tc) / m.f(tc));
  const State ep{0, vc, tc, 0}, em{0, -vc, tc, 0};
  const Split sp = shell_split(ep, m), sm = shell_split(em, m);
  OracleFirst o;
  const double eps = 1e-7;
  const auto assign = [&](const State& e, const Eigen::Vector4d& vec, double dir, double& on_b, double& on_a) {
    for (double sign : {1.0, -1.0}) {
      const OracleHit h = first_sigma(m, collision_seed(e, sign * vec, eps, m), dir);
      if (!h.ok) continue;
      (h.side == Side::b ? on_b : on_a) = h.v;
    }
  };
  assign(em, sm.collision_unstable, 1.0, o.u_b, o.u_a);
  assign(ep, sp.collision_stable, -1.0, o.s_b, o.s_a);
  assign(ep, sp.collision_unstable, 1.0, o.p_b, o.p_a);
  assign(em, sm.collision_stable, -1.0, o.q_b, o.q_a);
  return o;
}

// ---- criteria

Outcome c1_energy() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto m = rec4bp();
  std::mt19937_64 rng(2024);
  double worst = 0;
  int done = 0;
  while (done < 10) {
    RegState x;
    if (!oracle::shell_state(m, -1.0, rng, x)) continue;
    ++done;
    StopRules stop;
    stop.stop_at_equilibrium = false;
    stop.detect_escape = false;
    const Orbit o = integrate(x, -1.0, m, 0.0, 100.0, {}, stop);
    if (o.final_s < 100.0) return {false, "orbit stopped early: " + std::string(to_string(o.termination))};
    for (const auto& s : o.states) worst = std::max(worst, std::abs(oracle::rec_residual(s, -1.0)));
  }
  const double t = seconds_since(t0);
  return {worst < 1e-9 && t < 5.0, "max residual " + fmt("%.2e", worst) + ", " + fmt("%.2f", t) + " s"};
}

Outcome c2_equilibria() {
  const double vc = std::sqrt(2 * (2 + 4 * std::sqrt(2.0)));
  const auto [ep, em] = find_equilibria(rec4bp(), -1.0);
  bool ok = std::abs(ep.state.r) == 0 && std::abs(ep.state.v - vc) < 1e-10 && std::abs(em.state.v + vc) < 1e-10 &&
            std::abs(ep.state.theta - oracle::pi / 4) < 1e-10 && std::abs(em.state.theta - oracle::pi / 4) < 1e-10 &&
            ep.state.w == 0 && em.state.w == 0 && em.state.r == 0;
  std::string detail = "v_c err " + fmt("%.1e", std::abs(ep.state.v - vc));
  for (const auto& m : split_models()) {
    const auto [p, q] = find_equilibria(m, -1.0);
    const Split sp = shell_split(p.state.to_array(), m), sm = shell_split(q.state.to_array(), m);
    const bool good = sm.unstable == 1 && sm.stable == 2 && sp.unstable == 2 && sp.stable == 1 &&
                      q.shell_unstable == 1 && q.shell_stable == 2 && p.shell_unstable == 2 && p.shell_stable == 1;
    if (!good) {
      ok = false;
      detail += "; split wrong for " + m.name();
    }
  }
  return {ok, detail + "; 7 models split (1u,2s) at E- and (2u,1s) at E+"};
}

Outcome c3_gradient() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0, 1);
  double worst = 0, gap = 0;
  for (const auto& m : split_models()) {
    for (int i = 0; i < 10000; ++i) {
      const double t = m.theta_a() + (m.theta_b() - m.theta_a()) * (1e-3 + (1 - 2e-3) * U(rng));
      const RegState x = oracle::collision_point(m, t, 2 * oracle::pi * U(rng));
      const double dv = field_regularized(x, -1.0, m).v;
      worst = std::min(worst, dv);
      // on r = 0 the energy relation turns dv/ds into sqrt(W) w^2 / (2 f)
      const double ref = std::sqrt(m.W(t)) * x.w * x.w / (2 * m.f(t));
      gap = std::max(gap, std::abs(dv - ref) / std::max(1.0, ref));
    }
  }
  return {worst >= -1e-13 && gap < 1e-10, "min dv/ds " + fmt("%.2e", worst) + ", oracle gap " + fmt("%.1e", gap)};
}

Outcome c4_symmetry() {
  const auto m = rec4bp();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> U(0, 1);
  int done = 0, tries = 0;
  double worst = 0;
  while (done < 20 && tries < 1000) {
    ++tries;
    const SigmaCrossing x{U(rng) < 0.5 ? Side::a : Side::b, 0.05 + 2.95 * U(rng), -3 + 6 * U(rng), 0, 0};
    try {
      const MapOutcome y = poincare_outcome(x, -1.0, m, Direction::forward);
      if (y.status != Termination::sigma_hit) continue;
      SigmaCrossing z = y.crossing;
      z.v = -z.v;
      const MapOutcome t = poincare_outcome(z, -1.0, m, Direction::forward);
      if (t.status != Termination::sigma_hit) continue;
      worst = std::max({worst, std::abs(t.crossing.r - x.r), std::abs(-t.crossing.v - x.v),
                        t.crossing.side == x.side ? 0.0 : 1.0});
      ++done;
    } catch (const Error&) {
    }
  }
  return {done == 20 && worst < 1e-7, std::to_string(done) + " states, max error " + fmt("%.2e", worst)};
}

Outcome c5_homothetic() {
  const auto m = rec4bp();
  const double rmax = m.V(m.theta_c());
  const Orbit o = homothetic(-1.0, m, 0.5 * rmax);
  double dev = 0;
  std::size_t apex = 0;
  for (std::size_t i = 0; i < o.states.size(); ++i) {
    dev = std::max(dev, std::abs(o.states[i].theta - oracle::pi / 4));
    if (o.states[i].r > o.states[apex].r) apex = i;
  }
  const double d_plus = distance_to_equilibrium(o.states.front(), m, Which::eplus);
  const double d_minus = distance_to_equilibrium(o.states.back(), m, Which::eminus);
  bool mono = true;
  for (std::size_t i = apex + 1; i < o.states.size(); ++i) mono = mono && o.states[i].r < o.states[i - 1].r;
  for (std::size_t i = apex; i > 0; --i) mono = mono && o.states[i - 1].r < o.states[i].r;
  const bool ok = dev < 1e-10 && d_plus <= 1e-3 * (1 + 1e-9) && d_minus <= 1e-3 * (1 + 1e-9) && mono;
  return {ok, "theta dev " + fmt("%.1e", dev) + ", ball distances " + fmt("%.1e", d_plus) + "/" +
                  fmt("%.1e", d_minus) + (mono ? ", tails monotone" : ", tails not monotone")};
}

Outcome c6_arc_ends() {
  const auto m = rec4bp();
  const auto [ep, em] = find_equilibria(m, -1.0);
  TraceOptions fine;
  fine.eps = 1e-8;
  const double p_ref = trace_collision_branch(ep, Sign::plus, m, fine).crossings.at(0).v;
  const BranchTrace u = trace_branch(em, Sign::plus, m, fine);
  if (u.crossings.empty() || u.crossings[0].side != Side::b) return {false, "u1+ not on the b line"};
  const double u_ref = u.crossings[0].v;
  std::vector<double> ep_err, eu_err;
  for (int k = 0; k <= 4; ++k) {
    ArcOptions o;
    o.eps = 1.6e-5 / std::pow(2.0, k);
    ArcContext ctx = make_context(m, -1.0, o);
    const FirstArcs fa = first_arcs(ctx);
    if (fa.Jb.label_lo != "p1+" || fa.Jb.label_hi != "u1+") return {false, "unexpected end labels"};
    ep_err.push_back(std::abs(fa.Jb.points.front().crossing.v - p_ref) / std::abs(p_ref));
    eu_err.push_back(std::abs(fa.Jb.points.back().crossing.v - u_ref) / std::abs(u_ref));
  }
  double worst_ratio = 0;
  std::string ratios;
  for (std::size_t k = 1; k < ep_err.size(); ++k) {
    const double rp = ep_err[k] / ep_err[k - 1], ru = eu_err[k] / eu_err[k - 1];
    worst_ratio = std::max({worst_ratio, rp, ru});
    ratios += fmt(" %.3f", rp) + "/" + fmt("%.3f", ru);
  }
  const bool ok = worst_ratio <= 0.6 && ep_err.back() < 1e-3 && eu_err.back() < 1e-3;
  return {ok, "ratios p/u" + ratios + "; errors at 1e-6: " + fmt("%.1e", ep_err.back()) + "/" +
                  fmt("%.1e", eu_err.back())};
}

Outcome c7_first_crossings() {
  std::vector<PotentialModel> models{rec4bp()};
  for (double a : {0.2, 0.6, 1.1, 1.8, 2.8}) models.push_back(sc4bp(a));
  bool ok = true;
  double gap = 0;
  std::string detail;
  for (const auto& m : models) {
    const BranchSet set = trace_all(m);
    const OrderingReport rep = first_crossing_order(set);
    const OracleFirst o = oracle_first_crossings(m);
    const bool mine = o.q_b < o.u_b && o.s_b < o.p_b && o.q_a < o.u_a && o.s_a < o.p_a;
    const auto lib = [&](char kind, Sign s, Side side) {
      const auto v = term_value(SeqTerm{kind, s, 1}, set, side);
      return v ? *v : NAN;
    };
    const double pairs[8][2] = {{lib('u', Sign::plus, Side::b), o.u_b},  {lib('u', Sign::minus, Side::a), o.u_a},
                                {lib('s', Sign::minus, Side::b), o.s_b}, {lib('s', Sign::plus, Side::a), o.s_a},
                                {lib('p', Sign::plus, Side::b), o.p_b},  {lib('p', Sign::minus, Side::a), o.p_a},
                                {lib('q', Sign::minus, Side::b), o.q_b}, {lib('q', Sign::plus, Side::a), o.q_a}};
    double g = 0;
    for (const auto& p : pairs) g = std::max(g, std::abs(p[0] - p[1]) / std::max(1.0, std::abs(p[1])));
    if (std::isnan(g)) g = INFINITY;
    gap = std::max(gap, g);
    if (!(rep.ok() && rep.checked == 4 && mine && g < 1e-6)) {
      ok = false;
      detail += m.name() + " fails; ";
    }
  }
  return {ok, detail + "6 models, library vs oracle gap " + fmt("%.1e", gap)};
}

Outcome eco_words() {
  const auto m = rec4bp();
  bool ok = true;
  std::string detail;
  for (const std::string w : {"b", "bb", "bbb", "a", "aa", "aaa"}) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string code = "-";
    bool good = false;
    try {
      const EcoResult e = find_eco(m, -1.0, w);
      code = e.verification.realized_code;
      std::string sides;
      for (const auto& c : e.crossing_states) sides += side_symbol(c.side);
      good = e.verification.ok(w) && code == w && sides == w;
    } catch (const Error& e) {
      code = e.what();
    }
    const double t = seconds_since(t0);
    good = good && t < 60;
    ok = ok && good;
    detail += "(" + w + ")->" + code + " " + fmt("%.1fs", t) + (w == "aaa" ? "" : ", ");
  }
  return {ok, detail};
}

Outcome c9_type_one() {
  const double alpha = 1.1;
  const auto m = sc4bp(alpha);
  const Classification c = classify(trace_all(m));
  if (c.kind != Kind::I) return {false, "sc4bp(1.1) classified " + std::string(to_string(c.kind))};
  std::string w;
  for (int i = 0; i < c.n; ++i) w += "ba";
  w += "b";
  try {
    const EcoResult e = find_eco(m, -1.0, w);
    const EcoResult mir = eco_mirror(e, m, -1.0);
    const std::string rev(w.rbegin(), w.rend());
    const bool ok = e.verification.ok(w) && static_cast<int>(e.crossing_states.size()) == 2 * c.n + 1 &&
                    mir.sigma == rev && mir.verification.ok(rev);
    return {ok, "alpha 1.1, n = " + std::to_string(c.n) + ", (" + format_code(w) + ") realized (" +
                    format_code(e.verification.realized_code) + "), mirror realized (" +
                    format_code(mir.verification.realized_code) + ")"};
  } catch (const Error& e) {
    return {false, e.what()};
  }
}

std::string repeat(const std::string& s, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) out += s;
  return out;
}

// Type I chain on the b line: s_{2n+1+J}^- < ... < s_{2n+1}^- < u_1^+ < s_{2n}^+ < u_2^- < ... < u_{2n}^- < s_1^- <
// u_{2n+1}^+ < ... < u_{2n+1+J}^+
std::vector<SeqTerm> type_one_chain_b(int n, int J) {
  std::vector<SeqTerm> c;
  for (int k = 2 * n + 1 + J; k >= 2 * n + 1; --k) c.push_back({'s', Sign::minus, k});
  for (int k = 1; k <= 2 * n; ++k) {
    const Sign s = k % 2 ? Sign::plus : Sign::minus;
    c.push_back({'u', s, k});
    c.push_back({'s', s, 2 * n + 1 - k});
  }
  for (int k = 2 * n + 1; k <= 2 * n + 1 + J; ++k) c.push_back({'u', Sign::plus, k});
  return c;
}

Outcome c10_sweep() {
  RunConfig cfg = parse_config("model.name = sc4bp\nmodel.alpha = 1\n");
  cfg.sweep_min = 0.1;
  cfg.sweep_max = 3.0;
  cfg.sweep_step = 0.1;
  const int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto rows = sweep(cfg, jobs);
  bool seen[4] = {false, false, false, false};
  bool ok = true;
  int chain_pairs = 0;
  std::string detail;
  for (const auto& row : rows) {
    const int n = row.n;
    std::string pp, pn;
    Arm ap, an;
    int idx;
    if (row.kind == "I") {
      idx = 0, pp = "(ba){" + std::to_string(n) + "}b*", pn = "(ab){" + std::to_string(n) + "}a*";
      ap = Arm::right, an = Arm::left;
    } else if (row.kind == "II") {
      idx = 1, pp = "(ba){" + std::to_string(n + 1) + "}a*", pn = "(ab){" + std::to_string(n + 1) + "}b*";
      ap = Arm::left, an = Arm::right;
    } else if (row.kind == "III") {
      idx = 2, pp = "(ba){" + std::to_string(n) + "}b*", pn = "(ab){" + std::to_string(n + 1) + "}b*";
      ap = Arm::right, an = Arm::right;
    } else if (row.kind == "IV") {
      idx = 3, pp = "(ba){" + std::to_string(n + 1) + "}a*", pn = "(ab){" + std::to_string(n) + "}a*";
      ap = Arm::left, an = Arm::left;
    } else {
      continue;
    }
    seen[idx] = true;
    const BranchSet set = trace_all(sc4bp(row.alpha));
    const bool codes = std::regex_match(row.code_pos, std::regex(pp)) && std::regex_match(row.code_neg, std::regex(pn));
    const bool arms = set.u_plus.end == BranchEnd::escape && set.u_minus.end == BranchEnd::escape &&
                      set.u_plus.arm == ap && set.u_minus.arm == an && code_of(set.u_plus) == row.code_pos &&
                      code_of(set.u_minus) == row.code_neg;
    bool chain = true;
    if (idx == 0) {
      // b line from the generator, a line as its sign swap
      for (Side side : {Side::b, Side::a}) {
        auto terms = type_one_chain_b(n, 4);
        if (side == Side::a)
          for (auto& t : terms) t.sign = t.sign == Sign::plus ? Sign::minus : Sign::plus;
        std::optional<double> prev;
        for (const auto& t : terms) {
          const auto v = term_value(t, set, side);
          if (!v) continue;
          if (prev) {
            ++chain_pairs;
            chain = chain && *prev < *v;
          }
          prev = v;
        }
      }
      chain = chain && ordering_check(classify(set), set).ok();
    }
    if (!(codes && arms && chain)) {
      ok = false;
      detail += fmt("alpha %.1f ", row.alpha) + row.kind + (codes ? "" : " code") + (arms ? "" : " arm") +
                (chain ? "" : " chain") + "; ";
    }
  }
  ok = ok && seen[0] && seen[1] && seen[2] && seen[3];
  return {ok, detail + std::to_string(rows.size()) + " alphas, types seen I" + (seen[0] ? "+" : "-") + " II" +
                  (seen[1] ? "+" : "-") + " III" + (seen[2] ? "+" : "-") + " IV" + (seen[3] ? "+" : "-") +
                  ", " + std::to_string(chain_pairs) + " Type I chain pairs"};
}

Outcome c11_mcgehee() {
  const auto m = rec4bp();
  std::mt19937_64 rng(11);
  double worst = 0;
  std::size_t compared = 0;
  int done = 0;
  while (done < 5) {
    RegState x;
    if (!oracle::shell_state(m, -1.0, rng, x, 0.3)) continue;
    StopRules stop;
    stop.stop_at_equilibrium = false;
    const Orbit o = integrate(x, -1.0, m, 0.0, 30.0, {}, stop);
    // keep the stretch before the first approach to a boundary
    std::vector<double> times;
    for (std::size_t i = 0; i < o.s.size(); ++i) {
      const double t = o.states[i].theta;
      if (t < 0.2 || t > oracle::pi / 2 - 0.2) break;
      times.push_back(o.s[i]);
    }
    if (times.size() < 10 || times.back() < 0.5) continue;
    ++done;
    // McGehee field in (r, v, theta, u) with d/ds = F d/dtau
    const auto rhs = [](const State& y, State& dy, double) {
      const State g = oracle::rec_mcgehee(y);
      const double F = oracle::rec_F(y[2]);
      for (int i = 0; i < 4; ++i) dy[i] = F * g[i];
    };
    State y{x.r, x.v, x.theta, x.w / oracle::rec_F(x.theta)};
    std::size_t k = 0;
    odeint::integrate_times(odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>()), rhs, y,
                            times.begin(), times.end(), 1e-3, [&](const State& z, double) {
                              const RegState& a = o.states[k++];
                              const double w = oracle::rec_F(z[2]) * z[3];
                              worst = std::max({worst, std::abs(a.r - z[0]), std::abs(a.v - z[1]),
                                                std::abs(a.theta - z[2]), std::abs(a.w - w)});
                            });
    compared += k;
  }
  return {worst < 1e-8, std::to_string(compared) + " samples, max deviation " + fmt("%.2e", worst)};
}

Outcome c12_determinism() {
  const RunConfig cfg = parse_config("model.name = rec4bp\nsearch.sigma = bb\noutput.format = json\n");
  const CommandResult a = run_find_eco(cfg), b = run_find_eco(cfg);
  bool same = a.files.size() == b.files.size() && !a.files.empty();
  for (std::size_t i = 0; same && i < a.files.size(); ++i)
    same = a.files[i].name == b.files[i].name && a.files[i].content == b.files[i].content;
  return {same, std::to_string(a.files.size()) + " files compared byte for byte"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"energy conservation", c1_energy},
      {"equilibria and shell split", c2_equilibria},
      {"gradient-like flow on r = 0", c3_gradient},
      {"symmetry conjugacy of the section map", c4_symmetry},
      {"homothetic ECO", c5_homothetic},
      {"first arc end convergence", c6_arc_ends},
      {"first crossing order", c7_first_crossings},
      {"rec4bp ECOs of one symbol", eco_words},
      {"Type I alternating ECO and mirror", c9_type_one},
      {"sc4bp classification sweep", c10_sweep},
      {"McGehee cross-check", c11_mcgehee},
      {"find-eco determinism", c12_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    Outcome r;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r = checks[i].second();
    } catch (const std::exception& e) {
      r = {false, std::string("exception: ") + e.what()};
    }
    if (!r.pass) ++failed;
    std::printf("%s %2zu %s: %s [%.1f s]\n", r.pass ? "PASS" : "FAIL", i + 1, checks[i].first.c_str(),
                r.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(checks.size()) - failed, checks.size());
  return failed ? 1 : 0;
}
