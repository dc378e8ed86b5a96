#include "ecotrace/eco.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "ecotrace/error.hpp"

namespace ecotrace {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kLabelTerms = 16;
constexpr double kLabelTol = 1e-2;
constexpr double kEndCheckTol = 1e-2;
constexpr double kIntersectTol = 1e-9;
constexpr double kTangentAngle = 1e-3;
constexpr double kTailR = 1e-4;           // r every verified tail has to get below
constexpr double kCollisionR = 1e-9;      // intersections this close to r = 0 are arc ends

// ---------------------------------------------------------------- labels

std::vector<LimitPoint> limit_points(const BranchSet& set) {
  std::vector<LimitPoint> out;
  for (char kind : {'u', 's', 'p', 'q'})
    for (Sign sg : {Sign::plus, Sign::minus})
      for (int j = 1; j <= kLabelTerms; ++j) {
        const SeqTerm t{kind, sg, j};
        for (Side side : {Side::a, Side::b})
          if (auto v = term_value(t, set, side)) out.push_back({t.label(), side, *v});
      }
  return out;
}

std::string nearest_label(const ArcContext& ctx, const SigmaCrossing& c) {
  const double scale = std::max(1.0, std::abs(c.v));
  if (c.r > kLabelTol * scale) return "?";
  std::string best = "?";
  double best_d = kLabelTol * scale;
  for (const auto& p : ctx.limits) {
    if (p.side != c.side) continue;
    const double d = std::abs(p.v - c.v);
    if (d < best_d) {
      best_d = d;
      best = p.label;
    }
  }
  return best;
}

std::string mirror_label(const std::string& l) {
  if (l.size() < 3) return l;
  std::string out = l;
  switch (l[0]) {
    case 'u': out[0] = 's'; break;
    case 's': out[0] = 'u'; break;
    case 'p': out[0] = 'q'; break;
    case 'q': out[0] = 'p'; break;
    default: return l;
  }
  char& sg = out.back();
  sg = sg == '+' ? '-' : '+';
  return out;
}

// ---------------------------------------------------------------- evaluation

struct Node {
  double phi = 0;
  MapOutcome out;
  std::string code;
  bool hit() const { return out.status == Termination::sigma_hit; }
  int key() const { return hit() ? (out.crossing.side == Side::a ? 1 : 2) : 0; }
};

struct Evaluated {
  MapOutcome out;
  std::string code;
};

Evaluated evaluate(ArcContext& ctx, ArcOrigin origin, int iterates, double phi) {
  ++ctx.evaluations;
  const RegState seed = fundamental_seed(ctx.eplus, ctx.opt.eps, phi, *ctx.model);
  StopRules stop;
  stop.stop_after_crossings = iterates + 1;
  stop.stop_at_equilibrium = true;
  stop.ball = ctx.opt.split_ball_rel * ctx.opt.eps;
  stop.record_samples = false;
  Evaluated e;
  Orbit o;
  try {
    o = integrate(seed, ctx.h, *ctx.model, 0.0, kMapHorizon, ctx.opt.integ, stop);
  } catch (const Error&) {
    ++ctx.failures;
    e.out.status = Termination::time_exhausted;
    return e;
  }
  e.out.status = o.termination;
  e.out.final_state = o.final_state;
  e.out.elapsed = o.final_s;
  e.out.arm = o.arm;
  e.out.which = o.which;
  for (const auto& c : o.crossings) e.code.push_back(side_symbol(c.side));
  if (o.termination == Termination::sigma_hit) {
    e.out.crossing = o.crossings.back();
    e.out.crossing.index = iterates;
  }
  if (origin == ArcOrigin::stable_of_eminus) {
    e.out.crossing.v = -e.out.crossing.v;
    e.out.crossing.s = -e.out.crossing.s;
    e.out.final_state = apply_symmetry(e.out.final_state);
    e.out.elapsed = -e.out.elapsed;
    e.out.which = e.out.which == Which::eplus ? Which::eminus : Which::eplus;
    std::reverse(e.code.begin(), e.code.end());
  }
  return e;
}

double dist(const SigmaCrossing& a, const SigmaCrossing& b) {
  return std::hypot(a.r - b.r, a.v - b.v);
}

bool needs_split(const ArcOptions& o, const Node& a, const Node& b) {
  if (a.key() != b.key()) return true;
  if (!a.hit()) return false;
  return std::abs(a.out.crossing.v - b.out.crossing.v) > o.dv_max ||
         std::abs(a.out.crossing.r - b.out.crossing.r) > o.dr_max;
}

void charge(ArcContext& ctx, long& used) {
  if (++used > ctx.opt.budget)
    throw Error(ErrorCode::refinement_budget,
                "arc refinement exceeded the budget of " + std::to_string(ctx.opt.budget) +
                    " points");
}

// Bisects every interval whose ends disagree until they agree or the gap is
// below min_dphi. Returns the nodes in increasing phi.
std::vector<Node> refine(ArcContext& ctx, std::vector<Node> nodes,
                         const std::function<Node(double)>& eval, long& used) {
  if (!ctx.opt.refine || nodes.size() < 2) return nodes;
  std::vector<Node> out;
  out.push_back(nodes.front());
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    std::vector<Node> stack{nodes[i]};
    while (!stack.empty()) {
      const Node& left = out.back();
      Node right = stack.back();
      if (needs_split(ctx.opt, left, right) && right.phi - left.phi > ctx.opt.min_dphi) {
        charge(ctx, used);
        stack.push_back(eval(0.5 * (left.phi + right.phi)));
      } else {
        out.push_back(right);
        stack.pop_back();
      }
    }
  }
  return out;
}

std::vector<SigmaArc> pieces(ArcContext& ctx, const std::vector<Node>& nodes, ArcOrigin origin,
                             int iterates) {
  std::vector<SigmaArc> out;
  SigmaArc cur;
  auto flush = [&] {
    if (cur.points.size() >= 2) {
      cur.label_lo = nearest_label(ctx, cur.points.front().crossing);
      cur.label_hi = nearest_label(ctx, cur.points.back().crossing);
      out.push_back(cur);
    }
    cur.points.clear();
  };
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    if (!n.hit()) {
      flush();
      continue;
    }
    if (!cur.points.empty() && needs_split(ctx.opt, nodes[i - 1], n)) flush();
    if (cur.points.empty()) {
      cur.side = n.out.crossing.side;
      cur.origin = origin;
      cur.iterates = iterates;
      cur.eps = ctx.opt.eps;
    }
    cur.points.push_back({n.phi, n.out.crossing, n.code});
  }
  flush();
  return out;
}

// ---------------------------------------------------------------- geometry

struct Pt {
  double x, y;
};

double cross(Pt a, Pt b) { return a.x * b.y - a.y * b.x; }

Pt pt(const SigmaCrossing& c) { return {c.r, c.v}; }

// Parameters (t, u) of the crossing of p0p1 and q0q1, if any.
std::optional<std::pair<double, double>> seg_cross(Pt p0, Pt p1, Pt q0, Pt q1, bool closed) {
  const Pt d1{p1.x - p0.x, p1.y - p0.y}, d2{q1.x - q0.x, q1.y - q0.y};
  const double den = cross(d1, d2);
  if (den == 0.0) return std::nullopt;
  const Pt w{q0.x - p0.x, q0.y - p0.y};
  const double t = cross(w, d2) / den, u = cross(w, d1) / den;
  const bool in = closed ? (t >= 0 && t <= 1 && u >= 0 && u <= 1)
                         : (t >= 0 && t < 1 && u >= 0 && u < 1);
  if (!in) return std::nullopt;
  return std::make_pair(t, u);
}

std::optional<std::pair<double, double>> line_cross(Pt p0, Pt p1, Pt q0, Pt q1) {
  const Pt d1{p1.x - p0.x, p1.y - p0.y}, d2{q1.x - q0.x, q1.y - q0.y};
  const double den = cross(d1, d2);
  if (den == 0.0) return std::nullopt;
  const Pt w{q0.x - p0.x, q0.y - p0.y};
  return std::make_pair(cross(w, d2) / den, cross(w, d1) / den);
}

double angle_between(Pt p0, Pt p1, Pt q0, Pt q1) {
  const Pt d1{p1.x - p0.x, p1.y - p0.y}, d2{q1.x - q0.x, q1.y - q0.y};
  const double a = std::abs(std::atan2(cross(d1, d2), d1.x * d2.x + d1.y * d2.y));
  return std::min(a, kPi - a);
}

struct Bracket {
  ArcOrigin origin;
  int iterates;
  ArcPoint lo, hi;
};

// Halves the bracket, keeping the half whose chord still meets `other`.
// Returns false if the midpoint could not be evaluated.
bool halve(ArcContext& ctx, Bracket& b, const Bracket& other) {
  const double mid = 0.5 * (b.lo.phi + b.hi.phi);
  if (!(mid > b.lo.phi && mid < b.hi.phi)) return false;
  const Evaluated e = evaluate(ctx, b.origin, b.iterates, mid);
  if (e.out.status != Termination::sigma_hit || e.out.crossing.side != b.lo.crossing.side)
    return false;
  const ArcPoint m{mid, e.out.crossing, e.code};
  const Pt q0 = pt(other.lo.crossing), q1 = pt(other.hi.crossing);
  const bool left = seg_cross(pt(b.lo.crossing), pt(m.crossing), q0, q1, true).has_value();
  const bool right = seg_cross(pt(m.crossing), pt(b.hi.crossing), q0, q1, true).has_value();
  bool take_left = left;
  if (left == right) {
    const auto lc = line_cross(pt(b.lo.crossing), pt(b.hi.crossing), q0, q1);
    take_left = lc ? lc->first < 0.5 : true;
  }
  if (take_left)
    b.hi = m;
  else
    b.lo = m;
  return true;
}

// ---------------------------------------------------------------- verification helpers

std::string fmt_g(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

struct Tail {
  bool reached = false;
  double min_r = 0;
  std::string code;
  std::vector<SigmaCrossing> crossings;
  RegState entry;
  double drift = 0;
};

Tail run_tail(const RegState& x, double h, const PotentialModel& m, Direction dir,
              Which target, const SearchOptions& opt) {
  Tail t;
  const double sgn = dir == Direction::forward ? 1.0 : -1.0;
  StopRules stop;
  stop.stop_at_equilibrium = true;
  stop.ball = opt.verify_ball;
  stop.detect_escape = true;
  Orbit o;
  if (distance_to_equilibrium(x, m, target) < opt.verify_ball) {
    // a seed: already inside the ball
    o.termination = Termination::near_equilibrium;
    o.which = target;
    o.final_state = x;
    o.states = {x};
  } else {
    try {
      o = integrate(x, h, m, 0.0, sgn * kMapHorizon, opt.arcs.integ, stop);
    } catch (const Error&) {
      return t;
    }
  }
  t.drift = o.max_energy_drift;
  t.crossings = o.crossings;
  for (const auto& c : o.crossings) t.code.push_back(side_symbol(c.side));
  t.min_r = x.r;
  for (const auto& s : o.states) t.min_r = std::min(t.min_r, s.r);
  if (o.termination != Termination::near_equilibrium || o.which != target) return t;
  t.entry = o.final_state;

  // r has to shrink monotonically over the final approach, by the requested
  // number of decades and below kTailR
  double top = o.final_state.r;
  for (auto it = o.states.rbegin(); it != o.states.rend() && it->r >= top; ++it) top = it->r;
  const double goal = std::min(kTailR, top * std::pow(10.0, -opt.decades));
  double last = o.final_state.r;
  if (last > goal) {
    StopRules free;
    free.stop_at_equilibrium = false;
    free.detect_escape = false;
    const auto [ep, em] = find_equilibria(m, h);
    const double span = 2.0 * std::log(last / goal) / std::abs(ep.lambda_radial) + 1.0;
    Orbit tail;
    try {
      tail = integrate(o.final_state, h, m, 0.0, sgn * span, opt.arcs.integ, free);
    } catch (const Error&) {
      return t;
    }
    t.drift = std::max(t.drift, tail.max_energy_drift);
    for (const auto& s : tail.states) {
      if (s.r > last) return t;
      last = s.r;
      t.min_r = std::min(t.min_r, s.r);
      if (last <= goal) break;
    }
  }
  t.reached = last <= goal;
  return t;
}

// ---------------------------------------------------------------- existence grammar

struct Block {
  std::string word;
  int type;  // 0: single a, 1: single b, 2: B, 3: A, 4: C
};

std::string repeat(const std::string& unit, int times) {
  std::string s;
  for (int i = 0; i < times; ++i) s += unit;
  return s;
}

bool all_same(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [&](char c) { return c == s[0]; });
}

}  // namespace

// ---------------------------------------------------------------- public API

std::string SigmaArc::provenance() const {
  // the first arc's side is the oldest symbol of the code: first for J, last for K
  char first = side_symbol(side);
  if (!points.empty() && !points.front().code.empty())
    first = origin == ArcOrigin::unstable_of_eplus ? points.front().code.front()
                                                   : points.front().code.back();
  std::ostringstream os;
  if (origin == ArcOrigin::unstable_of_eplus)
    os << "P^" << iterates << "(J^" << first << ")";
  else
    os << "P^-" << iterates << "(K^" << first << ")";
  return os.str();
}

RegState fundamental_seed(const EquilibriumInfo& eplus, double eps, double phi,
                          const PotentialModel& model) {
  const double a = kPi * phi;
  const double c = std::cos(a), s = std::sin(a);
  RegState x = eplus.state;
  Vec4 y = x.to_array();
  for (int i = 0; i < 4; ++i) y[i] += eps * (c * eplus.e_unstable[i] + s * eplus.e_radial[i]);
  x = RegState::from_array(y);
  if (x.r < 0) x.r = 0;
  if (!solve_shell_v(x, eplus.h, model, 1.0))
    throw Error(ErrorCode::projection, "fundamental_seed: no shell point at phi = " +
                                           std::to_string(phi));
  return x;
}

std::vector<RegState> fundamental_arc(const EquilibriumInfo& eplus, double eps, int m,
                                      const PotentialModel& model) {
  if (m < 33) throw Error(ErrorCode::invalid_argument, "fundamental_arc: need m >= 33");
  if (!(eps > 0)) throw Error(ErrorCode::invalid_argument, "fundamental_arc: eps must be > 0");
  std::vector<RegState> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i)
    out.push_back(fundamental_seed(eplus, eps, static_cast<double>(i) / (m - 1), model));
  return out;
}

ArcContext make_context(const PotentialModel& m, double h, const ArcOptions& opt) {
  ArcContext ctx;
  ctx.model = &m;
  ctx.h = h;
  ctx.opt = opt;
  std::tie(ctx.eplus, ctx.eminus) = find_equilibria(m, h);
  TraceOptions t;
  t.integ = opt.integ;
  ctx.branches = trace_all(m, h, t);
  ctx.limits = limit_points(ctx.branches);
  return ctx;
}

MapOutcome evaluate_arc(ArcContext& ctx, ArcOrigin origin, int iterates, double phi) {
  return evaluate(ctx, origin, iterates, phi).out;
}

FirstArcs first_arcs(ArcContext& ctx) {
  const ArcOptions& o = ctx.opt;
  if (o.points < 2) throw Error(ErrorCode::invalid_argument, "first_arcs: need at least 2 points");
  long used = 0;
  auto eval = [&](double phi) {
    const Evaluated e = evaluate(ctx, ArcOrigin::unstable_of_eplus, 0, phi);
    return Node{phi, e.out, e.code};
  };

  std::vector<std::string> warnings;
  auto build = [&](double lo, double hi, Side want, const char* label_lo, const char* label_hi) {
    std::vector<Node> nodes;
    for (int j = 1; j <= o.points; ++j) {
      charge(ctx, used);
      nodes.push_back(eval(lo + (hi - lo) * j / (o.points + 1)));
    }
    nodes = refine(ctx, nodes, eval, used);
    if (o.extend_ends) {
      // push the extreme points towards the limits on the collision manifold
      for (int end = 0; end < 2; ++end) {
        const double bound = end == 0 ? lo : hi;
        const std::string l = end == 0 ? label_lo : label_hi;
        const auto limit = term_value(SeqTerm{l[0], l.back() == '+' ? Sign::plus : Sign::minus, 1},
                                      ctx.branches, want);
        for (int it = 0; it < 200; ++it) {
          const Node& x = end == 0 ? nodes.front() : nodes.back();
          if (!x.hit()) break;
          // an end that already approaches its limit stops once the seed is within eps^2 of the
          // end direction; a cut end is pushed as far as the resolution allows
          const bool near = limit && std::abs(x.out.crossing.v - *limit) <=
                                         kEndCheckTol * std::max(1.0, std::abs(*limit));
          if (near && std::abs(std::sin(kPi * (x.phi - bound))) <= o.end_offset * o.eps) break;
          const double phi = 0.5 * (bound + x.phi);
          if (std::abs(phi - x.phi) < o.min_dphi) break;
          charge(ctx, used);
          Node n = eval(phi);
          if (!n.hit() || n.out.crossing.side != want) break;
          if (end == 0) {
            std::vector<Node> head = refine(ctx, {n, nodes.front()}, eval, used);
            nodes.erase(nodes.begin());
            nodes.insert(nodes.begin(), head.begin(), head.end());
          } else {
            std::vector<Node> tail = refine(ctx, {nodes.back(), n}, eval, used);
            nodes.pop_back();
            nodes.insert(nodes.end(), tail.begin(), tail.end());
          }
        }
      }
    }
    auto ps = pieces(ctx, nodes, ArcOrigin::unstable_of_eplus, 0);
    const auto hits = static_cast<std::size_t>(
        std::count_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.hit(); }));
    const bool p_at_lo = label_lo[0] == 'p';
    const std::string fail_msg =
        std::string("first_arcs: first crossings of the fundamental arc do not form one arc on Sigma_") +
        side_symbol(want);
    SigmaArc arc;
    if (o.strict_ends) {
      if (ps.size() != 1 || ps.front().side != want || ps.front().points.size() != hits)
        throw Error(ErrorCode::unresolved_endpoints, fail_msg);
      arc = ps.front();
    } else {
      // keep the piece attached to the p_1 end; the homothetic end may be cut short
      const auto first_hit = std::find_if(nodes.begin(), nodes.end(), [](const Node& n) { return n.hit(); });
      const auto last_hit = std::find_if(nodes.rbegin(), nodes.rend(), [](const Node& n) { return n.hit(); });
      if (ps.empty() || first_hit == nodes.end()) throw Error(ErrorCode::unresolved_endpoints, fail_msg);
      arc = p_at_lo ? ps.front() : ps.back();
      const double end_phi = p_at_lo ? first_hit->phi : last_hit->phi;
      const double arc_end = p_at_lo ? arc.points.front().phi : arc.points.back().phi;
      if (arc.side != want || arc_end != end_phi) throw Error(ErrorCode::unresolved_endpoints, fail_msg);
    }
    arc.label_lo = label_lo;
    arc.label_hi = label_hi;
    // the extreme points must approach the traced limits
    auto check = [&](const ArcPoint& p, std::string& label) {
      const std::string l = label;
      const SeqTerm t{l[0], l.back() == '+' ? Sign::plus : Sign::minus, 1};
      const auto v = term_value(t, ctx.branches, want);
      if (v && std::abs(p.crossing.v - *v) <= kEndCheckTol * std::max(1.0, std::abs(*v))) return;
      if (o.strict_ends || l[0] == 'p')
        throw Error(ErrorCode::unresolved_endpoints,
                    "first_arcs: endpoint of J^" + std::string(1, side_symbol(want)) +
                        " does not approach " + l);
      label = "?";
      std::ostringstream w;
      w.precision(15);
      w << "J^" << side_symbol(want) << " cut at phi = " << (p_at_lo ? arc.points.back().phi : arc.points.front().phi)
        << " before reaching " << l;
      warnings.push_back(w.str());
    };
    check(arc.points.front(), arc.label_lo);
    check(arc.points.back(), arc.label_hi);
    return arc;
  };

  FirstArcs fa;
  fa.Jb = build(0.0, 0.5, Side::b, "p1+", "u1+");
  fa.Ja = build(0.5, 1.0, Side::a, "u1-", "p1-");
  auto mirror = [](const SigmaArc& j) {
    SigmaArc k = j;
    k.origin = ArcOrigin::stable_of_eminus;
    for (auto& p : k.points) {
      p.crossing.v = -p.crossing.v;
      p.crossing.s = -p.crossing.s;
    }
    k.label_lo = mirror_label(j.label_lo);
    k.label_hi = mirror_label(j.label_hi);
    return k;
  };
  fa.Kb = mirror(fa.Jb);
  fa.Ka = mirror(fa.Ja);
  fa.warnings = std::move(warnings);
  return fa;
}

std::vector<SigmaArc> map_arc(ArcContext& ctx, const SigmaArc& arc, Direction dir) {
  const bool along = (arc.origin == ArcOrigin::unstable_of_eplus) == (dir == Direction::forward);
  if (!along && arc.iterates == 0) return {};  // every point returns to its equilibrium
  const int target = arc.iterates + (along ? 1 : -1);
  long used = 0;

  auto image = [&](const ArcPoint& p) {
    Node n;
    n.phi = p.phi;
    ++ctx.evaluations;
    try {
      n.out = poincare_outcome(p.crossing, ctx.h, *ctx.model, dir, ctx.opt.integ,
                               ctx.opt.split_ball_rel * ctx.opt.eps);
    } catch (const Error&) {
      ++ctx.failures;
      n.out.status = Termination::time_exhausted;
      return n;
    }
    const char s = n.hit() ? side_symbol(n.out.crossing.side) : '?';
    if (dir == Direction::forward)
      n.code = along ? p.code + s : p.code.substr(1);
    else
      n.code = along ? s + p.code : p.code.substr(0, p.code.size() - 1);
    return n;
  };
  auto eval = [&](double phi) {
    const Evaluated src = evaluate(ctx, arc.origin, arc.iterates, phi);
    if (src.out.status != Termination::sigma_hit) {
      Node n;
      n.phi = phi;
      n.out = src.out;
      return n;
    }
    return image({phi, src.out.crossing, src.code});
  };

  std::vector<Node> nodes;
  nodes.reserve(arc.points.size());
  for (const auto& p : arc.points) {
    charge(ctx, used);
    nodes.push_back(image(p));
  }
  nodes = refine(ctx, nodes, eval, used);
  return pieces(ctx, nodes, arc.origin, target);
}

std::vector<ArcIntersection> intersect_arcs(ArcContext& ctx, const SigmaArc& a, const SigmaArc& b) {
  if (a.side != b.side)
    throw Error(ErrorCode::invalid_argument, "intersect_arcs: arcs lie on different sides");
  std::vector<ArcIntersection> out;
  for (std::size_t i = 0; i + 1 < a.points.size(); ++i) {
    const Pt p0 = pt(a.points[i].crossing), p1 = pt(a.points[i + 1].crossing);
    const double axlo = std::min(p0.x, p1.x), axhi = std::max(p0.x, p1.x);
    const double aylo = std::min(p0.y, p1.y), ayhi = std::max(p0.y, p1.y);
    for (std::size_t k = 0; k + 1 < b.points.size(); ++k) {
      const Pt q0 = pt(b.points[k].crossing), q1 = pt(b.points[k + 1].crossing);
      if (std::max(q0.x, q1.x) < axlo || std::min(q0.x, q1.x) > axhi ||
          std::max(q0.y, q1.y) < aylo || std::min(q0.y, q1.y) > ayhi)
        continue;
      if (!seg_cross(p0, p1, q0, q1, false)) continue;

      Bracket ba{a.origin, a.iterates, a.points[i], a.points[i + 1]};
      Bracket bb{b.origin, b.iterates, b.points[k], b.points[k + 1]};
      for (int it = 0; it < 400; ++it) {
        const double la = dist(ba.lo.crossing, ba.hi.crossing);
        const double lb = dist(bb.lo.crossing, bb.hi.crossing);
        if (std::max(la, lb) < kIntersectTol) break;
        const bool first = la >= lb;
        if (!halve(ctx, first ? ba : bb, first ? bb : ba) &&
            !halve(ctx, first ? bb : ba, first ? ba : bb))
          break;
      }
      const Pt a0 = pt(ba.lo.crossing), a1 = pt(ba.hi.crossing);
      const Pt b0 = pt(bb.lo.crossing), b1 = pt(bb.hi.crossing);
      const auto lc = line_cross(a0, a1, b0, b1);
      const double t = lc ? std::clamp(lc->first, 0.0, 1.0) : 0.5;
      const double u = lc ? std::clamp(lc->second, 0.0, 1.0) : 0.5;
      ArcIntersection x;
      x.phi_a = ba.lo.phi + t * (ba.hi.phi - ba.lo.phi);
      x.phi_b = bb.lo.phi + u * (bb.hi.phi - bb.lo.phi);
      x.crossing = ba.lo.crossing;
      x.crossing.r = a0.x + t * (a1.x - a0.x);
      x.crossing.v = a0.y + t * (a1.y - a0.y);
      x.angle = angle_between(a0, a1, b0, b1);
      const bool dup = std::any_of(out.begin(), out.end(), [&](const ArcIntersection& y) {
        return dist(y.crossing, x.crossing) < 10 * kIntersectTol;
      });
      if (!dup && x.crossing.r > kCollisionR) out.push_back(x);
    }
  }
  return out;
}

std::string parse_sigma(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (c == 'a' || c == 'b')
      s.push_back(c);
    else if (c == 'A' || c == 'B')
      s.push_back(static_cast<char>(c - 'A' + 'a'));
    else if (c == ',' || c == ' ' || c == '(' || c == ')' || c == '\t')
      continue;
    else
      throw Error(ErrorCode::invalid_argument,
                  std::string("parse_sigma: unexpected symbol '") + c + "'");
  }
  return s;
}

bool eco_guaranteed(const std::string& sigma, const std::optional<Classification>& c) {
  if (all_same(sigma) || sigma.empty()) return true;
  if (!c) return false;
  const int L = static_cast<int>(sigma.size());
  const int n = c->n;
  std::vector<Block> blocks{{"a", 0}, {"b", 1}};
  // allowed successor relation between block types
  std::function<bool(int, int)> edge;
  switch (c->kind) {
    case Kind::I:
    case Kind::II: {
      const int reps = c->kind == Kind::I ? n : n + 1;
      const std::string tail_b = c->kind == Kind::I ? "b" : "";
      const std::string tail_a = c->kind == Kind::I ? "a" : "";
      blocks.push_back({repeat("ba", reps) + tail_b, 2});
      blocks.push_back({repeat("ab", reps) + tail_a, 3});
      edge = [](int x, int y) {
        if (x == 0 && y == 1) return false;
        if (x == 1 && y == 0) return false;
        if (x == y && x >= 2) return false;
        return true;
      };
      break;
    }
    case Kind::III:
    case Kind::IV: {
      const bool three = c->kind == Kind::III;
      const std::string unit = three ? "ba" : "ab";
      const std::string end(1, three ? 'b' : 'a');
      for (int k = 1; 2 * (k * (n + 1) - 1) + 1 <= L; ++k) {
        blocks.push_back({repeat(unit, k * (n + 1)) + end, 2});
        blocks.push_back({repeat(unit, k * (n + 1) - 1) + end, 4});
      }
      const int single = three ? 1 : 0;
      edge = [single](int x, int y) {
        if (x == single) return y == single || y == 2 || y == 4;
        return y == single && (x == 2 || x == 4);
      };
      blocks.erase(blocks.begin() + (three ? 0 : 1));
      break;
    }
    case Kind::D1:
    case Kind::D2: {
      const std::string unit = c->kind == Kind::D1 ? "ab" : "ba";
      for (int k = 1; 2 * k * (n + 1) <= L; ++k) blocks.push_back({repeat(unit, k * (n + 1)), 2});
      edge = [](int x, int y) {
        if (x == 2) return y != 2;
        return y == 2 || y == x;
      };
      break;
    }
    case Kind::symmetric_degenerate: return false;
  }
  // reach[i]: types of blocks that can end a valid decomposition of sigma[0, i)
  std::vector<std::vector<int>> reach(static_cast<std::size_t>(L) + 1);
  for (int i = 0; i < L; ++i) {
    for (const Block& bl : blocks) {
      const int len = static_cast<int>(bl.word.size());
      if (i + len > L || sigma.compare(static_cast<std::size_t>(i), static_cast<std::size_t>(len), bl.word) != 0)
        continue;
      bool ok = i == 0;
      for (int t : reach[static_cast<std::size_t>(i)]) ok = ok || edge(t, bl.type);
      if (ok) reach[static_cast<std::size_t>(i + len)].push_back(bl.type);
    }
  }
  return !reach[static_cast<std::size_t>(L)].empty();
}

namespace {

EcoVerification verify_pieces(const EcoAnchor& anchor, double h, const PotentialModel& m,
                              const SearchOptions& opt, std::vector<SigmaCrossing>* out) {
  EcoVerification v;
  const RegState& x = anchor.ejection;
  const RegState& y = anchor.collision;
  StopRules stop;
  stop.ball = opt.verify_ball;
  stop.stop_after_crossings = opt.max_crossings;
  stop.record_samples = false;

  // middle: forward from the ejection seed, matched against the first crossing
  // before the collision seed
  std::vector<SigmaCrossing> mid;
  Orbit fwd_mid, bwd_mid;
  bool fwd_ok = true, bwd_ok = true;
  try {
    fwd_mid = integrate(x, h, m, 0.0, kMapHorizon, opt.arcs.integ, stop);
  } catch (const Error&) {
    fwd_ok = false;
  }
  StopRules one = stop;
  one.stop_after_crossings = 1;
  try {
    bwd_mid = integrate(y, h, m, 0.0, -kMapHorizon, opt.arcs.integ, one);
  } catch (const Error&) {
    bwd_ok = false;
  }
  double match_s = 0;
  v.anchor_gap = std::numeric_limits<double>::infinity();
  if (fwd_ok && bwd_ok && bwd_mid.termination == Termination::sigma_hit) {
    const SigmaCrossing& c = bwd_mid.crossings.front();
    for (std::size_t i = 0; i < fwd_mid.crossings.size(); ++i) {
      const SigmaCrossing& f = fwd_mid.crossings[i];
      if (f.side != c.side) continue;
      const double g = std::max(std::abs(f.r - c.r), std::abs(f.v - c.v));
      v.anchor_gap = std::min(v.anchor_gap, g);
      if (g <= opt.match_tol) {
        v.anchor_gap = g;
        v.segments_match = true;
        mid.assign(fwd_mid.crossings.begin(), fwd_mid.crossings.begin() + static_cast<long>(i) + 1);
        match_s = f.s - c.s;
        break;
      }
    }
    if (!v.segments_match) mid = fwd_mid.crossings;
  } else if (fwd_ok && bwd_ok && bwd_mid.termination == Termination::near_equilibrium &&
             bwd_mid.which == Which::eplus) {
    // no crossing at all (homothetic): the forward run has to reach E- directly
    mid = fwd_mid.crossings;
    v.segments_match = mid.empty() && fwd_mid.termination == Termination::near_equilibrium &&
                       fwd_mid.which == Which::eminus;
    if (v.segments_match) v.anchor_gap = 0;
  }

  const Tail fwd = run_tail(y, h, m, Direction::forward, Which::eminus, opt);
  const Tail bwd = run_tail(x, h, m, Direction::backward, Which::eplus, opt);
  v.forward_target = fwd.reached;
  v.backward_target = bwd.reached;
  v.min_r_forward = fwd.min_r;
  v.min_r_backward = bwd.min_r;
  v.energy_drift = std::max({fwd.drift, bwd.drift, fwd_mid.max_energy_drift, bwd_mid.max_energy_drift});
  std::string code;
  for (auto it = bwd.code.rbegin(); it != bwd.code.rend(); ++it) code.push_back(*it);
  for (const auto& c : mid) code.push_back(side_symbol(c.side));
  v.realized_code = code + fwd.code;

  if (out) {
    out->clear();
    for (auto it = bwd.crossings.rbegin(); it != bwd.crossings.rend(); ++it) out->push_back(*it);
    out->insert(out->end(), mid.begin(), mid.end());
    for (SigmaCrossing c : fwd.crossings) {
      c.s += match_s;
      out->push_back(c);
    }
    for (std::size_t i = 0; i < out->size(); ++i) (*out)[i].index = static_cast<int>(i);
  }
  return v;
}

EcoResult assemble(ArcContext& ctx, const std::string& sigma, double phi, const EcoAnchor& anchor,
                   const SearchOptions& opt) {
  EcoResult r;
  r.sigma = sigma;
  r.phi = phi;
  r.eps = ctx.opt.eps;
  r.anchor = anchor;
  r.seed = fundamental_seed(ctx.eplus, ctx.opt.eps, phi, *ctx.model);
  r.verification = verify_pieces(anchor, ctx.h, *ctx.model, opt, &r.crossing_states);
  return r;
}

std::string short_code(const std::string& code, std::size_t keep) {
  if (code.size() <= keep) return format_code(code);
  return format_code(code.substr(0, keep)) + ",...";
}

std::optional<EcoResult> search_once(ArcContext& ctx, const std::string& sigma,
                                     const SearchOptions& opt, int& candidates,
                                     std::vector<std::string>& warnings) {
  const PotentialModel& m = *ctx.model;
  const FirstArcs fa = first_arcs(ctx);
  const std::string tag = "eps " + fmt_g(ctx.opt.eps) + ": ";
  for (const auto& w : fa.warnings) warnings.push_back(tag + w);
  const auto side_of = [](char c) { return c == 'a' ? Side::a : Side::b; };
  const std::size_t L = sigma.size();
  std::vector<SigmaArc> current{sigma.back() == 'a' ? fa.Ka : fa.Kb};
  for (std::size_t i = L - 1; i-- > 0;) {
    std::vector<SigmaArc> next;
    for (const auto& arc : current)
      for (auto& piece : map_arc(ctx, arc, Direction::backward))
        if (piece.side == side_of(sigma[i])) next.push_back(std::move(piece));
    current = std::move(next);
    if (current.empty()) break;
  }

  const SigmaArc& J = sigma.front() == 'a' ? fa.Ja : fa.Jb;
  for (const auto& arc : current) {
    for (const auto& x : intersect_arcs(ctx, arc, J)) {
      ++candidates;
      const RegState zj = fundamental_seed(ctx.eplus, ctx.opt.eps, x.phi_b, m);
      const RegState zk = apply_symmetry(fundamental_seed(ctx.eplus, ctx.opt.eps, x.phi_a, m));
      EcoResult r = assemble(ctx, sigma, x.phi_b, {zj, zk}, opt);
      if (!r.verification.ok(sigma)) {
        const auto& v = r.verification;
        warnings.push_back(tag + "candidate " + std::to_string(candidates) + " rejected: realized (" +
                           short_code(v.realized_code, L + 3) + "), E+ " +
                           (v.backward_target ? "reached" : "missed") + ", E- " +
                           (v.forward_target ? "reached" : "missed") + ", gap " +
                           fmt_g(v.anchor_gap));
        continue;
      }
      r.candidates = candidates;
      r.warnings = warnings;
      if (x.angle < kTangentAngle)
        r.warnings.push_back("near-tangential intersection (angle " + std::to_string(x.angle) + " rad)");
      return r;
    }
  }
  return std::nullopt;
}

}  // namespace

EcoVerification verify_eco(const EcoAnchor& anchor, double h, const PotentialModel& m,
                           const SearchOptions& opt) {
  return verify_pieces(anchor, h, m, opt, nullptr);
}

EcoResult find_eco(const PotentialModel& m, double h, const std::string& sigma,
                   const SearchOptions& opt) {
  for (char c : sigma)
    if (c != 'a' && c != 'b')
      throw Error(ErrorCode::invalid_argument, "find_eco: sigma must consist of a and b");
  ArcContext ctx = make_context(m, h, opt.arcs);
  std::optional<Classification> cls;
  try {
    cls = classify(ctx.branches);
  } catch (const Error&) {
  }
  const bool guaranteed = eco_guaranteed(sigma, cls);

  if (sigma.empty()) {
    const RegState z = fundamental_seed(ctx.eplus, ctx.opt.eps, 0.5, m);
    EcoResult r = assemble(ctx, sigma, 0.5, {z, apply_symmetry(z)}, opt);
    r.guaranteed = true;
    r.candidates = 1;
    if (!r.verification.ok(sigma))
      throw Error(ErrorCode::not_found_guaranteed, "find_eco: homothetic orbit failed verification");
    return r;
  }

  ctx.opt.strict_ends = false;
  int candidates = 0;
  std::vector<std::string> warnings;
  // larger fundamental arcs spread the orbits that shadow the homothetic one
  for (double eps = opt.arcs.eps; eps <= opt.max_eps * (1 + 1e-9); eps *= 10) {
    ctx.opt.eps = eps;
    std::optional<EcoResult> r;
    try {
      r = search_once(ctx, sigma, opt, candidates, warnings);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::unresolved_endpoints) throw;
      warnings.push_back("eps " + fmt_g(eps) + ": " + e.what());
    }
    if (r) {
      r->guaranteed = guaranteed;
      return *r;
    }
  }
  std::string msg = "find_eco: no verified ECO of type (" + format_code(sigma) + ") after " +
                    std::to_string(candidates) + " candidate intersections";
  for (const auto& w : warnings) msg += "; " + w;
  throw Error(guaranteed ? ErrorCode::not_found_guaranteed : ErrorCode::not_found, msg);
}

EcoResult eco_mirror(const EcoResult& eco, const PotentialModel& m, double h,
                     const SearchOptions& opt) {
  EcoResult r = eco;
  r.sigma.assign(eco.sigma.rbegin(), eco.sigma.rend());
  r.anchor = {apply_symmetry(eco.anchor.collision), apply_symmetry(eco.anchor.ejection)};
  r.verification = verify_pieces(r.anchor, h, m, opt, &r.crossing_states);
  r.seed = r.anchor.ejection;
  r.phi = std::nan("");
  r.warnings = eco.warnings;
  return r;
}

}  // namespace ecotrace

namespace ecotrace {

Orbit eco_trajectory(const EcoResult& eco, const PotentialModel& m, double h,
                     const SearchOptions& opt) {
  StopRules stop;
  stop.ball = opt.verify_ball;
  stop.stop_after_crossings = opt.max_crossings;
  Orbit fwd = integrate(eco.anchor.ejection, h, m, 0.0, kMapHorizon, opt.arcs.integ, stop);
  if (eco.sigma.empty()) {
    if (!fwd.crossings.empty() || fwd.termination != Termination::near_equilibrium)
      throw Error(ErrorCode::not_found, "eco_trajectory: homothetic segment left the line");
    return fwd;
  }
  stop.stop_after_crossings = 1;
  Orbit bwd = integrate(eco.anchor.collision, h, m, 0.0, -kMapHorizon, opt.arcs.integ, stop);
  if (bwd.termination != Termination::sigma_hit)
    throw Error(ErrorCode::not_found, "eco_trajectory: collision seed has no crossing");
  const SigmaCrossing& c = bwd.crossings.front();
  const SigmaCrossing* hit = nullptr;
  for (const auto& f : fwd.crossings)
    if (f.side == c.side && std::max(std::abs(f.r - c.r), std::abs(f.v - c.v)) <= opt.match_tol) {
      hit = &f;
      break;
    }
  if (!hit) throw Error(ErrorCode::not_found, "eco_trajectory: segments do not match");

  Orbit out;
  out.crossings.assign(fwd.crossings.begin(), fwd.crossings.begin() + (hit - fwd.crossings.data()) + 1);
  for (std::size_t i = 0; i < fwd.s.size() && fwd.s[i] <= hit->s; ++i) {
    out.s.push_back(fwd.s[i]);
    out.states.push_back(fwd.states[i]);
  }
  const double shift = hit->s - c.s;
  for (std::size_t i = bwd.s.size(); i-- > 0;) {
    const double s = bwd.s[i] + shift;
    if (!out.s.empty() && s <= out.s.back()) continue;
    out.s.push_back(s);
    out.states.push_back(bwd.states[i]);
  }
  out.max_energy_drift = std::max(fwd.max_energy_drift, bwd.max_energy_drift);
  out.termination = Termination::near_equilibrium;
  out.which = Which::eminus;
  out.final_state = out.states.back();
  out.final_s = out.s.back();
  out.steps = fwd.steps + bwd.steps;
  return out;
}

}  // namespace ecotrace
