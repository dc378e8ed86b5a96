#include "ecotrace/integrator.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>

#include "ecotrace/dop853.hpp"
#include "ecotrace/error.hpp"

namespace ecotrace {

namespace {

constexpr double kEventTol = 1e-11;
constexpr double kNoiseW = 1e-13;
constexpr double kTurningTol = 1e-6;
constexpr int kSamplesPerStep = 4;
constexpr int kEscapeSteps = 3;
// once v > v_c on r = 0 the orbit can no longer pass theta_c
constexpr double kEscapeFactor = 1.5;
// shell projection in v, only where v stays away from 0
// shell projection in v only near E+-, where f is largest and the off-shell
// direction is unstable; elsewhere it would divide roundoff by f^2
constexpr double kProjectNear = 0.1;
constexpr double kProjectMaxDv = 1e-6;

int sign_of(double x) noexcept { return (x > 0) - (x < 0); }

}  // namespace

char side_symbol(Side s) noexcept { return s == Side::a ? 'a' : 'b'; }

const char* to_string(Arm a) noexcept { return a == Arm::left ? "left" : "right"; }

const char* to_string(Which w) noexcept { return w == Which::eplus ? "E+" : "E-"; }

const char* to_string(Termination t) noexcept {
  switch (t) {
    case Termination::time_exhausted: return "time_exhausted";
    case Termination::sigma_hit: return "sigma_hit";
    case Termination::escaped: return "escaped";
    case Termination::near_equilibrium: return "near_equilibrium";
  }
  return "?";
}

RegState SigmaCrossing::state(const PotentialModel& m) const noexcept {
  return {r, v, side == Side::a ? m.theta_a() : m.theta_b(), 0.0};
}

double critical_velocity(const PotentialModel& m) { return std::sqrt(2 * m.V(m.theta_c())); }

double distance_to_equilibrium(const RegState& x, const PotentialModel& m, Which which) noexcept {
  const double vc = std::sqrt(2 * m.V_unchecked(m.theta_c()));
  const double dv = x.v - (which == Which::eplus ? vc : -vc);
  const double dt = x.theta - m.theta_c();
  return std::sqrt(x.r * x.r + dv * dv + dt * dt + x.w * x.w);
}

Orbit integrate(const RegState& x0, double h, const PotentialModel& m, double s0, double s1,
                const IntegOptions& opt, const StopRules& stop) {
  Orbit orbit;
  orbit.final_state = x0;
  orbit.final_s = s0;
  if (stop.record_samples) {
    orbit.s.push_back(s0);
    orbit.states.push_back(x0);
  }
  orbit.max_energy_drift = std::abs(energy_residual_normalized(x0, h, m));
  if (s1 == s0) return orbit;

  const double dir = s1 > s0 ? 1.0 : -1.0;
  const double vc = critical_velocity(m);
  const double thc = m.theta_c();
  const double v_escape = opt.v_escape > 0 ? opt.v_escape : kEscapeFactor * vc;
  const double ball = stop.ball > 0 ? stop.ball : opt.eq_ball;
  const bool on_collision_manifold = x0.r == 0.0;

  auto field = [&](double, const Vec4& y) { return field_regularized(y, h, m); };
  Dop853Options dopt;
  dopt.rtol = opt.rtol;
  dopt.atol = opt.atol;
  dopt.h_max = opt.h_max;
  Dop853<decltype(field)> st(field, s0, x0.to_array(), dir, dopt);

  bool inside[2] = {distance_to_equilibrium(x0, m, Which::eplus) < ball,
                    distance_to_equilibrium(x0, m, Which::eminus) < ball};
  double prev_t = s0, prev_w = x0.w;
  int escape_run = 0;
  Arm escape_arm = Arm::right;
  int n_cross = 0;

  auto finish = [&](Termination t, double s, const RegState& x) {
    orbit.termination = t;
    orbit.final_s = s;
    orbit.final_state = x;
    if (stop.record_samples && (orbit.s.empty() || orbit.s.back() != s)) {
      orbit.s.push_back(s);
      orbit.states.push_back(x);
    }
  };

  for (long k = 0;; ++k) {
    if (k >= opt.max_steps)
      throw Error(ErrorCode::max_steps,
                  "integrate: step limit " + std::to_string(opt.max_steps) + " reached at s = " +
                      std::to_string(st.s()));
    const StepStatus status = st.step(s1);
    if (status != StepStatus::accepted)
      throw Error(ErrorCode::step_underflow,
                  "integrate: step size underflow at s = " + std::to_string(st.s()));
    ++orbit.steps;
    const double sa = st.s_prev(), sb = st.s();

    // events of w = 0 on interior samples of the step
    for (int j = 1; j <= kSamplesPerStep; ++j) {
      const double t = j == kSamplesPerStep ? sb : sa + (sb - sa) * j / kSamplesPerStep;
      const double wt = j == kSamplesPerStep ? st.y()[3] : st.dense_component(t, 3);
      const int sp = sign_of(prev_w), sc = sign_of(wt);
      const bool change = sp != 0 && sc != 0 && sp != sc &&
                          std::max(std::abs(prev_w), std::abs(wt)) >= kNoiseW;
      if (change) {
        auto g = [&](double u) { return st.dense_component(u, 3); };
        double lo = prev_t, hi = t;
        boost::uintmax_t iters = 100;
        auto tol = [](double x, double y) { return std::abs(x - y) <= 1e-15 * std::max(1.0, std::abs(x)); };
        double se;
        if (std::abs(g(lo)) < kEventTol * 1e-3) {
          se = lo;
        } else if (std::abs(g(hi)) < kEventTol * 1e-3) {
          se = hi;
        } else {
          auto [x, y] = dir > 0 ? boost::math::tools::toms748_solve(g, lo, hi, tol, iters)
                                : boost::math::tools::toms748_solve(g, hi, lo, tol, iters);
          se = std::abs(g(x)) < std::abs(g(y)) ? x : y;
        }
        const bool launch_root = std::abs(se - s0) <= 1e-10 * std::max(1.0, std::abs(s0));
        if (!launch_root) {
          // recompute the event state with a full-order step, then one Newton
          // correction in s on w
          Vec4 ye = st.solution_at(se);
          const Vec4 fe = field_regularized(ye, h, m);
          if (std::abs(fe[3]) > 0) {
            const double ds = -ye[3] / fe[3];
            if (std::abs(ds) < 1e-3 * std::abs(sb - sa) + 1e-12) {
              for (int i = 0; i < 4; ++i) ye[i] += ds * fe[i];
              se += ds;
            }
          }
          RegState xe = RegState::from_array(ye);
          if (on_collision_manifold) xe.r = 0.0;
          if (std::abs(xe.w) >= kEventTol)
            throw Error(ErrorCode::ambiguous_event, "integrate: event refinement failed");
          std::optional<Side> side;
          // loose tolerances can land the event slightly outside the interval
          if (xe.theta > m.theta_b() - opt.theta_tol)
            side = Side::b;
          else if (xe.theta < m.theta_a() + opt.theta_tol)
            side = Side::a;
          if (side) {
            SigmaCrossing c{*side, xe.r, xe.v, se, n_cross};
            orbit.crossings.push_back(c);
            ++n_cross;
            if (stop.stop_after_crossings > 0 && n_cross >= stop.stop_after_crossings) {
              orbit.max_energy_drift =
                  std::max(orbit.max_energy_drift, std::abs(energy_residual_normalized(xe, h, m)));
              finish(Termination::sigma_hit, se, c.state(m));
              return orbit;
            }
          } else {
            const double V = m.V_unchecked(xe.theta);
            const double id = xe.v * xe.v - 2 * xe.r * h - 2 * V;
            if (!(xe.theta > m.theta_a() && xe.theta < m.theta_b()) ||
                std::abs(id) > std::max(kTurningTol, 1e4 * std::max(opt.rtol, opt.atol)) * std::max(1.0, 2 * V))
              throw Error(ErrorCode::ambiguous_event,
                          "integrate: w = 0 at theta = " + std::to_string(xe.theta) +
                              " is neither a Sigma crossing nor a turning point");
            orbit.turning_points.push_back({se, xe});
          }
        }
      }
      if (sc != 0) {
        prev_w = wt;
        prev_t = t;
      }
    }

    RegState x = RegState::from_array(st.y());
    if (opt.project_shell && std::min(distance_to_equilibrium(x, m, Which::eplus),
                                      distance_to_equilibrium(x, m, Which::eminus)) < kProjectNear) {
      RegState p = x;
      if (solve_shell_v(p, h, m, x.v) && std::abs(p.v - x.v) < kProjectMaxDv) {
        x = p;
        st.replace_state(x.to_array());
      }
    }
    orbit.max_energy_drift =
        std::max(orbit.max_energy_drift, std::abs(energy_residual_normalized(x, h, m)));
    if (stop.record_samples) {
      orbit.s.push_back(sb);
      orbit.states.push_back(x);
    }

    // equilibrium balls: only entries from outside count
    for (int e = 0; e < 2; ++e) {
      const Which which = e == 0 ? Which::eplus : Which::eminus;
      const double d_end = distance_to_equilibrium(x, m, which);
      bool entered_at_end = d_end < ball;
      if (!inside[e] && stop.stop_at_equilibrium) {
        double hit_s = sb;
        RegState hit_x = x;
        bool hit = entered_at_end;
        if (d_end < 20 * ball) {
          for (int j = 1; j < kSamplesPerStep && !hit; ++j) {
            const double t = sa + (sb - sa) * j / kSamplesPerStep;
            RegState xt = RegState::from_array(st.dense(t));
            if (on_collision_manifold) xt.r = 0.0;
            if (distance_to_equilibrium(xt, m, which) < ball) {
              hit = true;
              hit_s = t;
              hit_x = xt;
            }
          }
        }
        if (hit) {
          orbit.which = which;
          finish(Termination::near_equilibrium, hit_s, hit_x);
          return orbit;
        }
      }
      inside[e] = entered_at_end;
    }

    // off the collision manifold an orbit with tiny r shadows an escaping one
    // for a very long time; it is reported as escaped as well
    if ((on_collision_manifold || x.r <= opt.escape_r) && stop.detect_escape) {
      if (dir * x.v > v_escape) {
        const Arm arm = x.theta > thc ? Arm::right : Arm::left;
        escape_run = (escape_run > 0 && arm == escape_arm) ? escape_run + 1 : 1;
        escape_arm = arm;
        if (escape_run >= kEscapeSteps) {
          orbit.arm = arm;
          finish(Termination::escaped, sb, x);
          return orbit;
        }
      } else {
        escape_run = 0;
      }
    }

    if (sb == s1) {
      finish(Termination::time_exhausted, sb, x);
      return orbit;
    }
  }
}

namespace {

MapOutcome map_forward(const RegState& start, double h, const PotentialModel& m,
                       const IntegOptions& opt, double ball) {
  StopRules stop;
  stop.stop_after_crossings = 1;
  stop.stop_at_equilibrium = true;
  stop.ball = ball;
  stop.detect_escape = true;
  stop.record_samples = false;
  const Orbit o = integrate(start, h, m, 0.0, kMapHorizon, opt, stop);
  MapOutcome out;
  out.status = o.termination;
  out.final_state = o.final_state;
  out.elapsed = o.final_s;
  out.arm = o.arm;
  out.which = o.which;
  if (o.termination == Termination::sigma_hit) out.crossing = o.crossings.back();
  return out;
}

MapOutcome mirror(MapOutcome o) {
  o.final_state = apply_symmetry(o.final_state);
  o.crossing.v = -o.crossing.v;
  o.crossing.s = -o.crossing.s;
  o.elapsed = -o.elapsed;
  o.which = o.which == Which::eplus ? Which::eminus : Which::eplus;
  return o;
}

}  // namespace

MapOutcome first_crossing(const RegState& x0, double h, const PotentialModel& m, Direction dir,
                          const IntegOptions& opt, double ball) {
  if (dir == Direction::forward) return map_forward(x0, h, m, opt, ball);
  return mirror(map_forward(apply_symmetry(x0), h, m, opt, ball));
}

MapOutcome poincare_outcome(const SigmaCrossing& x, double h, const PotentialModel& m,
                            Direction dir, const IntegOptions& opt, double ball) {
  MapOutcome o = first_crossing(x.state(m), h, m, dir, opt, ball);
  o.crossing.index = x.index + (dir == Direction::forward ? 1 : -1);
  return o;
}

SigmaCrossing poincare(const SigmaCrossing& x, double h, const PotentialModel& m, Direction dir,
                       const IntegOptions& opt) {
  const MapOutcome o = poincare_outcome(x, h, m, dir, opt);
  switch (o.status) {
    case Termination::sigma_hit: return o.crossing;
    case Termination::escaped:
      throw Error(ErrorCode::escaped, std::string("poincare: orbit escaped through the ") +
                                          to_string(o.arm) + " arm");
    case Termination::near_equilibrium:
      throw Error(ErrorCode::near_equilibrium,
                  std::string("poincare: orbit entered the ball of ") + to_string(o.which));
    default:
      throw Error(ErrorCode::max_steps, "poincare: no crossing within the time horizon");
  }
}

std::optional<Arm> classify_escape(const Orbit& orbit) {
  if (orbit.termination == Termination::escaped) return orbit.arm;
  return std::nullopt;
}

}  // namespace ecotrace
