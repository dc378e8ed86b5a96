#pragma once

// Propagation of the regularized system with Sigma-crossing events, escape
// and near-equilibrium detection, and the Poincare maps P and P^{-1}.

#include <optional>
#include <string>
#include <vector>

#include "ecotrace/dynamics.hpp"
#include "ecotrace/potentials.hpp"

namespace ecotrace {

enum class Side { a, b };
enum class Arm { left, right };
enum class Which { eplus, eminus };
enum class Direction { forward, backward };

char side_symbol(Side s) noexcept;
const char* to_string(Arm a) noexcept;
const char* to_string(Which w) noexcept;

struct IntegOptions {
  double rtol = 1e-12;
  double atol = 1e-12;
  long max_steps = 400000;
  double v_escape = 0.0;    // 0: 1.5 v_c
  double eq_ball = 1e-3;    // near-equilibrium detection radius
  double theta_tol = 1e-6;  // side classification tolerance
  double h_max = 2.0;       // step size cap
  double escape_r = 1e-9;   // escape detection also applies below this r
  // re-solve v on the energy shell after each step; keeps orbits that linger
  // near E- (transversally unstable there) on the shell
  bool project_shell = false;
};

/// Intersection with Sigma = {w = 0, theta = theta_a or theta_b}.
struct SigmaCrossing {
  Side side = Side::b;
  double r = 0;
  double v = 0;
  double s = 0;
  int index = 0;

  /// Phase-space point (r, v, theta_side, 0).
  RegState state(const PotentialModel& m) const noexcept;
};

/// Interior zero of w (theta extremum away from the boundary).
struct TurningPoint {
  double s = 0;
  RegState state;
};

enum class Termination { time_exhausted, sigma_hit, escaped, near_equilibrium };
const char* to_string(Termination t) noexcept;

struct Orbit {
  std::vector<double> s;
  std::vector<RegState> states;
  std::vector<SigmaCrossing> crossings;
  std::vector<TurningPoint> turning_points;
  double max_energy_drift = 0;
  Termination termination = Termination::time_exhausted;
  Arm arm = Arm::right;       // valid when escaped
  Which which = Which::eplus;  // valid when near_equilibrium
  RegState final_state;
  double final_s = 0;
  long steps = 0;
};

/// What ends an integration besides the end of the time span.
struct StopRules {
  int stop_after_crossings = 0;  // 0: never stop at Sigma
  bool stop_at_equilibrium = true;
  double ball = 0.0;             // 0: IntegOptions::eq_ball
  bool detect_escape = true;     // only active on r == 0 or r <= escape_r
  bool record_samples = true;
};

/// Integrates from x0 at s0 towards s1 (s1 < s0 integrates backwards).
/// Throws Error{step_underflow | max_steps | ambiguous_event}.
Orbit integrate(const RegState& x0, double h, const PotentialModel& m, double s0, double s1,
                const IntegOptions& opt = {}, const StopRules& stop = {});

/// Outcome of one application of P or P^{-1}.
struct MapOutcome {
  Termination status = Termination::time_exhausted;
  SigmaCrossing crossing;  // valid when status == sigma_hit
  Arm arm = Arm::right;
  Which which = Which::eplus;
  RegState final_state;
  double elapsed = 0;
};

inline constexpr double kMapHorizon = 1e4;

/// First Sigma crossing after (or before) the Sigma point x. Never throws for
/// escape or equilibrium approach; those are reported in the status.
MapOutcome poincare_outcome(const SigmaCrossing& x, double h, const PotentialModel& m,
                            Direction dir, const IntegOptions& opt = {}, double ball = 0.0);

/// Same as poincare_outcome but throws Error{escaped | near_equilibrium | max_steps}
/// when no crossing is reached.
SigmaCrossing poincare(const SigmaCrossing& x, double h, const PotentialModel& m,
                       Direction dir, const IntegOptions& opt = {});

/// First crossing of a general (non-Sigma) start state.
MapOutcome first_crossing(const RegState& x0, double h, const PotentialModel& m,
                          Direction dir, const IntegOptions& opt = {}, double ball = 0.0);

/// Escape arm of an orbit on the collision manifold, if it escaped.
std::optional<Arm> classify_escape(const Orbit& orbit);

/// Distance in (r, v, theta, w) to E+ or E-.
double distance_to_equilibrium(const RegState& x, const PotentialModel& m, Which which) noexcept;

/// sqrt(2 V(theta_c)).
double critical_velocity(const PotentialModel& m);

}  // namespace ecotrace
