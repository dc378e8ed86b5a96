#pragma once

// Regularized (r, v, theta, w) and McGehee (r, v, theta, u) vector fields,
// the energy relation, the reversing symmetry and coordinate conversions.

#include <array>

#include "ecotrace/potentials.hpp"

namespace ecotrace {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

/// Point of the regularized phase space. The energy h is carried separately.
struct RegState {
  double r = 0, v = 0, theta = 0, w = 0;

  Vec4 to_array() const noexcept { return {r, v, theta, w}; }
  static RegState from_array(const Vec4& a) noexcept { return {a[0], a[1], a[2], a[3]}; }
  bool operator==(const RegState&) const = default;
};

struct McGeheeState {
  double r = 0, v = 0, theta = 0, u = 0;

  Vec4 to_array() const noexcept { return {r, v, theta, u}; }
  static McGeheeState from_array(const Vec4& a) noexcept { return {a[0], a[1], a[2], a[3]}; }
};

inline constexpr double kDefaultEnergy = -1.0;

/// d/ds of the regularized system. Finite on the closed theta interval.
/// dr/ds vanishes identically when r == 0.
RegState field_regularized(const RegState& x, double h, const PotentialModel& m) noexcept;
Vec4 field_regularized(const Vec4& x, double h, const PotentialModel& m) noexcept;

/// Analytic Jacobian of field_regularized.
Mat4 jacobian_regularized(const RegState& x, double h, const PotentialModel& m) noexcept;

/// d/dtau of the McGehee system. Error{domain} at the boundary angles.
McGeheeState field_mcgehee(const McGeheeState& x, double h, const PotentialModel& m);

/// W w^2 + f^2 v^2 - 2 f^2 r h - 2 W f (zero on the energy shell).
double energy_residual(const RegState& x, double h, const PotentialModel& m) noexcept;
/// energy_residual divided by max(1, |2 W f|).
double energy_residual_normalized(const RegState& x, double h,
                                  const PotentialModel& m) noexcept;
/// v^2/2 + u^2/2 - V - h r (zero on the energy shell).
double energy_residual_mcgehee(const McGeheeState& x, double h, const PotentialModel& m);

/// (r, v, theta, w) -> (r, -v, theta, -w).
RegState apply_symmetry(const RegState& x) noexcept;

/// (r, v, theta, w) -> (r / lambda, v, theta, w): the same solution at energy lambda h.
RegState scale_energy(const RegState& x, double lambda);

/// q = r A^{-1/2} (cos theta, sin theta).
std::array<double, 2> to_configuration(const RegState& x, const PotentialModel& m) noexcept;

/// r = V(theta) / (-h). Error{domain} at the boundaries or for h >= 0.
double zero_velocity_curve(const PotentialModel& m, double h, double theta);

/// w = F u. Requires theta strictly inside the interval.
RegState from_mcgehee(const McGeheeState& x, const PotentialModel& m);
McGeheeState to_mcgehee(const RegState& x, const PotentialModel& m);

/// Solves the energy relation for v >= 0 (sign chosen by `sign`) at given
/// r, theta, w. Returns false when the shell has no point there.
bool solve_shell_v(RegState& x, double h, const PotentialModel& m, double sign) noexcept;

}  // namespace ecotrace
