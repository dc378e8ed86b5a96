#pragma once

// Closed-form reference values written out by hand, independent of the
// library's PotentialModel machinery. Used by the unit and acceptance tests.

#include <array>
#include <cmath>
#include <random>

#include "ecotrace/dynamics.hpp"
#include "ecotrace/potentials.hpp"

namespace oracle {

inline constexpr double pi = 3.14159265358979323846;

// rectangular four-body problem on (0, pi/2)
inline double rec_V(double t) { return 2 + 2 / std::cos(t) + 2 / std::sin(t); }
inline double rec_dV(double t) {
  return 2 * std::sin(t) / (std::cos(t) * std::cos(t)) - 2 * std::cos(t) / (std::sin(t) * std::sin(t));
}
inline double rec_f(double t) { return std::sin(t) * std::cos(t); }
inline double rec_W(double t) { return 2 * std::sin(t) * std::cos(t) + 2 * std::sin(t) + 2 * std::cos(t); }
inline double rec_F(double t) { return rec_f(t) / std::sqrt(rec_W(t)); }

// W w^2 + f^2 v^2 - 2 f^2 r h - 2 W f, normalized like the library does
inline double rec_residual(const ecotrace::RegState& x, double h) {
  const double f = rec_f(x.theta), W = rec_W(x.theta);
  const double res = W * x.w * x.w + f * f * x.v * x.v - 2 * f * f * x.r * h - 2 * W * f;
  return res / std::max(1.0, std::abs(2 * W * f));
}

// McGehee field of rec4bp in (r, v, theta, u), d/dtau
inline std::array<double, 4> rec_mcgehee(const std::array<double, 4>& x) {
  const double r = x[0], v = x[1], t = x[2], u = x[3];
  return {r * v, v * v / 2 + u * u - rec_V(t), u, -v * u / 2 + rec_dV(t)};
}

// Generic energy residual from the model's public f and W, for models without a closed form.
inline double residual(const ecotrace::RegState& x, double h, const ecotrace::PotentialModel& m) {
  const double f = m.f(x.theta), W = m.W(x.theta);
  const double res = W * x.w * x.w + f * f * x.v * x.v - 2 * f * f * x.r * h - 2 * W * f;
  return res / std::max(1.0, std::abs(2 * W * f));
}

// Point of the collision manifold r = 0 at angle theta: the shell there is the
// ellipse W w^2 + f^2 v^2 = 2 W f, parametrized by psi.
inline ecotrace::RegState collision_point(const ecotrace::PotentialModel& m, double theta, double psi) {
  const double f = m.f(theta), W = m.W(theta);
  return {0.0, std::sqrt(2 * W / f) * std::sin(psi), theta, std::sqrt(2 * f) * std::cos(psi)};
}

// Random shell state with r below the zero velocity curve, v of the given sign.
// Returns false when the sampled (r, theta, w) has no shell point.
inline bool shell_state(const ecotrace::PotentialModel& m, double h, std::mt19937_64& rng,
                        ecotrace::RegState& out, double margin = 0.15) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const double ta = m.theta_a() + margin, tb = m.theta_b() - margin;
  const double theta = ta + (tb - ta) * U(rng);
  const double f = m.f(theta), W = m.W(theta);
  const double rmax = m.V(theta) / (-h);
  const double r = rmax * (0.05 + 0.6 * U(rng));
  // room left for w once v takes part of the energy
  const double wmax = std::sqrt((2 * f * f * r * h + 2 * W * f) / W);
  const double w = wmax * (2 * U(rng) - 1) * 0.8;
  const double rhs = 2 * f * f * r * h + 2 * W * f - W * w * w;
  if (!(rhs > 0)) return false;
  const double v = std::sqrt(rhs) / f * (U(rng) < 0.5 ? -1 : 1);
  out = {r, v, theta, w};
  return true;
}

}  // namespace oracle
