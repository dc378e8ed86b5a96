#include "ecotrace/dynamics.hpp"

#include <cmath>

#include "ecotrace/error.hpp"

namespace ecotrace {

Vec4 field_regularized(const Vec4& x, double h, const PotentialModel& m) noexcept {
  const double r = x[0], v = x[1], w = x[3];
  const Companions c = m.companions(x[2]);
  const double q = 2 * h * r;
  Vec4 d;
  d[0] = r == 0.0 ? 0.0 : r * v * c.F;
  d[1] = c.F * (q - 0.5 * v * v) + c.sqrtW;
  d[2] = w;
  d[3] = -0.5 * c.F * v * w + (c.dW / c.W) * (c.f - 0.5 * w * w) +
         c.df * (1 + (c.f / c.W) * (q - v * v));
  return d;
}

RegState field_regularized(const RegState& x, double h, const PotentialModel& m) noexcept {
  return RegState::from_array(field_regularized(x.to_array(), h, m));
}

Mat4 jacobian_regularized(const RegState& x, double h, const PotentialModel& m) noexcept {
  const double r = x.r, v = x.v, w = x.w;
  const Companions c = m.companions(x.theta);
  const CompanionCurvature k = m.curvature(x.theta);
  const double q = 2 * h * r - v * v;
  const double WpW = c.dW / c.W;
  Mat4 J{};
  J[0] = {v * c.F, r * c.F, r * v * c.dF, 0.0};
  J[1] = {2 * h * c.F, -c.F * v,
          c.dF * (2 * h * r - 0.5 * v * v) + c.dW / (2 * c.sqrtW), 0.0};
  J[2] = {0.0, 0.0, 0.0, 1.0};
  const double fW = c.f / c.W;
  const double dfW = c.df / c.W - c.f * c.dW / (c.W * c.W);
  J[3][0] = 2 * h * c.df * fW;
  J[3][1] = -0.5 * c.F * w - 2 * v * c.df * fW;
  J[3][2] = -0.5 * c.dF * v * w + (k.d2W / c.W - WpW * WpW) * (c.f - 0.5 * w * w) +
            WpW * c.df + k.d2f * (1 + fW * q) + c.df * dfW * q;
  J[3][3] = -0.5 * c.F * v - WpW * w;
  return J;
}

McGeheeState field_mcgehee(const McGeheeState& x, double h, const PotentialModel& m) {
  (void)h;
  const double V = m.V(x.theta);
  const double dV = m.dV(x.theta);
  McGeheeState d;
  d.r = x.r * x.v;
  d.v = 0.5 * x.v * x.v + x.u * x.u - V;
  d.theta = x.u;
  d.u = -0.5 * x.v * x.u + dV;
  return d;
}

double energy_residual(const RegState& x, double h, const PotentialModel& m) noexcept {
  const Companions c = m.companions(x.theta);
  const double f2 = c.f * c.f;
  return c.W * x.w * x.w + f2 * x.v * x.v - 2 * f2 * x.r * h - 2 * c.W * c.f;
}

double energy_residual_normalized(const RegState& x, double h,
                                  const PotentialModel& m) noexcept {
  const Companions c = m.companions(x.theta);
  const double f2 = c.f * c.f;
  const double res = c.W * x.w * x.w + f2 * x.v * x.v - 2 * f2 * x.r * h - 2 * c.W * c.f;
  return res / std::max(1.0, std::abs(2 * c.W * c.f));
}

double energy_residual_mcgehee(const McGeheeState& x, double h, const PotentialModel& m) {
  return 0.5 * x.v * x.v + 0.5 * x.u * x.u - m.V(x.theta) - h * x.r;
}

RegState apply_symmetry(const RegState& x) noexcept { return {x.r, -x.v, x.theta, -x.w}; }

RegState scale_energy(const RegState& x, double lambda) {
  if (!(lambda > 0.0))
    throw Error(ErrorCode::invalid_argument, "scale_energy: lambda must be positive");
  return {x.r / lambda, x.v, x.theta, x.w};
}

std::array<double, 2> to_configuration(const RegState& x, const PotentialModel& m) noexcept {
  const MassMatrix& A = m.mass_matrix();
  return {x.r * std::cos(x.theta) / std::sqrt(A.a1), x.r * std::sin(x.theta) / std::sqrt(A.a2)};
}

double zero_velocity_curve(const PotentialModel& m, double h, double theta) {
  if (!(h < 0.0)) throw Error(ErrorCode::domain, "zero_velocity_curve: h must be negative");
  return m.V(theta) / (-h);
}

RegState from_mcgehee(const McGeheeState& x, const PotentialModel& m) {
  if (!(x.theta > m.theta_a() && x.theta < m.theta_b()))
    throw Error(ErrorCode::domain, "from_mcgehee: theta on the boundary");
  return {x.r, x.v, x.theta, m.F(x.theta) * x.u};
}

McGeheeState to_mcgehee(const RegState& x, const PotentialModel& m) {
  if (!(x.theta > m.theta_a() && x.theta < m.theta_b()))
    throw Error(ErrorCode::domain, "to_mcgehee: theta on the boundary");
  return {x.r, x.v, x.theta, x.w / m.F(x.theta)};
}

bool solve_shell_v(RegState& x, double h, const PotentialModel& m, double sign) noexcept {
  const Companions c = m.companions(x.theta);
  const double f2 = c.f * c.f;
  if (f2 == 0.0) return false;
  // f^2 v^2 = 2 W f + 2 f^2 r h - W w^2
  const double rhs = (2 * c.W * c.f + 2 * f2 * x.r * h - c.W * x.w * x.w) / f2;
  if (!(rhs >= 0.0)) return false;
  x.v = (sign < 0 ? -1.0 : 1.0) * std::sqrt(rhs);
  return true;
}

}  // namespace ecotrace
