#include "ecotrace/equilibria.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "ecotrace/error.hpp"

namespace ecotrace {

namespace {

constexpr double kTangentTol = 1e-6;

Vec4 unit(Vec4 x) {
  double n = 0;
  for (double c : x) n += c * c;
  n = std::sqrt(n);
  for (double& c : x) c /= n;
  return x;
}

}  // namespace

Vec4 energy_gradient(const RegState& x, double h, const PotentialModel& m) noexcept {
  const Companions c = m.companions(x.theta);
  const double f = c.f, f2 = f * f;
  Vec4 g;
  g[0] = -2 * f2 * h;
  g[1] = 2 * f2 * x.v;
  g[2] = c.dW * x.w * x.w + 2 * f * c.df * (x.v * x.v - 2 * x.r * h) - 2 * c.dW * f -
         2 * c.W * c.df;
  g[3] = 2 * c.W * x.w;
  return g;
}

Mat4 jacobian_fd(const RegState& x, double h, const PotentialModel& m, double step) {
  Mat4 J{};
  for (int j = 0; j < 4; ++j) {
    Vec4 xp = x.to_array(), xm = x.to_array();
    xp[j] += step;
    xm[j] -= step;
    const Vec4 fp = field_regularized(xp, h, m), fm = field_regularized(xm, h, m);
    for (int i = 0; i < 4; ++i) J[i][j] = (fp[i] - fm[i]) / (2 * step);
  }
  return J;
}

void linearize(EquilibriumInfo& eq, const PotentialModel& m) {
  eq.jacobian = jacobian_regularized(eq.state, eq.h, m);
  Eigen::Matrix4d J;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) J(i, j) = eq.jacobian[i][j];
  Eigen::EigenSolver<Eigen::Matrix4d> es(J);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::defective_spectrum, "linearize: eigen decomposition failed");
  const Eigen::Vector4cd vals = es.eigenvalues();
  const Eigen::Matrix4cd vecs = es.eigenvectors();
  const double cond = vecs.jacobiSvd().singularValues().minCoeff() /
                      vecs.jacobiSvd().singularValues().maxCoeff();
  if (!(cond > 1e-8))
    throw Error(ErrorCode::defective_spectrum, "linearize: nearly defective Jacobian");

  const Vec4 grad = energy_gradient(eq.state, eq.h, m);
  const double gnorm = std::sqrt(grad[0] * grad[0] + grad[1] * grad[1] + grad[2] * grad[2] +
                                 grad[3] * grad[3]);
  eq.eigenpairs.clear();
  eq.shell_unstable = eq.shell_stable = 0;
  for (int k = 0; k < 4; ++k) {
    Eigenpair p;
    p.value = vals(k);
    Eigen::Vector4cd v = vecs.col(k);
    v /= v.norm();
    const double res = (J.cast<std::complex<double>>() * v - vals(k) * v).norm();
    if (!(res < 1e-8))
      throw Error(ErrorCode::defective_spectrum, "linearize: eigenpair residual too large");
    std::complex<double> dot = 0;
    for (int i = 0; i < 4; ++i) {
      p.vector[i] = v(i);
      dot += grad[i] * v(i);
    }
    p.shell_tangent = std::abs(dot) <= kTangentTol * std::max(gnorm, 1e-300);
    if (p.shell_tangent) {
      if (p.value.real() > 0) ++eq.shell_unstable;
      if (p.value.real() < 0) ++eq.shell_stable;
    }
    eq.eigenpairs.push_back(p);
  }
  std::sort(eq.eigenpairs.begin(), eq.eigenpairs.end(), [](const Eigenpair& a, const Eigenpair& b) {
    return a.value.real() > b.value.real();
  });

  // closed-form directions from the block structure of the Jacobian at r = 0, w = 0
  const Companions c = m.companions(eq.state.theta);
  const double v = eq.state.v;
  eq.lambda_radial = v * c.F;
  eq.lambda_transverse = -v * c.F;
  const double a = eq.jacobian[3][3];  // trace of the (theta, w) block
  const double b = eq.jacobian[3][2];
  const double disc = a * a + 4 * b;
  if (!(disc > 0))
    throw Error(ErrorCode::defective_spectrum, "linearize: (theta, w) block is not a saddle");
  const double sq = std::sqrt(disc);
  eq.lambda_unstable = 0.5 * (a + sq);
  eq.lambda_stable = 0.5 * (a - sq);
  if (!(eq.lambda_unstable > 0 && eq.lambda_stable < 0))
    throw Error(ErrorCode::defective_spectrum, "linearize: (theta, w) block is not a saddle");
  eq.e_radial = unit({1.0, eq.h / v, 0.0, 0.0});
  eq.e_unstable = unit({0.0, 0.0, 1.0, eq.lambda_unstable});
  eq.e_stable = unit({0.0, 0.0, 1.0, eq.lambda_stable});
}

std::pair<EquilibriumInfo, EquilibriumInfo> find_equilibria(const PotentialModel& m, double h) {
  if (!(h < 0)) throw Error(ErrorCode::invalid_argument, "find_equilibria: h must be negative");
  const double thc = m.theta_c();
  const double vc = std::sqrt(2 * m.V(thc));
  EquilibriumInfo p, q;
  p.which = Which::eplus;
  p.state = {0.0, vc, thc, 0.0};
  q.which = Which::eminus;
  q.state = {0.0, -vc, thc, 0.0};
  p.v_c = q.v_c = vc;
  p.h = q.h = h;
  linearize(p, m);
  linearize(q, m);
  return {p, q};
}

Orbit homothetic(double h, const PotentialModel& m, double r0, const IntegOptions& opt) {
  const double thc = m.theta_c();
  const double v2 = 2 * m.V(thc) + 2 * h * r0;
  if (!(r0 >= 0) || !(v2 >= 0))
    throw Error(ErrorCode::domain, "homothetic: r0 beyond the zero velocity curve");
  const RegState x0{r0, std::sqrt(v2), thc, 0.0};
  StopRules stop;
  stop.detect_escape = false;
  const Orbit fwd = integrate(x0, h, m, 0.0, kMapHorizon, opt, stop);
  const Orbit bwd = integrate(x0, h, m, 0.0, -kMapHorizon, opt, stop);
  Orbit out;
  for (std::size_t i = bwd.s.size(); i-- > 1;) {
    out.s.push_back(bwd.s[i]);
    out.states.push_back(bwd.states[i]);
  }
  out.s.insert(out.s.end(), fwd.s.begin(), fwd.s.end());
  out.states.insert(out.states.end(), fwd.states.begin(), fwd.states.end());
  out.crossings = bwd.crossings;
  out.crossings.insert(out.crossings.end(), fwd.crossings.begin(), fwd.crossings.end());
  out.max_energy_drift = std::max(fwd.max_energy_drift, bwd.max_energy_drift);
  out.termination = fwd.termination;
  out.which = fwd.which;
  out.final_state = fwd.final_state;
  out.final_s = fwd.final_s;
  out.steps = fwd.steps + bwd.steps;
  return out;
}

}  // namespace ecotrace
