#pragma once

// Equilibria E+ and E- on the collision manifold, their linearization and
// the homothetic ejection-collision orbit.

#include <complex>
#include <utility>
#include <vector>

#include "ecotrace/dynamics.hpp"
#include "ecotrace/integrator.hpp"

namespace ecotrace {

struct Eigenpair {
  std::complex<double> value;
  std::array<std::complex<double>, 4> vector;
  bool shell_tangent = false;
};

struct EquilibriumInfo {
  Which which = Which::eplus;
  RegState state;
  double v_c = 0;
  double h = kDefaultEnergy;
  Mat4 jacobian{};
  std::vector<Eigenpair> eigenpairs;
  // counts restricted to the tangent space of the energy shell
  int shell_unstable = 0;
  int shell_stable = 0;
  // real eigen-directions, unit length
  double lambda_radial = 0;     // v F(theta_c): r-direction
  double lambda_transverse = 0; // -v F(theta_c): leaves the energy shell
  double lambda_unstable = 0;   // positive root of the (theta, w) block
  double lambda_stable = 0;     // negative root of the (theta, w) block
  Vec4 e_radial{};              // along the homothetic line, r-component > 0
  Vec4 e_unstable{};            // inside the collision manifold, w-component > 0
  Vec4 e_stable{};              // inside the collision manifold, theta-component > 0
};

/// E+ (v = +v_c) and E- (v = -v_c), both linearized.
std::pair<EquilibriumInfo, EquilibriumInfo> find_equilibria(const PotentialModel& m,
                                                            double h = kDefaultEnergy);

/// Fills jacobian, eigenpairs and the shell split. Throws
/// Error{defective_spectrum} when the eigenvectors are (nearly) dependent.
void linearize(EquilibriumInfo& eq, const PotentialModel& m);

/// Central-difference Jacobian (step 1e-6), used to cross-check the analytic one.
Mat4 jacobian_fd(const RegState& x, double h, const PotentialModel& m, double step = 1e-6);

/// Gradient of the energy residual.
Vec4 energy_gradient(const RegState& x, double h, const PotentialModel& m) noexcept;

/// Homothetic orbit through (r0, v0 >= 0, theta_c, 0), integrated backward to
/// the E+ ball and forward to the E- ball. Error{domain} beyond the zero
/// velocity curve.
Orbit homothetic(double h, const PotentialModel& m, double r0, const IntegOptions& opt = {});

}  // namespace ecotrace
