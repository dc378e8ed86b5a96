#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "ecotrace/equilibria.hpp"
#include "oracles.hpp"

using namespace ecotrace;
using oracle::pi;

namespace {

// eigenvalues of a finite-difference Jacobian whose eigenvectors are tangent to the shell
void shell_split(const RegState& e, const PotentialModel& m, int& unstable, int& stable) {
  Eigen::Matrix4d J;
  const double d = 1e-6;
  for (int j = 0; j < 4; ++j) {
    Vec4 p = e.to_array(), q = e.to_array();
    p[j] += d;
    q[j] -= d;
    const Vec4 fp = field_regularized(p, -1.0, m), fq = field_regularized(q, -1.0, m);
    for (int i = 0; i < 4; ++i) J(i, j) = (fp[i] - fq[i]) / (2 * d);
  }
  Eigen::Vector4d g;
  for (int j = 0; j < 4; ++j) {
    Vec4 p = e.to_array(), q = e.to_array();
    p[j] += d;
    q[j] -= d;
    g(j) = (energy_residual(RegState::from_array(p), -1.0, m) - energy_residual(RegState::from_array(q), -1.0, m)) /
           (2 * d);
  }
  Eigen::EigenSolver<Eigen::Matrix4d> es(J);
  unstable = stable = 0;
  for (int k = 0; k < 4; ++k) {
    const auto vec = es.eigenvectors().col(k);
    const double along = std::abs(g.cast<std::complex<double>>().dot(vec)) / (g.norm() * vec.norm());
    if (along > 1e-4) continue;  // leaves the shell
    const double re = es.eigenvalues()(k).real();
    if (re > 1e-8) ++unstable;
    if (re < -1e-8) ++stable;
  }
}

}  // namespace

TEST_SUITE("equilibria") {
  TEST_CASE("rec4bp critical velocity") {
    const auto m = rec4bp();
    const auto [ep, em] = find_equilibria(m, -1.0);
    const double vc = std::sqrt(2 * (2 + 4 * std::sqrt(2.0)));
    CHECK(ep.v_c == doctest::Approx(vc).epsilon(1e-14));
    CHECK(ep.state.v == doctest::Approx(vc).epsilon(1e-14));
    CHECK(em.state.v == doctest::Approx(-vc).epsilon(1e-14));
    CHECK(ep.state.theta == doctest::Approx(pi / 4).epsilon(1e-14));
    CHECK(apply_symmetry(ep.state) == em.state);
    CHECK(find_equilibria(m, -3.0).first.v_c == ep.v_c);
  }

  TEST_CASE("field vanishes at both equilibria") {
    for (const auto& m : {rec4bp(), rh4bp(0.5), sc4bp(2.0)}) {
      const auto [ep, em] = find_equilibria(m, -1.0);
      for (const auto* e : {&ep, &em}) {
        const RegState d = field_regularized(e->state, -1.0, m);
        CHECK(std::abs(d.r) + std::abs(d.v) + std::abs(d.theta) + std::abs(d.w) < 1e-12);
      }
    }
  }

  TEST_CASE("shell split against an independent eigen decomposition") {
    for (const auto& m : {rec4bp(), rh4bp(0.5), rh4bp(1.0), rh4bp(2.0), sc4bp(0.5), sc4bp(1.0), sc4bp(2.0)}) {
      CAPTURE(m.name());
      const auto [ep, em] = find_equilibria(m, -1.0);
      CHECK(em.shell_unstable == 1);
      CHECK(em.shell_stable == 2);
      CHECK(ep.shell_unstable == 2);
      CHECK(ep.shell_stable == 1);
      int u = 0, s = 0;
      shell_split(em.state, m, u, s);
      CHECK(u == 1);
      CHECK(s == 2);
      shell_split(ep.state, m, u, s);
      CHECK(u == 2);
      CHECK(s == 1);
    }
  }

  TEST_CASE("eigen-directions") {
    const auto m = rec4bp();
    const auto [ep, em] = find_equilibria(m, -1.0);
    CHECK(ep.lambda_radial == doctest::Approx(ep.v_c * m.F(m.theta_c())).epsilon(1e-12));
    CHECK(ep.lambda_radial > 0);
    CHECK(ep.lambda_radial == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(ep.lambda_unstable == doctest::Approx(0.832).epsilon(1e-3));
    CHECK(ep.lambda_stable == doctest::Approx(-1.332).epsilon(1e-3));
    // symmetric spectra
    CHECK(em.lambda_unstable == doctest::Approx(-ep.lambda_stable).epsilon(1e-10));
    CHECK(em.lambda_stable == doctest::Approx(-ep.lambda_unstable).epsilon(1e-10));
    CHECK(em.lambda_radial == doctest::Approx(-ep.lambda_radial).epsilon(1e-10));
    // the unstable direction of E- lies in the collision manifold
    CHECK(std::abs(em.e_unstable[0]) < 1e-12);
    CHECK(em.e_unstable[3] > 0);
    // eigenvector residual J e - lambda e
    for (const auto& [vec, lam] : {std::pair{ep.e_unstable, ep.lambda_unstable}, std::pair{ep.e_stable, ep.lambda_stable},
                                   std::pair{ep.e_radial, ep.lambda_radial}}) {
      for (int i = 0; i < 4; ++i) {
        double row = 0;
        for (int j = 0; j < 4; ++j) row += ep.jacobian[i][j] * vec[j];
        CHECK(std::abs(row - lam * vec[i]) < 1e-9);
      }
    }
  }

  TEST_CASE("analytic Jacobian against finite differences") {
    for (const auto& m : {rec4bp(), sc4bp(1.1), rh4bp(2.0)}) {
      const auto ep = find_equilibria(m, -1.0).first;
      const Mat4 fd = jacobian_fd(ep.state, -1.0, m);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(std::abs(ep.jacobian[i][j] - fd[i][j]) < 1e-6);
    }
  }

  TEST_CASE("energy gradient") {
    const auto m = rec4bp();
    const RegState x{0.4, 1.0, 0.7, 0.3};
    const Vec4 g = energy_gradient(x, -1.0, m);
    const double d = 1e-6;
    for (int j = 0; j < 4; ++j) {
      Vec4 p = x.to_array(), q = x.to_array();
      p[j] += d;
      q[j] -= d;
      const double fd = (energy_residual(RegState::from_array(p), -1.0, m) -
                         energy_residual(RegState::from_array(q), -1.0, m)) / (2 * d);
      CHECK(g[j] == doctest::Approx(fd).epsilon(1e-7).scale(1.0));
    }
  }

  TEST_CASE("homothetic orbit") {
    const auto m = rec4bp();
    const double rmax = 2 + 4 * std::sqrt(2.0);
    CHECK(zero_velocity_curve(m, -1.0, m.theta_c()) == doctest::Approx(rmax));
    const Orbit o = homothetic(-1.0, m, 0.5 * rmax);
    REQUIRE(o.states.size() > 10);
    CHECK(distance_to_equilibrium(o.states.front(), m, Which::eplus) <= 1e-3 + 1e-12);
    CHECK(distance_to_equilibrium(o.states.back(), m, Which::eminus) <= 1e-3 + 1e-12);
    double top = 0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < o.states.size(); ++i) {
      CHECK(std::abs(o.states[i].theta - m.theta_c()) < 1e-10);
      if (o.states[i].r > top) {
        top = o.states[i].r;
        k = i;
      }
    }
    CHECK(top <= rmax * (1 + 1e-12));
    CHECK(top > 0.999 * rmax);
    // symmetric about the apex: r(s_k + d) = r(s_k - d), v changes sign
    const double sk = o.s[k];
    std::size_t j = o.states.size() - 1;
    while (j > k && o.s[j] - sk > sk - o.s.front()) --j;
    const double d = o.s[j] - sk;
    std::size_t i = 0;
    while (i + 1 < k && sk - o.s[i + 1] > d) ++i;
    // linear interpolation on the other side
    const double t = (sk - d - o.s[i]) / (o.s[i + 1] - o.s[i]);
    const double r_mirror = o.states[i].r + t * (o.states[i + 1].r - o.states[i].r);
    CHECK(r_mirror == doctest::Approx(o.states[j].r).epsilon(1e-3));
    CHECK_THROWS(homothetic(-1.0, m, 2 * rmax));
  }
}
