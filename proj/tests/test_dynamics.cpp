#include <cmath>
#include <random>

#include "doctest.h"
#include "ecotrace/dynamics.hpp"
#include "ecotrace/error.hpp"
#include "ecotrace/integrator.hpp"
#include "oracles.hpp"

using namespace ecotrace;
using oracle::pi;

TEST_SUITE("dynamics") {
  TEST_CASE("E+ is an equilibrium") {
    const auto m = rec4bp();
    const double vc = std::sqrt(2 * (2 + 4 * std::sqrt(2.0)));
    const RegState e{0, vc, pi / 4, 0};
    const RegState d = field_regularized(e, -1.0, m);
    CHECK(std::abs(d.r) < 1e-12);
    CHECK(std::abs(d.v) < 1e-12);
    CHECK(std::abs(d.theta) < 1e-12);
    CHECK(std::abs(d.w) < 1e-12);
    CHECK(std::abs(energy_residual(e, -1.0, m)) < 1e-12);
  }

  TEST_CASE("dw/ds on the collision lines") {
    const auto m = rec4bp();
    for (double v : {-2.0, 0.0, 3.0}) {
      CHECK(field_regularized(RegState{0, v, pi / 2, 0}, -1.0, m).w == doctest::Approx(-1.0).epsilon(1e-14));
      CHECK(field_regularized(RegState{0, v, 0.0, 0}, -1.0, m).w == doctest::Approx(1.0).epsilon(1e-14));
    }
    const auto s = sc4bp(2.0);
    const double expect = -std::sin(s.theta_b() - s.theta_a());
    CHECK(field_regularized(RegState{0, 1.0, s.theta_b(), 0}, -1.0, s).w == doctest::Approx(expect).epsilon(1e-13));
  }

  TEST_CASE("gradient-like on the collision manifold") {
    const auto m = rec4bp();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0, 1);
    for (int i = 0; i < 500; ++i) {
      const double t = 0.02 + 1.53 * U(rng);
      const RegState x = oracle::collision_point(m, t, 2 * pi * U(rng));
      const double dv = field_regularized(x, -1.0, m).v;
      // on r = 0: dv/ds = sqrt(W) w^2 / (2 f)
      const double expect = std::sqrt(oracle::rec_W(t)) * x.w * x.w / (2 * oracle::rec_f(t));
      CHECK(dv == doctest::Approx(expect).epsilon(1e-9).scale(1.0));
      CHECK(dv >= -1e-13);
    }
  }

  TEST_CASE("McGehee field through the chain rule") {
    const auto m = rec4bp();
    std::mt19937_64 rng(11);
    int checked = 0;
    while (checked < 50) {
      RegState x;
      if (!oracle::shell_state(m, -1.0, rng, x)) continue;
      ++checked;
      const McGeheeState y = to_mcgehee(x, m);
      const McGeheeState g = field_mcgehee(y, -1.0, m);
      const auto ref = oracle::rec_mcgehee(y.to_array());
      CHECK(g.r == doctest::Approx(ref[0]).epsilon(1e-12));
      CHECK(g.v == doctest::Approx(ref[1]).epsilon(1e-12));
      CHECK(g.u == doctest::Approx(ref[3]).epsilon(1e-12));
      // d/ds = F d/dtau, w = F u
      const double F = oracle::rec_F(x.theta);
      const double dF = (oracle::rec_F(x.theta + 1e-6) - oracle::rec_F(x.theta - 1e-6)) / 2e-6;
      const RegState d = field_regularized(x, -1.0, m);
      CHECK(d.r == doctest::Approx(F * g.r).epsilon(1e-12));
      CHECK(d.v == doctest::Approx(F * g.v).epsilon(1e-10).scale(1.0));
      CHECK(d.theta == doctest::Approx(F * g.theta).epsilon(1e-12));
      CHECK(d.w == doctest::Approx(dF * F * y.u * y.u + F * F * g.u).epsilon(1e-7).scale(1.0));
    }
  }

  TEST_CASE("McGehee identities") {
    const auto m = rec4bp();
    const double tc = pi / 4;
    const double r = 1.0, v = std::sqrt(2 * (m.V(tc) - r));  // on the shell at h = -1
    const McGeheeState g = field_mcgehee(McGeheeState{r, v, tc, 0.0}, -1.0, m);
    CHECK(g.theta == 0.0);
    CHECK(std::abs(g.u) < 1e-12);
    // with the energy relation dv/dtau = h r + u^2 / 2
    const double u = std::sqrt(2 * (m.V(0.6) - 0.7) - 1.1 * 1.1);
    const McGeheeState ys{0.7, 1.1, 0.6, u};
    CHECK(std::abs(energy_residual_mcgehee(ys, -1.0, m)) < 1e-12);
    CHECK(field_mcgehee(ys, -1.0, m).v == doctest::Approx(-0.7 + u * u / 2).epsilon(1e-12));
    CHECK_THROWS_AS(field_mcgehee(McGeheeState{1, 0, 0.0, 0}, -1.0, m), Error);
  }

  TEST_CASE("energy residual") {
    const auto m = rec4bp();
    for (double r : {0.0, 0.5, 3.0})
      for (double v : {-4.0, 0.0, 2.5}) CHECK(energy_residual(RegState{r, v, pi / 2, 0}, -1.0, m) == 0.0);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 20; ++i) {
      RegState x;
      if (!oracle::shell_state(m, -1.0, rng, x)) continue;
      CHECK(std::abs(oracle::rec_residual(x, -1.0)) < 1e-12);
      CHECK(std::abs(energy_residual_normalized(x, -1.0, m)) < 1e-12);
      x.v += 0.1;
      CHECK(energy_residual_normalized(x, -1.0, m) == doctest::Approx(oracle::rec_residual(x, -1.0)).epsilon(1e-10));
    }
  }

  TEST_CASE("reversing symmetry") {
    const RegState x{0.3, 1.2, 0.4, -0.7};
    CHECK(apply_symmetry(apply_symmetry(x)) == x);
    CHECK(apply_symmetry(x) == RegState{0.3, -1.2, 0.4, 0.7});
    const auto m = rec4bp();
    const double vc = critical_velocity(m);
    CHECK(apply_symmetry(RegState{0, vc, pi / 4, 0}) == RegState{0, -vc, pi / 4, 0});
    const RegState sig{0.5, 2.0, pi / 2, 0};
    const RegState s = apply_symmetry(sig);
    CHECK(s.theta == pi / 2);
    CHECK(s.w == 0.0);
    CHECK(s.v == -2.0);
  }

  TEST_CASE("energy scaling") {
    const auto m = rec4bp();
    const RegState x{0.8, 1.0, 0.9, 0.2};
    CHECK(scale_energy(x, 1.0) == x);
    const RegState c{0.0, 1.0, 0.9, 0.2};
    CHECK(scale_energy(c, 3.0) == c);
    std::mt19937_64 rng(5);
    RegState y;
    while (!oracle::shell_state(m, -1.0, rng, y)) {}
    const RegState z = scale_energy(y, 2.0);
    CHECK(std::abs(oracle::rec_residual(z, -2.0)) < 1e-12);
    CHECK(z.r * 2.0 == doctest::Approx(y.r * 1.0));
    CHECK_THROWS_AS(scale_energy(x, 0.0), Error);
  }

  TEST_CASE("configuration coordinates") {
    auto q = to_configuration(RegState{0, 1, 0.3, 0}, rec4bp());
    CHECK(q[0] == 0.0);
    CHECK(q[1] == 0.0);
    q = to_configuration(RegState{1, 0, 0.0, 0}, rec4bp());
    CHECK(q[0] == doctest::Approx(1.0));
    CHECK(q[1] == doctest::Approx(0.0));
    const auto m = rec4bp().with_mass({4.0, 1.0});
    q = to_configuration(RegState{1, 0, pi / 2, 0}, m);
    CHECK(std::abs(q[0]) < 1e-15);
    CHECK(q[1] == doctest::Approx(1.0));
    q = to_configuration(RegState{1, 0, 0.0, 0}, m);
    CHECK(q[0] == doctest::Approx(0.5));
  }

  TEST_CASE("zero velocity curve") {
    const auto m = rec4bp();
    CHECK(zero_velocity_curve(m, -1.0, pi / 4) == doctest::Approx(2 + 4 * std::sqrt(2.0)));
    CHECK(zero_velocity_curve(m, -2.0, 0.5) * 2.0 == doctest::Approx(zero_velocity_curve(m, -1.0, 0.5)));
    CHECK(zero_velocity_curve(m, -1.0, 1e-8) > 1e8);
    CHECK_THROWS_AS(zero_velocity_curve(m, 0.5, 0.5), Error);
    CHECK_THROWS_AS(zero_velocity_curve(m, -1.0, 0.0), Error);
  }

  TEST_CASE("coordinate conversions") {
    const auto m = sc4bp(1.5);
    const McGeheeState y{0.4, -0.3, 1.2, 0.9};
    const RegState x = from_mcgehee(y, m);
    CHECK(x.w == doctest::Approx(m.F(1.2) * 0.9));
    const McGeheeState back = to_mcgehee(x, m);
    CHECK(back.u == doctest::Approx(0.9).epsilon(1e-14));
    CHECK_THROWS_AS(from_mcgehee(McGeheeState{0.4, 0, m.theta_b(), 0}, m), Error);
  }

  TEST_CASE("shell solve") {
    const auto m = rec4bp();
    RegState x{0.5, 0.0, 0.7, 0.3};
    REQUIRE(solve_shell_v(x, -1.0, m, -1.0));
    CHECK(x.v < 0);
    CHECK(std::abs(oracle::rec_residual(x, -1.0)) < 1e-13);
    RegState far{100.0, 0.0, 0.7, 0.0};
    CHECK_FALSE(solve_shell_v(far, -1.0, m, 1.0));
  }

  TEST_CASE("field is continuous across the boundary") {
    const auto m = rec4bp();
    const RegState edge = field_regularized(RegState{0.2, 1.0, pi / 2, 0.0}, -1.0, m);
    for (double d : {1e-3, 1e-5, 1e-7}) {
      const RegState near = field_regularized(RegState{0.2, 1.0, pi / 2 - d, 0.0}, -1.0, m);
      CHECK(std::isfinite(near.v));
      CHECK(std::abs(near.w - edge.w) < 10 * d);
      CHECK(std::abs(near.v - edge.v) < 10 * d);
    }
  }

  TEST_CASE("Jacobian matches finite differences") {
    const auto m = sc4bp(1.3);
    const RegState x{0.3, 0.8, 1.1, 0.2};
    const Mat4 J = jacobian_regularized(x, -1.0, m);
    const double d = 1e-6;
    for (int j = 0; j < 4; ++j) {
      Vec4 p = x.to_array(), q = x.to_array();
      p[j] += d;
      q[j] -= d;
      const Vec4 fp = field_regularized(p, -1.0, m), fq = field_regularized(q, -1.0, m);
      for (int i = 0; i < 4; ++i) CHECK(J[i][j] == doctest::Approx((fp[i] - fq[i]) / (2 * d)).epsilon(1e-6).scale(1.0));
    }
  }

  TEST_CASE("r = 0 is invariant") {
    const auto m = rec4bp();
    const RegState x = oracle::collision_point(m, 0.5, 0.3);
    const Orbit o = integrate(x, -1.0, m, 0.0, 5.0);
    for (const auto& s : o.states) CHECK(s.r == 0.0);
  }
}
