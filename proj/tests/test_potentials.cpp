#include <cmath>
#include <vector>

#include "doctest.h"
#include "ecotrace/error.hpp"
#include "ecotrace/potentials.hpp"
#include "oracles.hpp"

using namespace ecotrace;
using oracle::pi;

namespace {

std::vector<PotentialModel> builtins() {
  RegularPart flat{[](double) { return 1.5; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
  return {rec4bp(),   rh4bp(0.5), rh4bp(1.0), rh4bp(2.0), sc4bp(0.5),
          sc4bp(1.0), sc4bp(2.0), c3bp(1, 1, 1, 0.9, 1.0, 1.0), sym2n(3, flat)};
}

double bisect_dV(const PotentialModel& m) {
  double lo = m.theta_a() + 1e-6, hi = m.theta_b() - 1e-6;
  // coarse scan for the sign change, then plain bisection
  const int n = 2000;
  double prev = lo;
  for (int i = 1; i <= n; ++i) {
    const double t = lo + (hi - lo) * i / n;
    if (m.dV(prev) < 0 && m.dV(t) >= 0) {
      lo = prev;
      hi = t;
      break;
    }
    prev = t;
  }
  for (int k = 0; k < 200 && hi - lo > 1e-15; ++k) {
    const double mid = 0.5 * (lo + hi);
    (m.dV(mid) < 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("potentials") {
  TEST_CASE("rec4bp values against the closed form") {
    const auto m = rec4bp();
    CHECK(m.V(pi / 4) == doctest::Approx(2 + 4 * std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(m.dV(pi / 4)) < 1e-12);
    CHECK(m.dV(pi / 3) == doctest::Approx(oracle::rec_dV(pi / 3)).epsilon(1e-12));
    CHECK(m.d2V(pi / 4) > 0);
    CHECK(m.f(pi / 4) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(m.W(pi / 4) == doctest::Approx(0.5 * (2 + 4 * std::sqrt(2.0))).epsilon(1e-14));
    CHECK(m.F(pi / 4) == doctest::Approx(0.25555).epsilon(1e-4));
    for (double t = 0.05; t < 1.5; t += 0.1) {
      CHECK(m.V(t) == doctest::Approx(oracle::rec_V(t)).epsilon(1e-13));
      CHECK(m.W(t) == doctest::Approx(oracle::rec_W(t)).epsilon(1e-13));
      CHECK(m.F(t) == doctest::Approx(oracle::rec_F(t)).epsilon(1e-13));
    }
  }

  TEST_CASE("second derivative matches finite differences of dV") {
    const auto m = rec4bp();
    for (double t : {0.3, 0.7, 1.1}) {
      const double d = 1e-5;
      const double fd = (m.dV(t + d) - m.dV(t - d)) / (2 * d);
      CHECK(m.d2V(t) == doctest::Approx(fd).epsilon(1e-7));
    }
  }

  TEST_CASE("rec4bp is symmetric about pi/4") {
    const auto m = rec4bp();
    for (double d = 0.01; d < pi / 4; d += 0.01)
      CHECK(m.V(pi / 4 + d) == doctest::Approx(m.V(pi / 4 - d)).epsilon(1e-13));
  }

  TEST_CASE("constructors") {
    const auto r = rec4bp();
    CHECK(r.theta_a() == 0.0);
    CHECK(r.theta_b() == doctest::Approx(pi / 2));
    CHECK(r.c_a() == doctest::Approx(2.0));
    CHECK(r.c_b() == doctest::Approx(2.0));
    CHECK(sc4bp(1.0).theta_a() == doctest::Approx(pi / 4));
    CHECK(sc4bp(2.0).theta_a() == doctest::Approx(std::atan(std::sqrt(2.0))));
    const auto rh = rh4bp(1.0);
    CHECK(rh.c_a() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(rh.c_b() == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK_THROWS_AS(sc4bp(-1.0), Error);
    CHECK_THROWS_AS(c3bp(1, 1, 1, 2.0, 1, 1), Error);
    CHECK_THROWS_AS(sym2n(1, {}), Error);
  }

  TEST_CASE("domain errors at the boundary") {
    const auto m = rec4bp();
    try {
      m.V(0.0);
      FAIL("no error at theta_a");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::domain);
    }
    CHECK_THROWS_AS(m.dV(pi / 2), Error);
    CHECK_THROWS_AS(m.f(-0.1), Error);
    CHECK_NOTHROW(m.f(0.0));
    const auto s = sc4bp(1.0);
    CHECK(s.V(pi / 2 - 1e-9) > 1e6);  // binary collision of the central pair
    CHECK(s.V(pi / 4 + 1e-9) > 1e6);
  }

  TEST_CASE("companions on the closed interval") {
    for (const auto& m : builtins()) {
      CAPTURE(m.name());
      CHECK(std::abs(m.f(m.theta_a())) < 1e-15);
      CHECK(std::abs(m.f(m.theta_b())) < 1e-15);
      CHECK(std::abs(m.F(m.theta_b())) < 1e-15);
      CHECK(m.W(m.theta_a()) > 0);
      CHECK(m.W(m.theta_b()) > 0);
      for (int i = 1; i < 1000; ++i) {
        const double t = m.theta_a() + (m.theta_b() - m.theta_a()) * i / 1000.0;
        const double f = m.f(t), W = m.W(t), V = m.V(t);
        REQUIRE(V > 0);
        CHECK(std::abs(f * V - W) <= 1e-14 * W + 1e-14);
        CHECK(std::abs(m.F(t) * std::sqrt(W) - f) <= 1e-14 * std::max(1.0, f));
      }
    }
  }

  TEST_CASE("W at theta_a is the limit of f V") {
    const auto m = rec4bp();
    const double limit = m.c_a() * std::sin(m.theta_b() - m.theta_a());
    CHECK(m.W(m.theta_a()) == doctest::Approx(limit).epsilon(1e-14));
    CHECK(m.f(1e-7) * m.V(1e-7) == doctest::Approx(limit).epsilon(1e-6));
  }

  TEST_CASE("theta_c is the bisection root of V'") {
    CHECK(rec4bp().theta_c() == doctest::Approx(pi / 4).epsilon(1e-14));
    for (const auto& m : builtins()) {
      CAPTURE(m.name());
      const double tc = m.theta_c();
      CHECK(tc == doctest::Approx(bisect_dV(m)).epsilon(1e-10));
      CHECK(m.d2V(tc) > 0);
      CHECK(std::abs(find_theta_c(m, 8192) - tc) < 1e-10);
      CHECK(find_theta_c(m) == tc);
    }
    const double t1 = sc4bp(1.0).theta_c();
    CHECK(t1 > pi / 4);
    CHECK(t1 < pi / 2);
  }

  TEST_CASE("a potential with two critical points is rejected") {
    RegularPart bumpy{[](double t) { return 40 * std::cos(8 * t); }, {}, {}};
    try {
      PotentialModel("bumpy", 0.0, pi / 2, 1.0, 1.0, bumpy);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::invalid_model);
    }
  }

  TEST_CASE("finite-difference fallback for the regular part") {
    RegularPart with{[](double t) { return 1 + 0.1 * std::sin(t); }, [](double t) { return 0.1 * std::cos(t); },
                     [](double t) { return -0.1 * std::sin(t); }};
    RegularPart without{with.value, {}, {}};
    const PotentialModel a("a", 0.0, pi / 2, 1.0, 1.0, with), b("b", 0.0, pi / 2, 1.0, 1.0, without);
    for (double t : {0.2, 0.8, 1.3}) {
      CHECK(b.vtilde_d1(t) == doctest::Approx(a.vtilde_d1(t)).epsilon(1e-8));
      CHECK(b.vtilde_d2(t) == doctest::Approx(a.vtilde_d2(t)).epsilon(1e-5));
    }
    CHECK(b.theta_c() == doctest::Approx(a.theta_c()).epsilon(1e-9));
  }

  TEST_CASE("with_mass") {
    const auto m = rec4bp().with_mass({4.0, 1.0});
    CHECK(m.mass_matrix().a1 == 4.0);
    CHECK(m.V(0.5) == rec4bp().V(0.5));
    CHECK_THROWS_AS(rec4bp().with_mass({0.0, 1.0}), Error);
  }
}
