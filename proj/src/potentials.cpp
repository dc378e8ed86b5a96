#include "ecotrace/potentials.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <sstream>

#include "ecotrace/error.hpp"

namespace ecotrace {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFdStep = 1e-6;
constexpr double kFdStep2 = 1e-4;

std::string fmt_angle(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

PotentialModel::PotentialModel(std::string name, double theta_a, double theta_b,
                               double c_a, double c_b, RegularPart vtilde,
                               MassMatrix mass, int grid)
    : name_(std::move(name)),
      theta_a_(theta_a),
      theta_b_(theta_b),
      c_a_(c_a),
      c_b_(c_b),
      vt_(std::move(vtilde)),
      mass_(mass) {
  auto fail = [this](const std::string& msg) {
    throw Error(ErrorCode::invalid_model, name_ + ": " + msg);
  };
  if (!vt_.value) fail("regular part has no value callback");
  if (!(std::isfinite(theta_a) && std::isfinite(theta_b))) fail("non-finite boundary angle");
  const double width = theta_b - theta_a;
  if (!(width > 0.0) || width > kPi + 1e-12) fail("need 0 < theta_b - theta_a <= pi");
  if (!(c_a > 0.0)) fail("c_a must be positive");
  if (!(c_b >= 0.0)) fail("c_b must be nonnegative");
  const bool half_turn = std::abs(width - kPi) <= 1e-12;
  if (half_turn != (c_b == 0.0)) fail("c_b = 0 exactly when theta_b - theta_a = pi");
  single_ = half_turn;
  if (!(mass.a1 > 0.0 && mass.a2 > 0.0)) fail("mass matrix entries must be positive");
  if (grid < 16) fail("validation grid too coarse");

  for (int i = 1; i < grid; ++i) {
    const double th = theta_a + width * i / grid;
    const double vt = vt_.value(th);
    if (!(vt > 0.0) || !std::isfinite(vt))
      fail("regular part not positive at theta = " + fmt_angle(th));
    const double v = V_unchecked(th);
    if (!(v > 0.0)) fail("V not positive at theta = " + fmt_angle(th));
  }
  theta_c_ = find_theta_c(*this, grid);
}

PotentialModel PotentialModel::with_mass(MassMatrix mass) const {
  if (!(mass.a1 > 0.0 && mass.a2 > 0.0))
    throw Error(ErrorCode::invalid_model, name_ + ": mass matrix entries must be positive");
  PotentialModel out = *this;
  out.mass_ = mass;
  return out;
}

void PotentialModel::require_open(double theta, const char* what) const {
  if (!(theta > theta_a_ && theta < theta_b_))
    throw Error(ErrorCode::domain, std::string(what) + ": theta = " + fmt_angle(theta) +
                                       " outside open interval (" + fmt_angle(theta_a_) +
                                       ", " + fmt_angle(theta_b_) + ")");
}

void PotentialModel::require_closed(double theta, const char* what) const {
  if (!(theta >= theta_a_ && theta <= theta_b_))
    throw Error(ErrorCode::domain, std::string(what) + ": theta = " + fmt_angle(theta) +
                                       " outside closed interval [" + fmt_angle(theta_a_) +
                                       ", " + fmt_angle(theta_b_) + "]");
}

double PotentialModel::vtilde_d1(double th) const {
  if (vt_.d1) return vt_.d1(th);
  return (vt_.value(th + kFdStep) - vt_.value(th - kFdStep)) / (2 * kFdStep);
}

double PotentialModel::vtilde_d2(double th) const {
  if (vt_.d2) return vt_.d2(th);
  if (vt_.d1) return (vt_.d1(th + kFdStep) - vt_.d1(th - kFdStep)) / (2 * kFdStep);
  return (vt_.value(th + kFdStep2) - 2 * vt_.value(th) + vt_.value(th - kFdStep2)) /
         (kFdStep2 * kFdStep2);
}

double PotentialModel::V_unchecked(double th) const noexcept {
  double v = c_a_ / std::sin(th - theta_a_) + vt_.value(th);
  if (!single_) v += c_b_ / std::sin(theta_b_ - th);
  return v;
}

double PotentialModel::dV_unchecked(double th) const noexcept {
  const double y = th - theta_a_;
  const double sy = std::sin(y);
  double d = -c_a_ * std::cos(y) / (sy * sy) + vtilde_d1(th);
  if (!single_) {
    const double x = theta_b_ - th;
    const double sx = std::sin(x);
    d += c_b_ * std::cos(x) / (sx * sx);
  }
  return d;
}

double PotentialModel::V(double th) const {
  require_open(th, "V");
  return V_unchecked(th);
}

double PotentialModel::dV(double th) const {
  require_open(th, "dV");
  return dV_unchecked(th);
}

double PotentialModel::d2V(double th) const {
  require_open(th, "d2V");
  const double y = th - theta_a_;
  const double sy = std::sin(y), cy = std::cos(y);
  double d = c_a_ * (1 + cy * cy) / (sy * sy * sy) + vtilde_d2(th);
  if (!single_) {
    const double x = theta_b_ - th;
    const double sx = std::sin(x), cx = std::cos(x);
    d += c_b_ * (1 + cx * cx) / (sx * sx * sx);
  }
  return d;
}

double PotentialModel::f(double th) const {
  require_closed(th, "f");
  return companions(th).f;
}

double PotentialModel::df(double th) const {
  require_closed(th, "df");
  return companions(th).df;
}

double PotentialModel::W(double th) const {
  require_closed(th, "W");
  return companions(th).W;
}

double PotentialModel::F(double th) const {
  require_closed(th, "F");
  return companions(th).F;
}

Companions PotentialModel::companions(double th) const noexcept {
  Companions c;
  const double vt = vt_.value(th);
  const double vt1 = vtilde_d1(th);
  const double sb = std::sin(theta_b_ - th), cb = std::cos(theta_b_ - th);
  if (single_) {
    c.f = sb;
    c.df = -cb;
    c.W = c_a_ + c.f * vt;
    c.dW = c.df * vt + c.f * vt1;
  } else {
    const double sa = std::sin(th - theta_a_), ca = std::cos(th - theta_a_);
    c.f = sa * sb;
    c.df = ca * sb - sa * cb;
    c.W = c_b_ * sa + c_a_ * sb + c.f * vt;
    c.dW = c_b_ * ca - c_a_ * cb + c.df * vt + c.f * vt1;
  }
  c.sqrtW = std::sqrt(c.W);
  c.F = c.f / c.sqrtW;
  c.dF = c.df / c.sqrtW - c.f * c.dW / (2 * c.W * c.sqrtW);
  return c;
}

CompanionCurvature PotentialModel::curvature(double th) const noexcept {
  CompanionCurvature k;
  const double vt = vt_.value(th);
  const double vt1 = vtilde_d1(th);
  const double vt2 = vtilde_d2(th);
  const double sb = std::sin(theta_b_ - th), cb = std::cos(theta_b_ - th);
  if (single_) {
    const double f = sb, df = -cb;
    k.d2f = -sb;
    k.d2W = k.d2f * vt + 2 * df * vt1 + f * vt2;
  } else {
    const double sa = std::sin(th - theta_a_), ca = std::cos(th - theta_a_);
    const double f = sa * sb, df = ca * sb - sa * cb;
    k.d2f = -2 * (ca * cb + sa * sb);
    k.d2W = -c_b_ * sa - c_a_ * sb + k.d2f * vt + 2 * df * vt1 + f * vt2;
  }
  return k;
}

double find_theta_c(const PotentialModel& m, int grid) {
  const double a = m.theta_a(), b = m.theta_b();
  const double width = b - a;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorCode::invalid_model, m.name() + ": " + msg);
  };
  int changes = 0;
  bool to_negative = false;
  double lo = 0, hi = 0, prev_t = a;
  int prev_sign = 0;
  for (int i = 1; i < grid; ++i) {
    const double t = a + width * i / grid;
    const double d = m.dV_unchecked(t);
    if (!std::isfinite(d)) fail("V' not finite at theta = " + fmt_angle(t));
    const int sgn = (d > 0) - (d < 0);
    if (sgn == 0) continue;
    if (prev_sign != 0 && sgn != prev_sign) {
      ++changes;
      to_negative = sgn < 0;
      lo = prev_t;
      hi = t;
    }
    prev_sign = sgn;
    prev_t = t;
  }
  if (changes == 0) fail("V' has no sign change on the validation grid");
  if (changes > 1)
    fail("V' changes sign " + std::to_string(changes) + " times on the validation grid");
  if (to_negative) fail("critical point is a maximum");

  auto g = [&](double t) { return m.dV_unchecked(t); };
  double x;
  {
    boost::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(
        g, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
    x = 0.5 * (r.first + r.second);
  }
  // Newton polish, kept inside the bracket
  for (int k = 0; k < 4; ++k) {
    const double d1 = g(x);
    if (d1 == 0.0) break;
    const double d2 = m.d2V(x);
    const double nx = x - d1 / d2;
    if (!(nx > lo && nx < hi)) break;
    if (std::abs(g(nx)) >= std::abs(d1)) break;
    x = nx;
  }
  const double d2 = m.d2V(x);
  if (!(d2 > 0.0)) fail("critical point is degenerate (V'' <= 0)");
  if (!(std::abs(g(x)) < 1e-12 * std::max(1.0, std::abs(d2))))
    fail("could not resolve theta_c to tolerance");
  return x;
}

// Built-in models

PotentialModel rec4bp() {
  RegularPart vt{[](double) { return 2.0; }, [](double) { return 0.0; },
                 [](double) { return 0.0; }};
  return PotentialModel("rec4bp", 0.0, kPi / 2, 2.0, 2.0, std::move(vt));
}

PotentialModel rh4bp(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCode::invalid_model, "rh4bp: alpha must be positive");
  const double k = 4 * std::sqrt(2.0) * std::pow(alpha, 1.5);
  // Vt = k D^{-1/2}, D = alpha cos^2 + sin^2
  RegularPart vt;
  vt.value = [=](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return k / std::sqrt(alpha * c * c + s * s);
  };
  vt.d1 = [=](double t) {
    const double c = std::cos(t), s = std::sin(t);
    const double D = alpha * c * c + s * s;
    const double D1 = (1 - alpha) * std::sin(2 * t);
    return -0.5 * k * D1 / (D * std::sqrt(D));
  };
  vt.d2 = [=](double t) {
    const double c = std::cos(t), s = std::sin(t);
    const double D = alpha * c * c + s * s;
    const double D1 = (1 - alpha) * std::sin(2 * t);
    const double D2 = 2 * (1 - alpha) * std::cos(2 * t);
    return k * (0.75 * D1 * D1 / (D * D * std::sqrt(D)) - 0.5 * D2 / (D * std::sqrt(D)));
  };
  const double cb = 1 / std::sqrt(2.0);
  const double ca = std::pow(alpha, 2.5) / std::sqrt(2.0);
  return PotentialModel("rh4bp", 0.0, kPi / 2, ca, cb, std::move(vt));
}

PotentialModel sc4bp(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw Error(ErrorCode::invalid_model, "sc4bp: alpha must be positive");
  const double ta = std::atan(std::sqrt(alpha));
  const double k1 = std::pow(alpha, 2.5) / std::sqrt(2.0);
  const double k2 = 2 * std::sqrt(2.0) * std::pow(alpha, 1.5) / std::sqrt(1 + alpha);
  // Vt = k1 / sin(t) + k2 / sin(t + ta); (1/sin)' = -cos/sin^2, (1/sin)'' = (1+cos^2)/sin^3
  auto inv = [](double x) { return 1 / std::sin(x); };
  auto inv1 = [](double x) {
    const double s = std::sin(x);
    return -std::cos(x) / (s * s);
  };
  auto inv2 = [](double x) {
    const double s = std::sin(x), c = std::cos(x);
    return (1 + c * c) / (s * s * s);
  };
  RegularPart vt;
  vt.value = [=](double t) { return k1 * inv(t) + k2 * inv(t + ta); };
  vt.d1 = [=](double t) { return k1 * inv1(t) + k2 * inv1(t + ta); };
  vt.d2 = [=](double t) { return k1 * inv2(t) + k2 * inv2(t + ta); };
  const double cb = 1 / std::sqrt(2.0);
  const double ca = k2;
  return PotentialModel("sc4bp", ta, kPi / 2, ca, cb, std::move(vt));
}

PotentialModel c3bp(double m1, double m2, double m3, double lambda, double gap_left,
                    double gap_right) {
  if (!(m1 > 0 && m2 > 0 && m3 > 0))
    throw Error(ErrorCode::invalid_model, "c3bp: masses must be positive");
  if (!(lambda > 0 && lambda < kPi / 2))
    throw Error(ErrorCode::invalid_model, "c3bp: lambda must lie in (0, pi/2)");
  if (!(gap_left > 0 && gap_right > 0))
    throw Error(ErrorCode::invalid_model, "c3bp: gaps must be positive");
  const double s2 = std::sin(2 * lambda);
  const double ta = -lambda, tb = lambda;
  const double K = s2 * m1 * m3;
  auto D = [=](double t) { return gap_left * std::sin(t - ta) + gap_right * std::sin(tb - t); };
  auto D1 = [=](double t) {
    return gap_left * std::cos(t - ta) - gap_right * std::cos(tb - t);
  };
  RegularPart vt;
  vt.value = [=](double t) { return K / D(t); };
  vt.d1 = [=](double t) {
    const double d = D(t);
    return -K * D1(t) / (d * d);
  };
  vt.d2 = [=](double t) {
    const double d = D(t), d1 = D1(t);
    return K * (2 * d1 * d1 / (d * d * d) + 1 / d);
  };
  const double ca = s2 * m1 * m2 / gap_left;
  const double cb = s2 * m2 * m3 / gap_right;
  return PotentialModel("c3bp", ta, tb, ca, cb, std::move(vt));
}

PotentialModel sym2n(int n, RegularPart vtilde) {
  if (n < 2) throw Error(ErrorCode::invalid_model, "sym2n: N must be at least 2");
  const double half = kPi / n;
  if (n == 2) {
    // both singular terms sit on cos(theta): merged into c_a / sin(theta + pi/2)
    return PotentialModel("sym2n", -half, half, 2.0, 0.0, std::move(vtilde));
  }
  return PotentialModel("sym2n", -half, half, 1.0, 1.0, std::move(vtilde));
}

}  // namespace ecotrace
