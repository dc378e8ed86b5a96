#pragma once

// Angular potentials V(theta) of two-degree-of-freedom homogeneous problems
//
//   V(theta) = c_b / sin(theta_b - theta) + c_a / sin(theta - theta_a) + Vt(theta)
//
// together with the companion functions of the Sundman-type regularization
// f, W = f V and F = f / sqrt(W). W is evaluated through the expansion
//   W = c_b sin(theta - theta_a) + c_a sin(theta_b - theta) + f Vt
// so that it stays regular on the closed interval.

#include <functional>
#include <string>

namespace ecotrace {

/// Smooth bounded part Vt of the potential and (optionally) its derivatives.
/// Missing derivatives are replaced by central finite differences: step 1e-6
/// on d1 for the second derivative, and step 1e-6 on the value for the first
/// derivative (second derivative then uses step 1e-4 on the value). The
/// truncation error is O(step^2); callbacks must accept arguments within 1e-4
/// of the closed interval.
struct RegularPart {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// Diagonal kinetic matrix A = diag(a1, a2). Only used for configuration export.
struct MassMatrix {
  double a1 = 1.0;
  double a2 = 1.0;
};

/// Companion values of the regularization at one angle.
struct Companions {
  double f = 0, df = 0;
  double W = 0, dW = 0;
  double sqrtW = 0;
  double F = 0, dF = 0;
};

/// Second derivatives, needed by the Jacobian only.
struct CompanionCurvature {
  double d2f = 0;
  double d2W = 0;
};

inline constexpr int kValidationGrid = 4096;

class PotentialModel {
 public:
  /// Validates the single-minimum hypotheses on a `grid`-point sampling and
  /// caches theta_c. Throws Error{invalid_model} on violation.
  PotentialModel(std::string name, double theta_a, double theta_b, double c_a,
                 double c_b, RegularPart vtilde, MassMatrix mass = {},
                 int grid = kValidationGrid);

  const std::string& name() const noexcept { return name_; }
  double theta_a() const noexcept { return theta_a_; }
  double theta_b() const noexcept { return theta_b_; }
  double c_a() const noexcept { return c_a_; }
  double c_b() const noexcept { return c_b_; }
  double theta_c() const noexcept { return theta_c_; }
  const MassMatrix& mass_matrix() const noexcept { return mass_; }
  /// Copy with another kinetic matrix. Error{invalid_model} unless a1, a2 > 0.
  PotentialModel with_mass(MassMatrix mass) const;
  /// True when theta_b - theta_a == pi and c_b == 0 (f = sin(theta_b - theta)).
  bool single_singularity() const noexcept { return single_; }

  // Open interval only; Error{domain} otherwise.
  double V(double theta) const;
  double dV(double theta) const;
  double d2V(double theta) const;

  // Closed interval; Error{domain} outside.
  double f(double theta) const;
  double df(double theta) const;
  double W(double theta) const;
  double F(double theta) const;

  double vtilde(double theta) const { return vt_.value(theta); }
  double vtilde_d1(double theta) const;
  double vtilde_d2(double theta) const;

  /// Unchecked evaluation used by the vector field. Valid on the closed
  /// interval and on a small neighbourhood of it (integration overshoot).
  Companions companions(double theta) const noexcept;
  CompanionCurvature curvature(double theta) const noexcept;

  // Unchecked V and V' (the vector field away from the boundary).
  double V_unchecked(double theta) const noexcept;
  double dV_unchecked(double theta) const noexcept;

 private:
  void require_open(double theta, const char* what) const;
  void require_closed(double theta, const char* what) const;

  std::string name_;
  double theta_a_, theta_b_, c_a_, c_b_;
  double theta_c_ = 0.0;
  bool single_ = false;
  RegularPart vt_;
  MassMatrix mass_;
};

/// Locates the unique critical point of V by scanning V' on `grid` interior
/// samples, bracketing the sign change and polishing with Newton. Throws
/// Error{invalid_model} when V' has zero or several sign changes, or when the
/// critical point is not a non-degenerate minimum.
double find_theta_c(const PotentialModel& model, int grid = kValidationGrid);

// Built-in models.

/// Rectangular four-body problem: V = 2 + 2/cos + 2/sin on (0, pi/2).
PotentialModel rec4bp();
/// Rhomboidal four-body problem with mass ratio alpha.
PotentialModel rh4bp(double alpha);
/// Symmetric collinear four-body problem, theta in (atan(sqrt(alpha)), pi/2).
PotentialModel sc4bp(double alpha);
/// Collinear three-body problem on the chart theta = lambda * s, s in (-1, 1).
/// `gap_left` = b2 - b1 and `gap_right` = a3 - a2; lambda and the gaps are
/// mass-dependent constants supplied by the caller.
PotentialModel c3bp(double m1, double m2, double m3, double lambda,
                    double gap_left, double gap_right);
/// Symmetric planar 2N-body problem on (-pi/N, pi/N) with caller-supplied Vt.
PotentialModel sym2n(int n, RegularPart vtilde);

}  // namespace ecotrace
