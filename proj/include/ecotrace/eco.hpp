#pragma once

// Two-dimensional manifolds W^u(E+), W^s(E-) through their traces on the
// section, and the search for ejection-collision orbits (ECOs) of a given
// symbol sequence by backward iteration of arcs.

#include <optional>
#include <string>
#include <vector>

#include "ecotrace/equilibria.hpp"
#include "ecotrace/integrator.hpp"
#include "ecotrace/manifolds1d.hpp"

namespace ecotrace {

/// Seeds Z(phi) = E+ + eps (cos phi e_unstable + sin phi e_radial), phi in
/// [0, pi] sampled at m points, projected onto the energy shell in v.
/// Error{projection} if a seed cannot be put on the shell.
std::vector<RegState> fundamental_arc(const EquilibriumInfo& eplus, double eps, int m,
                                      const PotentialModel& m_model);
/// Single seed; `phi` is the fraction of pi (0 = Gamma^u_+, 1/2 = homothetic).
RegState fundamental_seed(const EquilibriumInfo& eplus, double eps, double phi,
                          const PotentialModel& model);

enum class ArcOrigin {
  unstable_of_eplus,  // P^k(J)
  stable_of_eminus,   // P^-k(K) = S(P^k(J))
};

struct ArcPoint {
  double phi = 0;          // fundamental-arc parameter in [0, 1]
  SigmaCrossing crossing;  // r >= 0
  std::string code;        // sides visited along the provenance chain, in time order
};

struct SigmaArc {
  Side side = Side::b;
  ArcOrigin origin = ArcOrigin::unstable_of_eplus;
  int iterates = 0;  // number of maps applied to the first arc
  double eps = 1e-6;
  std::vector<ArcPoint> points;  // increasing phi
  std::string label_lo, label_hi;  // limits at the two ends ("?" if unresolved)
  std::string provenance() const;  // e.g. "P^2(J^b)", "P^-1(K^a)"
};

struct ArcOptions {
  double eps = 1e-6;
  int points = 65;           // initial parameters per arc
  double dv_max = 0.05;      // refinement thresholds in the (r, v) plane
  double dr_max = 0.05;
  long budget = 100000;      // total point evaluations per call
  double min_dphi = 1e-12;   // below this a jump is treated as a split
  double split_ball_rel = 0.01;  // equilibrium ball used while mapping arcs, times eps
  bool refine = true;
  bool extend_ends = true;   // push the extreme points towards r = 0
  double end_offset = 1.0;  // ends are pushed until the seed's offset from the end is below end_offset * eps^2
  bool strict_ends = true;   // false: cut J short at an unresolved homothetic end
  IntegOptions integ{.project_shell = true};
};

/// Limit of an arc end on the collision manifold, e.g. "q2-".
struct LimitPoint {
  std::string label;
  Side side = Side::b;
  double v = 0;
};

/// Context shared by all arc computations of one model and energy.
struct ArcContext {
  const PotentialModel* model = nullptr;
  double h = kDefaultEnergy;
  EquilibriumInfo eplus, eminus;
  BranchSet branches;
  std::vector<LimitPoint> limits;  // u, s, p, q values used to label arc ends
  ArcOptions opt;
  long evaluations = 0;
  long failures = 0;  // points whose map raised an integration error (treated as cuts)
};

ArcContext make_context(const PotentialModel& m, double h = kDefaultEnergy,
                        const ArcOptions& opt = {});

struct FirstArcs {
  SigmaArc Ja, Jb, Ka, Kb;
  std::vector<std::string> warnings;  // ends cut short (only without strict_ends)
};

/// J^b from phi in (0, 1/2), J^a from (1/2, 1), K = S(J). Error{unresolved_endpoints}
/// if the extreme points do not approach the traced limits u_1, p_1. Without
/// strict_ends the u_1 end may be cut where the orbits near the homothetic one
/// stop being resolvable; the end is then labelled "?".
FirstArcs first_arcs(ArcContext& ctx);

/// Point of an arc family at an arbitrary parameter, recomputed from its seed.
MapOutcome evaluate_arc(ArcContext& ctx, ArcOrigin origin, int iterates, double phi);

/// Applies P (forward) or P^-1 (backward) pointwise with adaptive refinement.
/// The image is cut into pieces on a single side; cuts happen where the orbit
/// enters an equilibrium ball or the side changes. Error{refinement_budget}.
std::vector<SigmaArc> map_arc(ArcContext& ctx, const SigmaArc& arc, Direction dir);

struct ArcIntersection {
  double phi_a = 0, phi_b = 0;  // parameters on the two arcs
  SigmaCrossing crossing;
  double angle = 0;  // crossing angle of the two chords, radians
};

/// All crossings of two arcs on the same side, refined to 1e-9 in (r, v).
/// Error{invalid_argument} if the sides differ.
std::vector<ArcIntersection> intersect_arcs(ArcContext& ctx, const SigmaArc& a,
                                            const SigmaArc& b);

struct EcoVerification {
  bool forward_target = false;   // E- ball reached with r shrinking
  bool backward_target = false;  // E+ ball reached with r shrinking
  std::string realized_code;
  double min_r_forward = 0, min_r_backward = 0;
  double anchor_gap = 0;        // mismatch where the middle segment meets the collision anchor
  bool segments_match = false;  // anchor_gap within SearchOptions::match_tol
  double energy_drift = 0;
  bool ok(const std::string& sigma) const {
    return forward_target && backward_target && segments_match && realized_code == sigma;
  }
};

/// The orbit is checked in three pieces. The backward tail runs from the
/// ejection seed (a point of W^u(E+) inside the verification ball), the
/// forward tail from the collision seed (on W^s(E-)), and the middle segment
/// integrates forward from the ejection seed until one of its crossings
/// matches the first crossing before the collision seed.
struct EcoAnchor {
  RegState ejection;
  RegState collision;
};

struct EcoResult {
  std::string sigma;
  std::vector<SigmaCrossing> crossing_states;
  EcoAnchor anchor;
  RegState seed;       // on the fundamental arc of W^u(E+)
  double phi = 0;      // seed parameter (NaN when not on the fundamental arc)
  double eps = 1e-6;
  EcoVerification verification;
  bool guaranteed = false;  // existence follows from the classification
  int candidates = 0;       // intersections examined
  std::vector<std::string> warnings;
};

struct SearchOptions {
  ArcOptions arcs;
  double verify_ball = 1e-3;
  double decades = 3;  // required decrease of r in each tail
  double match_tol = 1e-4;  // in (r, v) where the middle segment meets the collision anchor
  int max_crossings = 64;   // middle segment cap
  double max_eps = 1e-3;    // arcs.eps is raised tenfold up to this while nothing verifies
};

/// True when one of the existence results applies to sigma for the given
/// classification. Symbols are 'a' and 'b' without separators.
bool eco_guaranteed(const std::string& sigma, const std::optional<Classification>& c);

/// Searches an ECO whose partial collisions are sigma (e.g. "bab"). The empty
/// sigma gives the homothetic orbit. Error{not_found} or
/// Error{not_found_guaranteed}.
EcoResult find_eco(const PotentialModel& m, double h, const std::string& sigma,
                   const SearchOptions& opt = {});

/// Re-integrates the anchors (tails and middle segment) and reports what they realize.
EcoVerification verify_eco(const EcoAnchor& anchor, double h, const PotentialModel& m,
                           const SearchOptions& opt = {});

/// The symmetric ECO S(eco) with the reversed code, verified again.
EcoResult eco_mirror(const EcoResult& eco, const PotentialModel& m, double h,
                     const SearchOptions& opt = {});

/// Samples from the ejection seed to the collision seed: the middle segment up
/// to the matched crossing, then the collision side in forward time. Error{not_found}
/// if the two segments do not match.
Orbit eco_trajectory(const EcoResult& eco, const PotentialModel& m, double h,
                     const SearchOptions& opt = {});

/// "b,a,b" -> "bab"; Error{invalid_argument} on other symbols.
std::string parse_sigma(const std::string& text);

}  // namespace ecotrace
