#pragma once

// One-dimensional invariant manifolds inside the collision manifold r = 0:
// branch tracing, symbol codes, turn counts, Types I-IV and the orderings of
// the crossing sequences u_j, s_j, p_j, q_j along the collision lines.

#include <optional>
#include <string>
#include <vector>

#include "ecotrace/equilibria.hpp"
#include "ecotrace/integrator.hpp"

namespace ecotrace {

enum class BranchOrigin {
  unstable_of_eminus,  // W^u(E-), traced forward
  stable_of_eplus,     // W^s(E+), traced backward
  collision_unstable_of_eplus,  // W^u(E+) restricted to r = 0, traced forward
};
enum class Sign { plus, minus };
enum class BranchEnd { escape, heteroclinic, undecided };

const char* to_string(BranchOrigin o) noexcept;
const char* to_string(BranchEnd e) noexcept;
inline char sign_char(Sign s) noexcept { return s == Sign::plus ? '+' : '-'; }

struct BranchTrace {
  BranchOrigin origin = BranchOrigin::unstable_of_eminus;
  Sign sign = Sign::plus;
  double eps = 1e-6;
  std::vector<SigmaCrossing> crossings;  // in the direction of tracing
  std::string code;                      // one symbol per crossing
  double full_turns = 0;
  BranchEnd end = BranchEnd::undecided;
  Arm arm = Arm::right;        // valid for escape
  Which target = Which::eplus; // valid for heteroclinic
  std::vector<double> s;          // orbit samples, with TraceOptions::keep_samples
  std::vector<RegState> samples;
};

struct TraceOptions {
  double eps = 1e-6;
  int max_crossings = 200;
  double ball = 1e-3;
  bool keep_samples = false;
  IntegOptions integ;
};

/// Traces one branch of the 1D manifold attached to `eq`: the unstable
/// manifold of E- forward in time, or the stable manifold of E+ backward in
/// time. The sign is the sign of w along the seeding offset.
BranchTrace trace_branch(const EquilibriumInfo& eq, Sign sign, const PotentialModel& m,
                         const TraceOptions& opt = {});

/// Orbit of W^u(E+) inside the collision manifold (its crossings are p_j).
BranchTrace trace_collision_branch(const EquilibriumInfo& eplus, Sign sign,
                                   const PotentialModel& m, const TraceOptions& opt = {});

std::string code_of(const BranchTrace& t);
/// Comma separated code, "()" when empty.
std::string format_code(const std::string& code);
/// Half-integer turn count. Escaping branches: the trailing run of the escape
/// arm's symbol is dropped and the remaining alternating prefix of length L
/// gives L/2. Heteroclinic branches: crossings / 2.
double full_turns(const BranchTrace& t);

enum class Kind { I, II, III, IV, D1, D2, symmetric_degenerate };
const char* to_string(Kind k) noexcept;

struct Classification {
  Kind kind = Kind::I;
  int n = 0;
  BranchTrace pos;
  BranchTrace neg;
  std::string caveat;
};

/// Pattern match of the two branches of W^u(E-). Error{undecided} if a
/// branch did not terminate or the codes fit no pattern.
Classification classify(const BranchTrace& pos, const BranchTrace& neg);

/// The four 1D branches plus the two collision orbits of W^u(E+).
struct BranchSet {
  BranchTrace u_plus, u_minus;  // W^u_{+-}(E-)
  BranchTrace s_plus, s_minus;  // W^s_{+-}(E+)
  BranchTrace p_plus, p_minus;  // W^u(E+) on r = 0, crossings p_j^{+-}
};

BranchSet trace_all(const PotentialModel& m, double h = kDefaultEnergy,
                    const TraceOptions& opt = {});

/// Classification from the unstable branches of a traced set.
Classification classify(const BranchSet& set);

/// Named point of the sequences u, s, p, q.
struct SeqTerm {
  char kind = 'u';  // u, s, p, q
  Sign sign = Sign::plus;
  int index = 1;
  std::string label() const;
};

struct OrderingReport {
  int checked = 0;
  std::vector<std::string> violations;
  bool ok() const noexcept { return violations.empty() && checked > 0; }
};

/// Chain of the v-ordering along the collision line of `side` for the given
/// type, truncated so that no index exceeds `max_index`.
std::vector<SeqTerm> ordering_chain(Kind kind, int n, Side side, int max_index);

/// v-value of a term from traced data, if it exists and lies on `side`.
std::optional<double> term_value(const SeqTerm& t, const BranchSet& set, Side side);

/// Checks every adjacent inequality of both chains that the traced data allows.
OrderingReport ordering_check(const Classification& c, const BranchSet& set);

/// q_1^- < u_1^+, s_1^- < p_1^+, q_1^+ < u_1^-, s_1^+ < p_1^-.
OrderingReport first_crossing_order(const BranchSet& set);

}  // namespace ecotrace
