#include "ecotrace/manifolds1d.hpp"

#include <cmath>
#include <sstream>

#include "ecotrace/error.hpp"

namespace ecotrace {

const char* to_string(BranchOrigin o) noexcept {
  switch (o) {
    case BranchOrigin::unstable_of_eminus: return "unstable_of_eminus";
    case BranchOrigin::stable_of_eplus: return "stable_of_eplus";
    case BranchOrigin::collision_unstable_of_eplus: return "collision_unstable_of_eplus";
  }
  return "?";
}

const char* to_string(BranchEnd e) noexcept {
  switch (e) {
    case BranchEnd::escape: return "escape";
    case BranchEnd::heteroclinic: return "heteroclinic";
    case BranchEnd::undecided: return "undecided";
  }
  return "?";
}

const char* to_string(Kind k) noexcept {
  switch (k) {
    case Kind::I: return "I";
    case Kind::II: return "II";
    case Kind::III: return "III";
    case Kind::IV: return "IV";
    case Kind::D1: return "D1";
    case Kind::D2: return "D2";
    case Kind::symmetric_degenerate: return "symmetric_degenerate";
  }
  return "?";
}

namespace {

BranchTrace run_branch(const EquilibriumInfo& eq, const Vec4& dir, double sgn, bool backward,
                       BranchOrigin origin, Sign sign, const PotentialModel& m,
                       const TraceOptions& opt) {
  Vec4 a = eq.state.to_array();
  for (int i = 0; i < 4; ++i) a[i] += sgn * opt.eps * dir[i];
  RegState seed = RegState::from_array(a);
  seed.r = 0.0;
  if (!solve_shell_v(seed, eq.h, m, eq.state.v))
    throw Error(ErrorCode::projection, "trace_branch: seed could not be put on the energy shell");

  StopRules stop;
  stop.stop_after_crossings = opt.max_crossings + 1;
  stop.ball = opt.ball;
  stop.record_samples = opt.keep_samples;
  Orbit o = integrate(seed, eq.h, m, 0.0, backward ? -1e7 : 1e7, opt.integ, stop);

  BranchTrace t;
  t.origin = origin;
  t.sign = sign;
  t.eps = opt.eps;
  t.crossings = o.crossings;
  if (static_cast<int>(t.crossings.size()) > opt.max_crossings)
    t.crossings.resize(opt.max_crossings);
  for (auto& c : t.crossings) c.index += 1;  // 1-based, as u_j, s_j
  switch (o.termination) {
    case Termination::escaped:
      t.end = BranchEnd::escape;
      t.arm = o.arm;
      break;
    case Termination::near_equilibrium:
      t.target = o.which;
      t.end = o.which != eq.which ? BranchEnd::heteroclinic : BranchEnd::undecided;
      break;
    default:
      t.end = BranchEnd::undecided;
  }
  t.code = code_of(t);
  t.full_turns = full_turns(t);
  if (opt.keep_samples) {
    t.s = std::move(o.s);
    t.samples = std::move(o.states);
  }
  return t;
}

}  // namespace

BranchTrace trace_branch(const EquilibriumInfo& eq, Sign sign, const PotentialModel& m,
                         const TraceOptions& opt) {
  if (eq.which == Which::eminus) {
    // w > 0 along +e_unstable
    return run_branch(eq, eq.e_unstable, sign == Sign::plus ? 1.0 : -1.0, false,
                      BranchOrigin::unstable_of_eminus, sign, m, opt);
  }
  // e_stable has w < 0
  return run_branch(eq, eq.e_stable, sign == Sign::plus ? -1.0 : 1.0, true,
                    BranchOrigin::stable_of_eplus, sign, m, opt);
}

BranchTrace trace_collision_branch(const EquilibriumInfo& eplus, Sign sign,
                                   const PotentialModel& m, const TraceOptions& opt) {
  if (eplus.which != Which::eplus)
    throw Error(ErrorCode::invalid_argument, "trace_collision_branch: needs E+");
  return run_branch(eplus, eplus.e_unstable, sign == Sign::plus ? 1.0 : -1.0, false,
                    BranchOrigin::collision_unstable_of_eplus, sign, m, opt);
}

std::string code_of(const BranchTrace& t) {
  std::string s;
  s.reserve(t.crossings.size());
  for (const auto& c : t.crossings) s.push_back(side_symbol(c.side));
  return s;
}

std::string format_code(const std::string& code) {
  if (code.empty()) return "()";
  std::string out;
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (i) out.push_back(',');
    out.push_back(code[i]);
  }
  return out;
}

double full_turns(const BranchTrace& t) {
  const std::string code = code_of(t);
  if (t.end != BranchEnd::escape) return 0.5 * static_cast<double>(code.size());
  const char arm = t.arm == Arm::right ? 'b' : 'a';
  std::size_t len = code.size();
  while (len > 0 && code[len - 1] == arm) --len;
  return 0.5 * static_cast<double>(len);
}

namespace {

bool alternating(const std::string& code, std::size_t len, char first) {
  for (std::size_t i = 0; i < len && i < code.size(); ++i) {
    const char want = (i % 2 == 0) ? first : (first == 'a' ? 'b' : 'a');
    if (code[i] != want) return false;
  }
  return true;
}

}  // namespace

Classification classify(const BranchTrace& pos, const BranchTrace& neg) {
  if (pos.end == BranchEnd::undecided || neg.end == BranchEnd::undecided)
    throw Error(ErrorCode::undecided, "classify: a branch neither escaped nor reached E+");
  Classification c;
  c.pos = pos;
  c.neg = neg;
  const bool pos_het = pos.end == BranchEnd::heteroclinic;
  const bool neg_het = neg.end == BranchEnd::heteroclinic;
  const char* caveat = "heteroclinic decided by entry into the equilibrium ball";
  if (pos_het && neg_het) {
    c.kind = Kind::symmetric_degenerate;
    c.n = static_cast<int>(std::floor(pos.full_turns));
    c.caveat = caveat;
    return c;
  }
  if (pos_het) {
    c.kind = Kind::D1;
    c.n = static_cast<int>(std::floor(pos.full_turns));
    c.caveat = caveat;
    return c;
  }
  if (neg_het) {
    c.kind = Kind::D2;
    c.n = static_cast<int>(std::floor(neg.full_turns));
    c.caveat = caveat;
    return c;
  }
  const double tp = pos.full_turns, tn = neg.full_turns;
  const bool pos_int = tp == std::floor(tp), neg_int = tn == std::floor(tn);
  const bool pr = pos.arm == Arm::right, nr = neg.arm == Arm::right;
  const int n_pos = static_cast<int>(std::floor(tp)), n_neg = static_cast<int>(std::floor(tn));
  if (pr && !nr && pos_int && neg_int && n_pos == n_neg) {
    c.kind = Kind::I;
  } else if (!pr && nr && !pos_int && !neg_int && n_pos == n_neg) {
    c.kind = Kind::II;
  } else if (pr && nr && pos_int && !neg_int && n_pos == n_neg) {
    c.kind = Kind::III;
  } else if (!pr && !nr && !pos_int && neg_int && n_pos == n_neg) {
    c.kind = Kind::IV;
  } else {
    throw Error(ErrorCode::undecided, "classify: codes " + format_code(pos.code) + " / " +
                                          format_code(neg.code) + " fit no known type");
  }
  c.n = n_pos;
  if (!alternating(pos.code, static_cast<std::size_t>(2 * tp), 'b') ||
      !alternating(neg.code, static_cast<std::size_t>(2 * tn), 'a'))
    throw Error(ErrorCode::undecided, "classify: branch codes do not alternate before escape");
  return c;
}

BranchSet trace_all(const PotentialModel& m, double h, const TraceOptions& opt) {
  const auto [ep, em] = find_equilibria(m, h);
  BranchSet s;
  s.u_plus = trace_branch(em, Sign::plus, m, opt);
  s.u_minus = trace_branch(em, Sign::minus, m, opt);
  s.s_plus = trace_branch(ep, Sign::plus, m, opt);
  s.s_minus = trace_branch(ep, Sign::minus, m, opt);
  s.p_plus = trace_collision_branch(ep, Sign::plus, m, opt);
  s.p_minus = trace_collision_branch(ep, Sign::minus, m, opt);
  return s;
}

Classification classify(const BranchSet& set) { return classify(set.u_plus, set.u_minus); }

std::string SeqTerm::label() const {
  return std::string(1, kind) + std::to_string(index) + sign_char(sign);
}

namespace {

Sign flip(Sign s) { return s == Sign::plus ? Sign::minus : Sign::plus; }
Sign odd_plus(int k) { return k % 2 == 1 ? Sign::plus : Sign::minus; }

std::vector<SeqTerm> flipped(std::vector<SeqTerm> c) {
  for (auto& t : c) t.sign = flip(t.sign);
  return c;
}

// Chains on Sigma_b (Types I, II) and the Type III chains on both sides.
std::vector<SeqTerm> chain_I_b(int n, int J) {
  std::vector<SeqTerm> c;
  for (int j = J; j >= 2 * n + 1; --j) c.push_back({'s', Sign::minus, j});
  for (int k = 1; k <= 2 * n; ++k) {
    c.push_back({'u', odd_plus(k), k});
    c.push_back({'s', odd_plus(k), 2 * n + 1 - k});
  }
  for (int j = 2 * n + 1; j <= J; ++j) c.push_back({'u', Sign::plus, j});
  return c;
}

std::vector<SeqTerm> chain_II_b(int n, int J) {
  std::vector<SeqTerm> c;
  for (int j = J; j >= 2 * n + 2; --j) c.push_back({'s', Sign::plus, j});
  for (int k = 1; k <= 2 * n + 1; ++k) {
    c.push_back({'u', odd_plus(k), k});
    c.push_back({'s', flip(odd_plus(k)), 2 * n + 2 - k});
  }
  for (int j = 2 * n + 2; j <= J; ++j) c.push_back({'u', Sign::minus, j});
  return c;
}

std::vector<SeqTerm> chain_III_b(int n, int J) {
  std::vector<SeqTerm> c;
  for (int j = J; j >= 2 * n + 2; --j) {
    c.push_back({'s', Sign::minus, j});
    c.push_back({'s', Sign::plus, j});
  }
  c.push_back({'s', Sign::minus, 2 * n + 1});
  for (int i = 1; i <= n; ++i) {
    c.push_back({'u', Sign::plus, 2 * i - 1});
    c.push_back({'u', Sign::minus, 2 * i});
    c.push_back({'s', Sign::plus, 2 * n + 2 - 2 * i});
    c.push_back({'s', Sign::minus, 2 * n + 1 - 2 * i});
  }
  c.push_back({'u', Sign::plus, 2 * n + 1});
  for (int j = 2 * n + 2; j <= J; ++j) {
    c.push_back({'u', Sign::minus, j});
    c.push_back({'u', Sign::plus, j});
  }
  return c;
}

std::vector<SeqTerm> chain_III_a(int n) {
  std::vector<SeqTerm> c;
  c.push_back({'u', Sign::minus, 1});
  for (int i = 1; i <= n; ++i) {
    c.push_back({'s', Sign::plus, 2 * n + 3 - 2 * i});
    c.push_back({'s', Sign::minus, 2 * n + 2 - 2 * i});
    c.push_back({'u', Sign::plus, 2 * i});
    c.push_back({'u', Sign::minus, 2 * i + 1});
  }
  c.push_back({'s', Sign::plus, 1});
  return c;
}

const BranchTrace* branch_of(const SeqTerm& t, const BranchSet& set) {
  switch (t.kind) {
    case 'u': return t.sign == Sign::plus ? &set.u_plus : &set.u_minus;
    case 's': return t.sign == Sign::plus ? &set.s_plus : &set.s_minus;
    case 'p': return t.sign == Sign::plus ? &set.p_plus : &set.p_minus;
    case 'q': return t.sign == Sign::plus ? &set.p_minus : &set.p_plus;  // q_j^{-+} = -p_j^{+-}
  }
  return nullptr;
}

}  // namespace

std::vector<SeqTerm> ordering_chain(Kind kind, int n, Side side, int max_index) {
  const int J = max_index;
  const bool b = side == Side::b;
  switch (kind) {
    case Kind::I: return b ? chain_I_b(n, J) : flipped(chain_I_b(n, J));
    case Kind::II: return b ? chain_II_b(n, J) : flipped(chain_II_b(n, J));
    case Kind::III: return b ? chain_III_b(n, J) : chain_III_a(n);
    case Kind::IV: return b ? flipped(chain_III_a(n)) : flipped(chain_III_b(n, J));
    default: return {};
  }
}

std::optional<double> term_value(const SeqTerm& t, const BranchSet& set, Side side) {
  const BranchTrace* br = branch_of(t, set);
  if (!br || t.index < 1 || t.index > static_cast<int>(br->crossings.size())) return std::nullopt;
  const SigmaCrossing& c = br->crossings[t.index - 1];
  if (c.side != side) return std::nullopt;
  return t.kind == 'q' ? -c.v : c.v;
}

OrderingReport ordering_check(const Classification& c, const BranchSet& set) {
  OrderingReport rep;
  int J = 0;
  for (const BranchTrace* b : {&set.u_plus, &set.u_minus, &set.s_plus, &set.s_minus})
    J = std::max(J, static_cast<int>(b->crossings.size()));
  for (Side side : {Side::b, Side::a}) {
    const auto chain = ordering_chain(c.kind, c.n, side, J);
    std::optional<std::pair<std::string, double>> prev;
    for (const auto& t : chain) {
      const auto v = term_value(t, set, side);
      if (!v) continue;
      if (prev) {
        ++rep.checked;
        if (!(prev->second < *v)) {
          std::ostringstream os;
          os.precision(12);
          os << "Sigma_" << side_symbol(side) << ": " << prev->first << " = " << prev->second
             << " !< " << t.label() << " = " << *v;
          rep.violations.push_back(os.str());
        }
      }
      prev = std::make_pair(t.label(), *v);
    }
  }
  return rep;
}

OrderingReport first_crossing_order(const BranchSet& set) {
  OrderingReport rep;
  const std::pair<SeqTerm, SeqTerm> pairs[] = {
      {{'q', Sign::minus, 1}, {'u', Sign::plus, 1}},
      {{'s', Sign::minus, 1}, {'p', Sign::plus, 1}},
      {{'q', Sign::plus, 1}, {'u', Sign::minus, 1}},
      {{'s', Sign::plus, 1}, {'p', Sign::minus, 1}},
  };
  for (const auto& [lo, hi] : pairs) {
    std::optional<double> a, b;
    for (Side side : {Side::a, Side::b}) {
      if (!a) a = term_value(lo, set, side);
      if (!b) b = term_value(hi, set, side);
    }
    ++rep.checked;
    if (!a || !b || !(*a < *b)) {
      std::ostringstream os;
      os.precision(12);
      os << lo.label() << " < " << hi.label() << " fails";
      if (a && b) os << " (" << *a << " vs " << *b << ")";
      rep.violations.push_back(os.str());
    }
  }
  return rep;
}

}  // namespace ecotrace
