#include "bcsl/regions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "bcsl/error.hpp"
#include "bcsl/lp.hpp"
#include "bcsl/parallel.hpp"
#include "bcsl/rng.hpp"

namespace bcsl {

const char* bound_name(BoundId id) {
  switch (id) {
    case BoundId::Inner3DM:
      return "inner3dm";
    case BoundId::Outer3DM:
      return "outer3dm";
    case BoundId::OuterNoSecrecy:
      return "outer_nosecrecy";
    case BoundId::InnerType1:
      return "inner_type1";
    case BoundId::OuterType1:
      return "outer_type1";
    default:
      return "region_type2";
  }
}

BoundId bound_from_name(const std::string& s) {
  std::string k;
  for (char c : s)
    if (c != '_' && c != '-') k += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (k == "inner3dm") return BoundId::Inner3DM;
  if (k == "outer3dm") return BoundId::Outer3DM;
  if (k == "outernosecrecy") return BoundId::OuterNoSecrecy;
  if (k == "innertype1") return BoundId::InnerType1;
  if (k == "outertype1") return BoundId::OuterType1;
  if (k == "regiontype2") return BoundId::RegionType2;
  throw UsageError("unknown bound '" + s +
                   "' (expected inner3dm, outer3dm, outer_nosecrecy, inner_type1, outer_type1, region_type2)");
}

std::vector<MarkovResidual> check_markov(const AuxJoint& aux) {
  JointPmf j = aux.joint();
  return {
      {"U1->U2->(U3,X)", conditional_mi(j, {"U1"}, {"U3", "X"}, {"U2"})},
      {"U1->U3->(U2,X)", conditional_mi(j, {"U1"}, {"U2", "X"}, {"U3"})},
      {"U1->(U2,U3)->X", conditional_mi(j, {"U1"}, {"X"}, {"U2", "U3"})},
  };
}

bool markov_ok(const std::vector<MarkovResidual>& r) {
  return std::all_of(r.begin(), r.end(), [](const MarkovResidual& m) { return m.residual <= kMarkovTol; });
}

const RateRow& RatePolytope::row(const std::string& tag) const {
  for (const auto& r : rows)
    if (r.tag == tag) return r;
  throw UsageError("polytope has no row '" + tag + "'");
}

bool RatePolytope::conditions_ok() const {
  return std::all_of(conditions.begin(), conditions.end(), [](const SideCondition& c) { return c.satisfied; });
}

double RatePolytope::violation(const RateTuple& t) const {
  double v = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    double s = -r.rhs;
    for (int i = 0; i < kNumRates; ++i) s += r.coef[i] * t[i];
    v = std::max(v, s);
  }
  return v;
}

namespace {

std::string group_text(const Axes& g) {
  std::string s;
  for (std::size_t i = 0; i < g.size(); ++i) s += (i ? "," : "") + g[i];
  return s;
}

// Evaluates and records information terms by their canonical symbol.
class Terms {
 public:
  explicit Terms(const JointPmf& j, std::map<std::string, double>& out) : j_(j), out_(out) {}

  double operator()(const Axes& a, const Axes& b, const Axes& c = {}) {
    std::string name = "I(" + group_text(a) + ";" + group_text(b) + (c.empty() ? "" : "|" + group_text(c)) + ")";
    auto it = out_.find(name);
    if (it != out_.end()) return it->second;
    double v = c.empty() ? mutual_information(j_, a, b) : conditional_mi(j_, a, b, c);
    out_[name] = v;
    return v;
  }

 private:
  const JointPmf& j_;
  std::map<std::string, double>& out_;
};

struct RowBuilder {
  std::vector<RateRow>& rows;
  void add(std::initializer_list<std::pair<int, double>> coef, double rhs, const std::string& tag) {
    RateRow r;
    for (auto [i, c] : coef) r.coef[static_cast<std::size_t>(i)] = c;
    r.rhs = rhs;
    r.tag = tag;
    rows.push_back(std::move(r));
  }
};

bool evidence(const std::vector<OrderingReport>& reps, int a, int b, bool need_less_noisy) {
  for (const auto& r : reps) {
    if (r.a != a || r.b != b || r.verdict != Verdict::True) continue;
    if (r.predicate == "degraded" || r.predicate == "less_noisy") return true;
    if (!need_less_noisy && r.predicate == "more_capable") return true;
  }
  return false;
}

void require_ordering(RatePolytope& p, const BoundOptions& opt, bool type2) {
  bool ok = type2 ? evidence(opt.orderings, 1, 3, true) && evidence(opt.orderings, 2, 3, true)
                  : evidence(opt.orderings, 1, 3, false);
  if (ok) {
    p.notes.push_back(type2 ? "precondition verified: Y1 and Y2 less noisy than Y3 (search-certified)"
                            : "precondition verified: Y1 more capable than Y3 (search-certified)");
    return;
  }
  if (!opt.assume_ordering) {
    if (type2)
      throw DomainError("precondition not met: this region requires Y1 and Y2 to be less noisy than Y3; "
                        "supply true less_noisy ordering reports for pairs (1,3) and (2,3) or assume the ordering");
    throw DomainError("precondition not met: this bound requires that Y1 is more capable than Y3; "
                      "supply a true more_capable ordering report for pair (1,3) or assume the ordering");
  }
  p.precondition_verified = false;
  p.notes.push_back("condition unverified");
}

void add_condition(RatePolytope& p, const std::string& tag, const std::string& text, double lhs, double rhs) {
  p.conditions.push_back({tag, text, lhs, rhs, lhs <= rhs + kMarkovTol});
}

}  // namespace

RatePolytope eval_bound(BoundId id, const Channel3& ch, const AuxJoint& aux, const BoundOptions& opt) {
  if (aux.nx() != ch.nx()) throw UsageError("aux input alphabet does not match the channel");
  RatePolytope p;
  p.id = id;
  if (id != BoundId::RegionType2 && opt.check_markov) {
    for (const auto& m : check_markov(aux))
      if (m.residual > kMarkovTol) {
        std::ostringstream os;
        os << "auxiliary rejected: Markov chain " << m.chain << " violated (residual " << m.residual << " bits)";
        throw DomainError(os.str());
      }
  }
  JointPmf j = induced_joint(ch, aux);
  Terms I(j, p.terms);
  RowBuilder b{p.rows};
  const Axes X{"X"}, Y1{"Y1"}, Y2{"Y2"}, Y3{"Y3"}, U1{"U1"}, U2{"U2"}, U3{"U3"}, U23{"U2", "U3"};

  switch (id) {
    case BoundId::Inner3DM: {
      const double r1p = I(U2, Y3, U1), r2p = I(X, Y3, U2);
      const double h3 = I(U3, Y3), g2 = I(U2, Y2), g21 = I(U2, Y2, U1), jm = I(U2, U3, U1);
      const double a = I(X, Y1), bb = I(X, Y1, U1), c = I(X, Y1, U2), d = I(X, Y1, U23), e = I(X, Y1, U3);
      p.terms["R1'"] = r1p;
      p.terms["R2'"] = r2p;
      b.add({{kR1e, 1}, {kR1, -1}}, 0, "inner.r1e_le_r1");
      b.add({{kR2e, 1}, {kR2, -1}}, 0, "inner.r2e_le_r2");
      b.add({{kR0, 1}}, h3, "inner.r0");
      b.add({{kR1e, 1}}, g21 - r1p, "inner.r1e.u2");
      b.add({{kR1e, 1}}, e - r1p - r2p, "inner.r1e.x");
      b.add({{kR2e, 1}}, c - r2p, "inner.r2e");
      b.add({{kR1e, 1}, {kR2e, 1}}, bb - r1p - r2p, "inner.sum_e");
      b.add({{kR0, 1}, {kR1, 1}}, g2, "inner.r01.u2");
      b.add({{kR0, 1}, {kR1, 1}}, h3 + g21 - jm, "inner.r01.marton");
      b.add({{kR0, 2}, {kR1, 1}}, h3 + g2 - jm, "inner.2r01");
      b.add({{kR0, 1}, {kR2, 1}}, h3 + d, "inner.r02");
      b.add({{kR0, 1}, {kR1, 1}, {kR2, 1}}, h3 + e, "inner.r012.u3");
      b.add({{kR0, 1}, {kR1, 1}, {kR2, 1}}, a, "inner.r012.x");
      b.add({{kR0, 1}, {kR1, 1}, {kR2, 1}}, h3 + g21 - jm + d, "inner.r012.marton");
      b.add({{kR0, 2}, {kR1, 1}, {kR2, 1}}, h3 + g2 - jm + d, "inner.2r012");
      b.add({{kR0, 1}, {kR1, 2}, {kR2, 1}}, h3 + g21 - jm + e, "inner.r0_2r12");
      b.add({{kR0, 2}, {kR1, 2}, {kR2, 1}}, h3 + g2 - jm + e, "inner.2r0_2r12");
      add_condition(p, "inner.cond", "I(X;Y3|U2) <= I(X;Y1|U2,U3)", r2p, d);
      break;
    }
    case BoundId::Outer3DM:
    case BoundId::OuterNoSecrecy: {
      const bool sec = id == BoundId::Outer3DM;
      const std::string t = sec ? "outer" : "nosec";
      if (sec) {
        require_ordering(p, opt, false);
        p.notes.push_back("precondition applied to the whole bound, not only the secrecy rows");
      }
      const double u1 = I(U1, Y1), h3 = I(U3, Y3), d = I(X, Y1, U23), g21 = I(U2, Y2, U1);
      if (sec) {
        b.add({{kR1e, 1}, {kR1, -1}}, 0, "outer.r1e_le_r1");
        b.add({{kR2e, 1}, {kR2, -1}}, 0, "outer.r2e_le_r2");
      }
      b.add({{kR0, 1}}, u1, t + ".r0.u1");
      b.add({{kR0, 1}}, h3 - I(U3, Y1, U1), t + ".r0.u3");
      if (sec) {
        b.add({{kR1e, 1}}, g21 - I(U2, Y3, U1), "outer.r1e.u2");
        b.add({{kR1e, 1}}, I(X, Y1, U3) - I(X, Y3, U1), "outer.r1e.x");
        b.add({{kR2e, 1}}, I(X, Y1, U2) - I(X, Y3, U2), "outer.r2e");
        b.add({{kR1e, 1}, {kR2e, 1}}, I(X, Y1, U1) - I(X, Y3, U1), "outer.sum_e");
      }
      b.add({{kR0, 1}, {kR1, 1}}, I(U2, Y1), t + ".r01.u2y1");
      b.add({{kR0, 1}, {kR1, 1}}, I(U2, Y2), t + ".r01.u2y2");
      b.add({{kR0, 1}, {kR1, 1}}, u1 + g21, t + ".r01.u1");
      b.add({{kR0, 1}, {kR1, 1}}, h3 + I(U2, Y1, U1), t + ".r01.u3y1");
      b.add({{kR0, 1}, {kR1, 1}}, h3 + g21, t + ".r01.u3y2");
      b.add({{kR0, 1}, {kR2, 1}}, u1 + d, t + ".r02.u1");
      b.add({{kR0, 1}, {kR2, 1}}, h3 + d, t + ".r02.u3");
      b.add({{kR0, 1}, {kR1, 1}, {kR2, 1}}, I(X, Y1), t + ".r012.x");
      b.add({{kR0, 1}, {kR1, 1}, {kR2, 1}}, h3 + I(X, Y1, U3), t + ".r012.u3");
      b.add({{kR0, 1}, {kR1, 1}, {kR2, 1}}, u1 + g21 + d, t + ".r012.u1");
      b.add({{kR0, 1}, {kR1, 1}, {kR2, 1}}, h3 + g21 + d, t + ".r012.u3y2");
      b.add({{kR0, 1}, {kR1, 1}, {kR2, 1}}, I(U2, Y2) + d, t + ".r012.u2");
      p.notes.push_back("single auxiliary: one outer-bound certificate point, not the region");
      if (!sec) p.notes.push_back("equivocation rates are unconstrained by this bound");
      break;
    }
    case BoundId::InnerType1: {
      const double c2 = I(X, Y3, U2), delta2 = I(U2, Y3, U1) + c2;
      const double g2 = I(U2, Y2), h3 = I(U3, Y3), jm = I(U2, U3, U1), c = I(X, Y1, U2), e = I(X, Y1, U3);
      p.terms["Delta2"] = delta2;
      b.add({{kR1e, 1}, {kR1, -1}}, 0, "inner1.r1e_le_r1");
      b.add({{kR0, 1}}, g2, "inner1.r0.u2");
      b.add({{kR0, 1}}, h3, "inner1.r0.u3");
      b.add({{kR1e, 1}}, I(X, Y1, U1) - delta2, "inner1.r1e.u1");
      b.add({{kR1e, 1}}, c + e - c2 - delta2, "inner1.r1e.split");
      b.add({{kR0, 2}}, g2 + h3 - jm, "inner1.2r0");
      b.add({{kR0, 1}, {kR1, 1}}, I(X, Y1), "inner1.r01.x");
      b.add({{kR0, 1}, {kR1, 1}}, g2 + c, "inner1.r01.u2");
      b.add({{kR0, 1}, {kR1, 1}}, h3 + e, "inner1.r01.u3");
      b.add({{kR0, 2}, {kR1, 1}}, g2 + h3 - jm + I(X, Y1, U23), "inner1.2r01");
      b.add({{kR0, 2}, {kR1, 2}}, g2 + c + h3 + e - jm, "inner1.2r0_2r1");
      add_condition(p, "inner1.cond.u23", "I(X;Y3|U2) <= I(X;Y1|U2,U3)", c2, I(X, Y1, U23));
      add_condition(p, "inner1.cond.u2", "I(X;Y3|U2) <= I(X;Y1|U2)", c2, c);
      break;
    }
    case BoundId::OuterType1: {
      require_ordering(p, opt, false);
      const double u1 = I(U1, Y1);
      b.add({{kR1e, 1}, {kR1, -1}}, 0, "outer1.r1e_le_r1");
      b.add({{kR0, 1}}, u1, "outer1.r0.u1");
      b.add({{kR0, 1}}, I(U2, Y2) - I(U2, Y1, U1), "outer1.r0.u2");
      b.add({{kR0, 1}}, I(U3, Y3) - I(U3, Y1, U1), "outer1.r0.u3");
      b.add({{kR1e, 1}}, I(X, Y1, U1) - I(X, Y3, U1), "outer1.r1e");
      b.add({{kR0, 1}, {kR1, 1}}, I(X, Y1), "outer1.r01.x");
      b.add({{kR0, 1}, {kR1, 1}}, I(U2, Y2) + I(X, Y1, U2), "outer1.r01.u2");
      b.add({{kR0, 1}, {kR1, 1}}, I(U3, Y3) + I(X, Y1, U3), "outer1.r01.u3");
      p.notes.push_back("single auxiliary: one outer-bound certificate point, not the region");
      break;
    }
    case BoundId::RegionType2: {
      require_ordering(p, opt, true);
      // Single auxiliary U read from the U1 axis.
      const Axes U{"U1"};
      b.add({{kR1e, 1}, {kR1, -1}}, 0, "t2.r1e_le_r1");
      b.add({{kR0, 1}}, I(U, Y3), "t2.r0");
      b.add({{kR1e, 1}}, I(X, Y1, U) - I(X, Y3, U), "t2.r1e.y1");
      b.add({{kR1e, 1}}, I(X, Y2, U) - I(X, Y3, U), "t2.r1e.y2");
      b.add({{kR0, 1}, {kR1, 1}}, I(X, Y1), "t2.r01.y1");
      b.add({{kR0, 1}, {kR1, 1}}, I(X, Y2), "t2.r01.y2");
      p.notes.push_back("auxiliary U is taken from the U1 axis");
      break;
    }
  }
  if (id == BoundId::InnerType1 || id == BoundId::OuterType1 || id == BoundId::RegionType2) {
    // W2 is absent from these message structures.
    b.add({{kR2, 1}}, 0, "absent.r2");
    b.add({{kR2e, 1}}, 0, "absent.r2e");
  }
  return p;
}

Cor3Report eval_cor3_match(const Channel3& ch, std::size_t mu, const std::vector<double>& pux,
                           const BoundOptions& opt0) {
  Cor3Report rep;
  BoundOptions opt = opt0;
  {
    bool ok = evidence(opt.orderings, 1, 3, true) && evidence(opt.orderings, 2, 3, true);
    if (!ok && !opt.assume_ordering)
      throw DomainError("precondition not met: the single-auxiliary region requires Y1 and Y2 to be less noisy "
                        "than Y3; supply less_noisy reports for (1,3) and (2,3) or assume the ordering");
    rep.precondition_verified = ok;
    if (!ok) rep.notes.push_back("condition unverified");
  }
  AuxJoint aux = AuxJoint::from_single(mu, ch.nx(), pux);
  opt.check_markov = false;
  opt.assume_ordering = true;
  rep.notes.push_back("degenerate auxiliary U1 = U3 = U, U2 = X bypasses the Markov check by construction");
  RatePolytope in = eval_bound(BoundId::Inner3DM, ch, aux, opt);
  RatePolytope out = eval_bound(BoundId::Outer3DM, ch, aux, opt);
  RatePolytope t2 = eval_bound(BoundId::RegionType2, ch, aux, opt);

  auto collapse = [](const RatePolytope& p) {
    std::vector<RateRow> r;
    for (RateRow row : p.rows) {
      row.coef[kR2] = row.coef[kR2e] = 0.0;
      bool any = std::any_of(row.coef.begin(), row.coef.end(), [](double c) { return c != 0.0; });
      if (any) r.push_back(row);
    }
    return r;
  };
  auto ci = collapse(in), co = collapse(out);
  std::vector<bool> used_i(ci.size(), false), used_o(co.size(), false);
  auto best = [](const std::vector<RateRow>& rows, std::vector<bool>& used, const RateRow& target,
                 std::string& tag) {
    double res = std::numeric_limits<double>::infinity();
    std::size_t at = rows.size();
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].coef != target.coef) continue;
      double d = std::abs(rows[i].rhs - target.rhs);
      if (d < res) {
        res = d;
        at = i;
      }
    }
    if (at < rows.size()) {
      used[at] = true;
      tag = rows[at].tag;
    }
    return res;
  };
  for (const auto& row : t2.rows) {
    if (row.tag.rfind("absent.", 0) == 0) continue;
    Cor3Row r;
    r.tag = row.tag;
    r.value = row.rhs;
    r.inner_residual = best(ci, used_i, row, r.inner_tag);
    r.outer_residual = best(co, used_o, row, r.outer_tag);
    rep.max_residual = std::max({rep.max_residual, r.inner_residual, r.outer_residual});
    rep.rows.push_back(std::move(r));
  }
  rep.match = rep.max_residual <= kCor3Tol;
  auto extras = [](const std::vector<RateRow>& rows, const std::vector<bool>& used, std::vector<std::string>& out) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (!used[i]) out.push_back(rows[i].tag);
  };
  extras(ci, used_i, rep.inner_extra);
  extras(co, used_o, rep.outer_extra);
  return rep;
}

bool solve_weighted(const RatePolytope& poly, const std::array<double, kNumRates>& w, RateTuple& out,
                    double& value) {
  LpProblem<double> lp;
  lp.n = kNumRates;
  for (const auto& r : poly.rows) lp.add(std::vector<double>(r.coef.begin(), r.coef.end()), Rel::Le, r.rhs);
  // Every rate is at most the largest right-hand side in play; keeps the LP bounded
  // for bounds that leave some rates free.
  double cap = 0.0;
  for (const auto& r : poly.rows) cap = std::max(cap, std::abs(r.rhs));
  for (int i = 0; i < kNumRates; ++i) {
    std::vector<double> row(kNumRates, 0.0);
    row[static_cast<std::size_t>(i)] = 1.0;
    lp.add(row, Rel::Le, 2.0 * cap + 1.0);
  }
  lp.c.assign(w.begin(), w.end());
  auto res = solve_lp(lp);
  if (res.status != LpStatus::Optimal) return false;
  for (int i = 0; i < kNumRates; ++i) out.r[static_cast<std::size_t>(i)] = std::max(0.0, res.x[static_cast<std::size_t>(i)]);
  value = res.value;
  return true;
}

namespace {

// Search parametrization that satisfies all three Markov chains by construction:
// U1 = f(U2) = g(U3), p(u1) p(u2,u3|u1) on f^-1(u1) x g^-1(u1), then p(x|u2,u3).
struct AuxParams {
  std::size_t m1, m2, m3, nx;
  std::vector<std::size_t> f, g;
  std::vector<std::vector<double>> blocks;  // [0]=p(u1), [1..m1]=p(u2,u3|u1), then p(x|u2,u3)

  AuxJoint build() const {
    std::vector<double> p(m1 * m2 * m3 * nx, 0.0);
    for (std::size_t u1 = 0; u1 < m1; ++u1) {
      const auto& pair = blocks[1 + u1];
      std::size_t k = 0;
      for (std::size_t u2 = 0; u2 < m2; ++u2) {
        if (f[u2] != u1) continue;
        for (std::size_t u3 = 0; u3 < m3; ++u3) {
          if (g[u3] != u1) continue;
          const auto& px = blocks[1 + m1 + u2 * m3 + u3];
          for (std::size_t x = 0; x < nx; ++x)
            p[((u1 * m2 + u2) * m3 + u3) * nx + x] = blocks[0][u1] * pair[k] * px[x];
          ++k;
        }
      }
    }
    double s = 0.0;
    for (double v : p) s += v;
    for (double& v : p) v /= s;
    return AuxJoint(m1, m2, m3, nx, std::move(p));
  }
};

// Single-auxiliary parametrization for the Type 2 region: p(u) p(x|u).
AuxJoint build_single(std::size_t mu, std::size_t nx, const std::vector<std::vector<double>>& blocks) {
  std::vector<double> pux(mu * nx);
  for (std::size_t u = 0; u < mu; ++u)
    for (std::size_t x = 0; x < nx; ++x) pux[u * nx + x] = blocks[0][u] * blocks[1 + u][x];
  return AuxJoint::from_single(mu, nx, pux);
}

}  // namespace

FrontierResult max_weighted_rate(BoundId id, const Channel3& ch, const std::array<double, kNumRates>& weights,
                                 const FrontierConfig& cfg, const BoundOptions& opt0) {
  if (std::all_of(weights.begin(), weights.end(), [](double w) { return w == 0.0; }))
    throw UsageError("weights must not all be zero");
  for (double w : weights)
    if (w < 0.0 || !std::isfinite(w)) throw UsageError("weights must be nonnegative and finite");
  if (cfg.restarts < 1 || cfg.iters < 0) throw UsageError("restarts must be >= 1 and iters >= 0");
  const std::size_t nx = ch.nx();
  const std::size_t m1 = cfg.m1 ? cfg.m1 : nx + 1, m2 = cfg.m2 ? cfg.m2 : nx + 1, m3 = cfg.m3 ? cfg.m3 : nx + 1;
  const bool single = id == BoundId::RegionType2;
  BoundOptions opt = opt0;
  // Validate the precondition once up front so a failure is reported, not swallowed.
  {
    AuxJoint probe = single ? AuxJoint::from_single(1, nx, std::vector<double>(nx, 1.0 / nx))
                            : AuxJoint(1, 1, 1, nx, std::vector<double>(nx, 1.0 / nx));
    eval_bound(id, ch, probe, opt);
  }
  opt.check_markov = false;  // the parametrization guarantees the chains

  struct Outcome {
    bool feasible = false;
    double value = -std::numeric_limits<double>::infinity();
    RateTuple rates;
    std::vector<std::vector<double>> blocks;
    std::vector<std::size_t> f, g;
    std::string failed;
  };
  std::vector<Outcome> outs(static_cast<std::size_t>(cfg.restarts));

  parallel_for(outs.size(), resolve_threads(cfg.threads), [&](std::size_t r) {
    Rng rng(cfg.seed, Stream::Search, r);
    AuxParams ap{m1, m2, m3, nx, {}, {}, {}};
    std::vector<std::vector<double>> blocks;
    if (single) {
      blocks.push_back(rng.dirichlet(m1));
      for (std::size_t u = 0; u < m1; ++u) blocks.push_back(rng.dirichlet(nx, 0.5));
    } else {
      // Surjective-where-possible label maps, shuffled.
      for (std::size_t i = 0; i < m2; ++i) ap.f.push_back(i < m1 ? i : rng.below(m1));
      for (std::size_t i = 0; i < m3; ++i) ap.g.push_back(i < m1 ? i : rng.below(m1));
      for (std::size_t i = m2; i-- > 1;) std::swap(ap.f[i], ap.f[rng.below(i + 1)]);
      for (std::size_t i = m3; i-- > 1;) std::swap(ap.g[i], ap.g[rng.below(i + 1)]);
      blocks.push_back(rng.dirichlet(m1));
      for (std::size_t u1 = 0; u1 < m1; ++u1) {
        std::size_t a = static_cast<std::size_t>(std::count(ap.f.begin(), ap.f.end(), u1));
        std::size_t c = static_cast<std::size_t>(std::count(ap.g.begin(), ap.g.end(), u1));
        blocks.push_back(a > 0 && c > 0 ? rng.dirichlet(a * c, 0.5) : std::vector<double>{});
      }
      for (std::size_t k = 0; k < m2 * m3; ++k) blocks.push_back(rng.dirichlet(nx, 0.5));
    }
    auto evaluate = [&](const std::vector<std::vector<double>>& bl, RateTuple& rt, std::string& why) {
      AuxJoint aux = single ? build_single(m1, nx, bl) : (ap.blocks = bl, ap.build());
      RatePolytope poly = eval_bound(id, ch, aux, opt);
      for (const auto& c : poly.conditions)
        if (!c.satisfied) {
          why = c.tag + ": " + c.text;
          return -std::numeric_limits<double>::infinity();
        }
      double v;
      if (!solve_weighted(poly, weights, rt, v)) {
        why = "empty polytope";
        return -std::numeric_limits<double>::infinity();
      }
      return v;
    };
    Outcome& o = outs[r];
    RateTuple rt;
    std::string why;
    double cur = evaluate(blocks, rt, why);
    o.failed = why;
    if (std::isfinite(cur)) {
      o.feasible = true;
      o.value = cur;
      o.rates = rt;
    }
    std::vector<double> step(blocks.size(), 0.5);
    for (int it = 0; it < cfg.iters; ++it) {
      std::size_t bi = static_cast<std::size_t>(it) % blocks.size();
      if (blocks[bi].size() < 2) continue;
      auto cand = blocks;
      auto& v = cand[bi];
      if (rng.uniform() < 0.5) {
        // Move toward a random vertex.
        std::size_t k = rng.below(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = (1.0 - step[bi]) * v[i] + (i == k ? step[bi] : 0.0);
      } else {
        for (auto& x : v) x += step[bi] * (rng.uniform() - 0.5);
        v = project_simplex(v);
      }
      RateTuple ct;
      std::string w;
      double val = evaluate(cand, ct, w);
      if (val > cur + 1e-12) {
        cur = val;
        blocks = std::move(cand);
        o.feasible = true;
        o.value = cur;
        o.rates = ct;
        step[bi] = std::min(0.9, step[bi] * 1.5);
      } else {
        step[bi] = std::max(1e-4, step[bi] * 0.7);
        if (!o.feasible && !w.empty()) o.failed = w;
      }
    }
    o.blocks = blocks;
    o.f = ap.f;
    o.g = ap.g;
  });

  FrontierResult res;
  for (std::size_t r = 0; r < outs.size(); ++r)
    if (outs[r].feasible && (!res.feasible || outs[r].value > res.value)) {
      res.feasible = true;
      res.value = outs[r].value;
      res.rates = outs[r].rates;
      res.best_restart = static_cast<int>(r);
    }
  if (!res.feasible)
    throw DomainError("no feasible polytope found over " + std::to_string(cfg.restarts) +
                      " restarts; last violated condition: " + outs.front().failed);
  const Outcome& w = outs[static_cast<std::size_t>(res.best_restart)];
  if (single) {
    res.aux = build_single(m1, nx, w.blocks);
  } else {
    AuxParams ap{m1, m2, m3, nx, w.f, w.g, w.blocks};
    res.aux = ap.build();
  }
  res.notes.push_back(id == BoundId::Inner3DM || id == BoundId::InnerType1
                          ? "value is an achievable lower bound on the optimum over auxiliaries"
                          : "value is a heuristic search result for an outer bound");
  std::ostringstream os;
  os << "auxiliary cardinalities " << m1 << "," << (single ? m1 : m2) << "," << (single ? m1 : m3);
  res.notes.push_back(os.str());
  return res;
}

std::string polytope_to_json(const RatePolytope& p) {
  using nlohmann::json;
  json j;
  j["bound"] = bound_name(p.id);
  json rows = json::array();
  for (const auto& r : p.rows) {
    json c = json::object();
    for (int i = 0; i < kNumRates; ++i)
      if (r.coef[static_cast<std::size_t>(i)] != 0.0) c[kRateNames[i]] = r.coef[static_cast<std::size_t>(i)];
    rows.push_back({{"tag", r.tag}, {"coef", c}, {"rhs", r.rhs}});
  }
  j["rows"] = rows;
  json conds = json::array();
  for (const auto& c : p.conditions)
    conds.push_back({{"tag", c.tag}, {"text", c.text}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"satisfied", c.satisfied}});
  j["conditions"] = conds;
  j["terms"] = p.terms;
  j["notes"] = p.notes;
  j["precondition_verified"] = p.precondition_verified;
  return j.dump(2);
}

std::string cor3_to_json(const Cor3Report& r) {
  using nlohmann::json;
  json j;
  j["match"] = r.match;
  j["max_residual"] = r.max_residual;
  j["tolerance"] = kCor3Tol;
  json rows = json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"tag", x.tag},
                    {"value", x.value},
                    {"inner_row", x.inner_tag},
                    {"inner_residual", x.inner_residual},
                    {"outer_row", x.outer_tag},
                    {"outer_residual", x.outer_residual}});
  j["rows"] = rows;
  j["inner_extra"] = r.inner_extra;
  j["outer_extra"] = r.outer_extra;
  j["notes"] = r.notes;
  j["precondition_verified"] = r.precondition_verified;
  return j.dump(2);
}

}  // namespace bcsl
