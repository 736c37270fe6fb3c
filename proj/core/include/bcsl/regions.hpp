#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bcsl/channel.hpp"
#include "bcsl/orderings.hpp"

namespace bcsl {

inline constexpr double kMarkovTol = 1e-9;

enum class BoundId { Inner3DM, Outer3DM, OuterNoSecrecy, InnerType1, OuterType1, RegionType2 };
const char* bound_name(BoundId id);
BoundId bound_from_name(const std::string& s);  // accepts "inner3dm", "Inner3DM", ...

// Rate symbols in fixed order.
enum RateIdx { kR0 = 0, kR1 = 1, kR1e = 2, kR2 = 3, kR2e = 4 };
inline constexpr int kNumRates = 5;
inline const char* const kRateNames[kNumRates] = {"R0", "R1", "R1e", "R2", "R2e"};

struct RateTuple {
  std::array<double, kNumRates> r{};
  double operator[](int i) const { return r[static_cast<std::size_t>(i)]; }
};

struct MarkovResidual {
  std::string chain;  // e.g. "U1->U2->(U3,X)"
  double residual = 0.0;
};

std::vector<MarkovResidual> check_markov(const AuxJoint& aux);
bool markov_ok(const std::vector<MarkovResidual>& r);

// coef . rates <= rhs
struct RateRow {
  std::array<double, kNumRates> coef{};
  double rhs = 0.0;
  std::string tag;
};

struct SideCondition {
  std::string tag;
  std::string text;  // "lhs <= rhs" in symbols
  double lhs = 0.0, rhs = 0.0;
  bool satisfied = true;
};

struct RatePolytope {
  BoundId id = BoundId::Inner3DM;
  std::vector<RateRow> rows;
  std::vector<SideCondition> conditions;
  std::map<std::string, double> terms;  // every information value used, by symbol
  std::vector<std::string> notes;
  bool precondition_verified = true;

  const RateRow& row(const std::string& tag) const;
  bool conditions_ok() const;
  // Largest violation of coef.r <= rhs (<= 0 means inside).
  double violation(const RateTuple& t) const;
};

struct BoundOptions {
  // Ordering evidence: more capable (1,3) for the outer bounds; less noisy (1,3)
  // and (2,3) for the Type 2 region. Degraded or less-noisy verdicts also count
  // as evidence for more capable.
  std::vector<OrderingReport> orderings;
  bool assume_ordering = false;  // override: output is marked "condition unverified"
  bool check_markov = true;
};

RatePolytope eval_bound(BoundId id, const Channel3& ch, const AuxJoint& aux, const BoundOptions& opt = {});

struct Cor3Row {
  std::string tag;
  double value = 0.0;  // right-hand side in the single-auxiliary region
  double inner_residual = 0.0, outer_residual = 0.0;
  std::string inner_tag, outer_tag;
};

struct Cor3Report {
  std::vector<Cor3Row> rows;
  double max_residual = 0.0;
  bool match = false;
  std::vector<std::string> inner_extra, outer_extra;  // collapsed rows with no single-aux counterpart
  std::vector<std::string> notes;
  bool precondition_verified = true;
};

// Per-row residual tolerance for the collapse check.
inline constexpr double kCor3Tol = 1e-9;

// pux: p(u,x) flattened [u][x].
Cor3Report eval_cor3_match(const Channel3& ch, std::size_t mu, const std::vector<double>& pux,
                           const BoundOptions& opt = {});

struct FrontierConfig {
  std::size_t m1 = 0, m2 = 0, m3 = 0;  // 0 means nx + 1
  int restarts = 16;
  int iters = 300;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct FrontierResult {
  RateTuple rates;
  AuxJoint aux{1, 1, 1, 1, {1.0}};
  double value = 0.0;
  bool feasible = false;
  int best_restart = -1;
  std::vector<std::string> notes;
};

// LP over one polytope plus rate nonnegativity. Returns false when infeasible.
bool solve_weighted(const RatePolytope& poly, const std::array<double, kNumRates>& w, RateTuple& out,
                    double& value);

FrontierResult max_weighted_rate(BoundId id, const Channel3& ch, const std::array<double, kNumRates>& weights,
                                 const FrontierConfig& cfg, const BoundOptions& opt = {});

std::string polytope_to_json(const RatePolytope& p);
std::string cor3_to_json(const Cor3Report& r);

}  // namespace bcsl
