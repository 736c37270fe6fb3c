#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace bcsl::fme {

using Q = mpq_class;
// Sparse linear form keyed by symbol name; zero coefficients are never stored.
using Lin = std::map<std::string, Q>;

// a.v (<= or <) c.k + c0, with v rate variables and k nonnegative MI constants.
struct Ineq {
  Lin a;
  Lin c;
  Q c0 = 0;
  bool strict = false;
  std::string tag;
  std::set<std::string> origin;  // tags of the input rows combined into this one
};

// c.k = c0 between constants.
struct Identity {
  Lin c;
  Q c0 = 0;
  std::string tag;
};

// var := a.v + c.k + c0, applied at build time.
struct Substitution {
  std::string var;
  Lin a;
  Lin c;
  Q c0 = 0;
  std::string tag;
};

struct IneqSystem {
  std::vector<std::string> vars;
  std::vector<std::string> consts;
  std::vector<Ineq> rows;
  std::vector<Identity> identities;
  std::vector<Substitution> subs;

  bool has_var(const std::string& v) const;
  bool has_const(const std::string& k) const;
  void add_var(const std::string& v);
  void add_const(const std::string& k);
};

// Canonical spelling of an information symbol: whitespace removed, names inside
// each group sorted. "I(X;Y1|U3,U1)" -> "I(X;Y1|U1,U3)". Other names pass through.
std::string canonical_const(const std::string& name);

IneqSystem parse_system(const std::string& text);
std::string print_system(const IneqSystem& s);
std::string print_row(const IneqSystem& s, const Ineq& r);
bool same_system(const IneqSystem& a, const IneqSystem& b);

// Concatenates symbol tables (first occurrence wins), rows, identities, subs.
IneqSystem merge(const std::vector<IneqSystem>& parts);
// Applies pending substitutions and drops substituted variables.
IneqSystem apply_subs(const IneqSystem& s);
// Keeps rows whose tag does not start with any of the prefixes.
IneqSystem drop_tags(const IneqSystem& s, const std::vector<std::string>& prefixes);
// Replaces a variable name inside every information symbol, e.g. Ut2 -> U1, and
// re-canonicalizes so merged names collapse onto one constant.
IneqSystem rename_in_consts(const IneqSystem& s, const std::string& from, const std::string& to);

// Positive rescaling to a canonical leading coefficient, duplicate and trivial-row
// removal, then lexicographic sort by printed form.
IneqSystem canonicalize(const IneqSystem& s);

IneqSystem eliminate_var(const IneqSystem& s, const std::string& v);
IneqSystem remove_redundant(const IneqSystem& s);
IneqSystem eliminate_all(const IneqSystem& s, const std::vector<std::string>& order, bool prune = true);

// Farkas certificate that rows of a system imply a target row for every choice of
// nonnegative constants satisfying the declared identities:
//   sum lambda_i a_i = a_t
//   sum lambda_i c_i + sum mu_k E_k + slack = c_t,  slack >= 0
//   sum lambda_i c0_i - sum mu_k e0_k + tail = c0_t, tail >= 0
struct Certificate {
  std::vector<std::pair<std::size_t, Q>> lambda;  // (row index, multiplier > 0)
  std::vector<std::pair<std::size_t, Q>> mu;      // (identity index, multiplier)
  Lin slack;
  Q tail = 0;
};

std::optional<Certificate> implies(const IneqSystem& s, const Ineq& target);
// Exact re-check of a certificate.
bool verify(const IneqSystem& s, const Ineq& target, const Certificate& cert);
std::string certificate_text(const IneqSystem& s, const Certificate& cert);

enum class MatchKind { Exact, Redundancy, Error };
const char* match_name(MatchKind k);

struct RowCheck {
  std::string row;
  std::string tag;
  MatchKind kind = MatchKind::Error;
  std::optional<Certificate> cert;
  std::string cert_text;
};

struct Direction {
  std::string name;  // e.g. "derived => fixture"
  bool holds = true;
  std::vector<RowCheck> rows;
};

struct EquivalenceReport {
  Direction forward;   // A => B: every row of B certified from A
  Direction backward;  // B => A
  bool equivalent = false;
  std::vector<std::string> unmatched;
  std::vector<std::string> notes;
};

// Exact: one row of the source rescaled (identities allowed), no slack.
// Redundancy: certified, but only through a combination or positive slack.
// Error: no certificate.
Direction check_direction(const IneqSystem& from, const IneqSystem& to, const std::string& name);
EquivalenceReport compare(const IneqSystem& a, const IneqSystem& b, const std::string& a_name,
                          const std::string& b_name, bool one_way = false);

std::string report_to_json(const EquivalenceReport& r, const std::string& extra_json = "");

// Built-in fixtures.
std::vector<std::string> fixture_names();
const std::string& fixture_text(const std::string& name);
IneqSystem load_fixtures(const std::vector<std::string>& names);

struct DeriveOptions {
  std::vector<std::string> order;       // empty means the default order
  std::vector<std::string> drop_tags;   // tag prefixes removed from the input system
  std::vector<std::string> extra_fixtures;
  bool without_identities = false;      // drop declared identities (for mutation checks)
};

struct Derivation {
  IneqSystem input;
  IneqSystem derived;
  IneqSystem target;
  std::vector<std::string> order;
  EquivalenceReport report;
};

Derivation derive_inner_bound(const DeriveOptions& opt = {});
Derivation derive_type1_bound(const DeriveOptions& opt = {});
// Order, row counts and leftover variables as a JSON object.
std::string derivation_summary_json(const Derivation& d);

// collapse_tilde_rates: set the extra layer's rates to zero before comparing (two-way
// check). Otherwise they are eliminated and the base system must imply the projection.
struct AppendixResult {
  IneqSystem appendix;  // after substitution and renaming
  IneqSystem base;      // base system projected onto the shared variables
  EquivalenceReport report;
};
AppendixResult appendix_reduction(bool collapse_tilde_rates = true);

}  // namespace bcsl::fme
