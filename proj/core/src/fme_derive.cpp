// Fixture access and the canned derivations built on the elimination engine.

#include <algorithm>

#include <json.hpp>

#include "bcsl/error.hpp"
#include "bcsl/fme.hpp"

namespace bcsl::fme {

namespace detail {
const std::map<std::string, std::string>& fixture_table();
}

std::vector<std::string> fixture_names() {
  std::vector<std::string> r;
  for (const auto& [k, v] : detail::fixture_table()) r.push_back(k);
  return r;
}

const std::string& fixture_text(const std::string& name) {
  const auto& t = detail::fixture_table();
  auto it = t.find(name);
  if (it == t.end()) throw ValidationError("unknown fixture '" + name + "'");
  return it->second;
}

IneqSystem load_fixtures(const std::vector<std::string>& names) {
  std::vector<IneqSystem> parts;
  for (const auto& n : names) parts.push_back(parse_system(fixture_text(n)));
  return merge(parts);
}

namespace {

std::string derivation_json(const Derivation& d) {
  nlohmann::json j;
  j["order"] = d.order;
  j["input_rows"] = d.input.rows.size();
  j["derived_rows"] = d.derived.rows.size();
  j["target_rows"] = d.target.rows.size();
  j["remaining_vars"] = d.derived.vars;
  return j.dump();
}

Derivation run(const std::vector<std::string>& scheme, const std::vector<std::string>& target_parts,
               const std::vector<std::string>& default_order, const std::vector<std::string>& keep,
               const DeriveOptions& opt, const std::string& target_name) {
  Derivation d;
  std::vector<std::string> parts = scheme;
  parts.insert(parts.end(), opt.extra_fixtures.begin(), opt.extra_fixtures.end());
  IneqSystem in = load_fixtures(parts);
  in = drop_tags(in, opt.drop_tags);
  in = apply_subs(in);
  IneqSystem target = apply_subs(load_fixtures(target_parts));
  if (opt.without_identities) {
    in.identities.clear();
    target.identities.clear();
  }
  d.order = opt.order.empty() ? default_order : opt.order;
  for (const auto& v : d.order)
    if (!in.has_var(v)) throw ValidationError("elimination order names unknown variable '" + v + "'");
  d.input = in;
  d.derived = eliminate_all(in, d.order);
  d.target = canonicalize(target);
  d.report = compare(d.derived, d.target, "derived", target_name);
  for (const auto& v : d.derived.vars)
    if (std::find(keep.begin(), keep.end(), v) == keep.end())
      d.report.notes.push_back("variable " + v + " was not eliminated");
  d.report.notes.push_back(d.report.equivalent ? "derived region equals the stated region"
                                               : "derived region differs from the stated region");
  return d;
}

}  // namespace

Derivation derive_inner_bound(const DeriveOptions& opt) {
  return run({"base_codebook", "base_rx1", "base_rx23", "base_partition", "base_nonneg", "base_security",
              "delta_identity"},
             {"theorem1", "theorem1_link", "delta_identity"}, {"Q2", "Q3", "R1d", "P3d", "P1e", "P3"},
             {"R0", "R1e", "R2e"}, opt, "theorem1");
}

Derivation derive_type1_bound(const DeriveOptions& opt) {
  return run({"type1_codebook", "type1_rx1", "type1_rx23", "type1_partition", "type1_nonneg", "type1_security",
              "delta_identity"},
             {"corollary1", "type1_link", "delta_identity"}, {"Q2", "Q3", "P1e", "P2e", "P3"}, {"R0", "R1e"}, opt,
             "corollary1");
}

AppendixResult appendix_reduction(bool collapse_tilde_rates) {
  AppendixResult r;
  IneqSystem app = load_fixtures({"appendix_codebook", "appendix_rx1", "appendix_rx23", "appendix_nonneg"});
  if (collapse_tilde_rates) app = merge({app, load_fixtures({"appendix_collapse"})});
  app = apply_subs(app);
  app = rename_in_consts(app, "Ut2", "U1");
  app = merge({app, load_fixtures({"appendix_merge"})});
  if (collapse_tilde_rates) {
    // Collapsed nonnegativity rows become 0 <= 0 and drop out.
    app = canonicalize(app);
  } else {
    app = eliminate_all(app, {"Pt2", "Qt2"});
  }
  IneqSystem base = load_fixtures({"base_codebook", "base_rx1", "base_rx23", "base_nonneg", "p1e_nonneg"});
  base = eliminate_all(base, {"R1d", "P3d"});
  r.appendix = app;
  r.base = base;
  r.report = compare(app, base, "layered", "base");
  if (!collapse_tilde_rates) {
    // Projection of the layered system: the base system should imply it, not conversely.
    r.report.equivalent = r.report.backward.holds;
    r.report.notes.push_back(r.report.forward.holds ? "projection also implies the base system"
                                                    : "projection is strictly larger than the base system");
  }
  return r;
}

std::string derivation_summary_json(const Derivation& d) { return derivation_json(d); }

}  // namespace bcsl::fme
