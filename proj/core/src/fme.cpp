#include "bcsl/fme.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

#include "bcsl/error.hpp"
#include "bcsl/lp.hpp"

namespace bcsl::fme {

namespace {

void addto(Lin& l, const std::string& k, const Q& v) {
  if (sgn(v) == 0) return;
  auto it = l.find(k);
  if (it == l.end()) {
    l.emplace(k, v);
    return;
  }
  it->second += v;
  if (sgn(it->second) == 0) l.erase(it);
}

void axpy(Lin& dst, const Q& alpha, const Lin& src) {
  for (const auto& [k, v] : src) addto(dst, k, alpha * v);
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool is_info_symbol(const std::string& s) { return s.size() > 3 && s[0] == 'I' && s[1] == '('; }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string join_group(std::vector<std::string> g) {
  for (auto& x : g) x = trim(x);
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  std::string r;
  for (std::size_t i = 0; i < g.size(); ++i) r += (i ? "," : "") + g[i];
  return r;
}

// One parsed term: coefficient and symbol (empty symbol = scalar).
struct Term {
  Q coef;
  std::string sym;
};

[[noreturn]] void parse_fail(const std::string& line, const std::string& why) {
  throw ValidationError("inequality DSL: " + why + " in line: " + line);
}

std::vector<Term> parse_expr(const std::string& e, const std::string& line) {
  std::vector<Term> out;
  std::size_t i = 0;
  auto skip = [&] {
    while (i < e.size() && std::isspace(static_cast<unsigned char>(e[i]))) ++i;
  };
  skip();
  if (i == e.size()) parse_fail(line, "empty expression");
  while (true) {
    skip();
    if (i >= e.size()) break;
    int sign = 1;
    bool saw_sign = false;
    while (i < e.size() && (e[i] == '+' || e[i] == '-')) {
      if (e[i] == '-') sign = -sign;
      saw_sign = true;
      ++i;
      skip();
    }
    if (!out.empty() && !saw_sign) parse_fail(line, "missing operator between terms");
    Q coef = 1;
    bool has_num = false;
    if (i < e.size() && std::isdigit(static_cast<unsigned char>(e[i]))) {
      std::size_t j = i;
      while (j < e.size() && (std::isdigit(static_cast<unsigned char>(e[j])) || e[j] == '/')) ++j;
      try {
        coef = Q(e.substr(i, j - i));
        coef.canonicalize();
      } catch (const std::invalid_argument&) {
        parse_fail(line, "bad number '" + e.substr(i, j - i) + "'");
      }
      has_num = true;
      i = j;
      skip();
      if (i < e.size() && e[i] == '*') {
        ++i;
        skip();
      }
    }
    std::string sym;
    if (i + 1 < e.size() && e[i] == 'I' && e[i + 1] == '(') {
      std::size_t j = i + 2;
      int depth = 1;
      while (j < e.size() && depth > 0) {
        if (e[j] == '(') ++depth;
        if (e[j] == ')') --depth;
        ++j;
      }
      if (depth != 0) parse_fail(line, "unbalanced parenthesis");
      sym = canonical_const(e.substr(i, j - i));
      i = j;
    } else if (i < e.size() && (std::isalpha(static_cast<unsigned char>(e[i])) || e[i] == '_')) {
      std::size_t j = i;
      while (j < e.size() && (std::isalnum(static_cast<unsigned char>(e[j])) || e[j] == '_' || e[j] == '\'')) ++j;
      sym = e.substr(i, j - i);
      i = j;
    } else if (!has_num) {
      parse_fail(line, "unexpected character '" + std::string(1, i < e.size() ? e[i] : '?') + "'");
    }
    out.push_back({sign * coef, sym});
  }
  return out;
}

struct Split {
  Lin vars, consts;
  Q scalar = 0;
};

Split classify(IneqSystem& s, const std::vector<Term>& terms, const std::set<std::string>& declared_consts) {
  Split r;
  for (const auto& t : terms) {
    if (t.sym.empty()) {
      r.scalar += t.coef;
    } else if (is_info_symbol(t.sym) || declared_consts.count(t.sym)) {
      s.add_const(t.sym);
      addto(r.consts, t.sym, t.coef);
    } else {
      s.add_var(t.sym);
      addto(r.vars, t.sym, t.coef);
    }
  }
  return r;
}

std::string fmt_terms(const std::vector<std::pair<std::string, Q>>& terms, const Q& scalar, bool force_scalar) {
  std::string out;
  bool first = true;
  auto put = [&](const Q& coef, const std::string& name) {
    Q mag = abs(coef);
    std::string m = name.empty() ? mag.get_str() : (mag == 1 ? name : mag.get_str() + " " + name);
    if (first) {
      out += (sgn(coef) < 0 ? "-" : "") + m;
      first = false;
    } else {
      out += (sgn(coef) < 0 ? " - " : " + ") + m;
    }
  };
  for (const auto& [n, c] : terms) put(c, n);
  if (sgn(scalar) != 0 || (first && force_scalar)) put(scalar, "");
  return out;
}

std::vector<std::pair<std::string, Q>> ordered(const Lin& l, const std::vector<std::string>& order) {
  std::vector<std::pair<std::string, Q>> r;
  for (const auto& n : order) {
    auto it = l.find(n);
    if (it != l.end()) r.emplace_back(n, it->second);
  }
  // Symbols missing from the table still print, after the ordered ones.
  for (const auto& [n, c] : l)
    if (std::find(order.begin(), order.end(), n) == order.end()) r.emplace_back(n, c);
  return r;
}

std::string row_key(const IneqSystem& s, const Ineq& r) {
  std::string lhs = fmt_terms(ordered(r.a, s.vars), 0, true);
  std::string rhs = fmt_terms(ordered(r.c, s.consts), r.c0, true);
  return lhs + " <= " + rhs;
}

bool lin_nonneg(const Lin& l) {
  for (const auto& [k, v] : l)
    if (sgn(v) < 0) return false;
  return true;
}

}  // namespace

bool IneqSystem::has_var(const std::string& v) const { return std::find(vars.begin(), vars.end(), v) != vars.end(); }
bool IneqSystem::has_const(const std::string& k) const {
  return std::find(consts.begin(), consts.end(), k) != consts.end();
}
void IneqSystem::add_var(const std::string& v) {
  if (!has_var(v)) vars.push_back(v);
}
void IneqSystem::add_const(const std::string& k) {
  if (!has_const(k)) consts.push_back(k);
}

std::string canonical_const(const std::string& name) {
  std::string s;
  for (char ch : name)
    if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
  if (!is_info_symbol(s) || s.back() != ')') return s;
  std::string inner = s.substr(2, s.size() - 3);
  auto bar = split(inner, '|');
  auto ab = split(bar[0], ';');
  if (ab.size() != 2 || bar.size() > 2) return s;
  std::string r = "I(" + join_group(split(ab[0], ',')) + ";" + join_group(split(ab[1], ','));
  if (bar.size() == 2 && !trim(bar[1]).empty()) r += "|" + join_group(split(bar[1], ','));
  return r + ")";
}

IneqSystem parse_system(const std::string& text) {
  IneqSystem s;
  std::set<std::string> declared;
  std::istringstream in(text);
  std::string raw;
  int auto_tag = 0;
  while (std::getline(in, raw)) {
    std::string line = raw.substr(0, raw.find('#'));
    std::string tag;
    if (auto at = line.find('@'); at != std::string::npos) {
      tag = trim(line.substr(at + 1));
      line = line.substr(0, at);
    }
    line = trim(line);
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string kw;
    ls >> kw;
    if (kw == "var") {
      for (std::string n; ls >> n;) s.add_var(n);
      continue;
    }
    if (kw == "const") {
      for (std::string n; ls >> n;) {
        n = canonical_const(n);
        declared.insert(n);
        s.add_const(n);
      }
      continue;
    }
    if (kw == "nonneg") {
      for (std::string n; ls >> n;) {
        s.add_var(n);
        Ineq r;
        r.a[n] = -1;
        r.tag = "nonneg." + n;
        r.origin = {r.tag};
        s.rows.push_back(std::move(r));
      }
      continue;
    }
    if (tag.empty()) tag = "row" + std::to_string(++auto_tag);
    if (kw == "sub" || kw == "identity") {
      std::string body = trim(line.substr(kw.size()));
      auto eq = body.find('=');
      if (eq == std::string::npos) parse_fail(raw, "missing '='");
      auto lhs = classify(s, parse_expr(body.substr(0, eq), raw), declared);
      auto rhs = classify(s, parse_expr(body.substr(eq + 1), raw), declared);
      if (kw == "sub") {
        if (lhs.vars.size() != 1 || lhs.vars.begin()->second != 1 || !lhs.consts.empty() || sgn(lhs.scalar) != 0)
          parse_fail(raw, "substitution needs a single variable on the left");
        Substitution sub;
        sub.var = lhs.vars.begin()->first;
        sub.a = rhs.vars;
        sub.c = rhs.consts;
        sub.c0 = rhs.scalar;
        sub.tag = tag;
        if (sub.a.count(sub.var)) parse_fail(raw, "self-referential substitution");
        s.subs.push_back(std::move(sub));
      } else {
        if (!lhs.vars.empty() || !rhs.vars.empty()) parse_fail(raw, "identities relate constants only");
        Identity id;
        id.c = lhs.consts;
        axpy(id.c, -1, rhs.consts);
        id.c0 = rhs.scalar - lhs.scalar;
        id.tag = tag;
        s.identities.push_back(std::move(id));
      }
      continue;
    }
    // Plain (in)equality.
    static const char* ops[] = {"<=", ">=", "<", ">", "="};
    std::size_t pos = std::string::npos;
    std::string op;
    for (const char* o : ops) {
      auto p = line.find(o);
      if (p != std::string::npos && (pos == std::string::npos || p < pos || (p == pos && std::string(o).size() > op.size()))) {
        pos = p;
        op = o;
      }
    }
    if (pos == std::string::npos) parse_fail(raw, "no relation operator");
    auto lhs = classify(s, parse_expr(line.substr(0, pos), raw), declared);
    auto rhs = classify(s, parse_expr(line.substr(pos + op.size()), raw), declared);
    auto make = [&](const Split& lo, const Split& hi, bool strict, const std::string& t) {
      Ineq r;
      r.a = lo.vars;
      axpy(r.a, -1, hi.vars);
      r.c = hi.consts;
      axpy(r.c, -1, lo.consts);
      r.c0 = hi.scalar - lo.scalar;
      r.strict = strict;
      r.tag = t;
      r.origin = {t};
      s.rows.push_back(std::move(r));
    };
    if (op == "<=" || op == "<") make(lhs, rhs, op == "<", tag);
    if (op == ">=" || op == ">") make(rhs, lhs, op == ">", tag);
    if (op == "=") {
      make(lhs, rhs, false, tag + ".le");
      make(rhs, lhs, false, tag + ".ge");
    }
  }
  return s;
}

std::string print_row(const IneqSystem& s, const Ineq& r) {
  std::string lhs = fmt_terms(ordered(r.a, s.vars), 0, true);
  std::string rhs = fmt_terms(ordered(r.c, s.consts), r.c0, true);
  return lhs + (r.strict ? " < " : " <= ") + rhs;
}

std::string print_system(const IneqSystem& s) {
  std::ostringstream os;
  if (!s.vars.empty()) {
    os << "var";
    for (const auto& v : s.vars) os << ' ' << v;
    os << '\n';
  }
  if (!s.consts.empty()) {
    os << "const";
    for (const auto& c : s.consts) os << ' ' << c;
    os << '\n';
  }
  for (const auto& r : s.rows) os << print_row(s, r) << "  @" << r.tag << '\n';
  for (const auto& id : s.identities)
    os << "identity " << fmt_terms(ordered(id.c, s.consts), 0, true) << " = " << id.c0.get_str() << "  @" << id.tag
       << '\n';
  for (const auto& sub : s.subs) {
    auto terms = ordered(sub.a, s.vars);
    auto ct = ordered(sub.c, s.consts);
    terms.insert(terms.end(), ct.begin(), ct.end());
    os << "sub " << sub.var << " = " << fmt_terms(terms, sub.c0, true) << "  @" << sub.tag << '\n';
  }
  return os.str();
}

bool same_system(const IneqSystem& a, const IneqSystem& b) {
  if (a.vars != b.vars || a.consts != b.consts || a.rows.size() != b.rows.size() ||
      a.identities.size() != b.identities.size() || a.subs.size() != b.subs.size())
    return false;
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    const auto &x = a.rows[i], &y = b.rows[i];
    if (x.a != y.a || x.c != y.c || x.c0 != y.c0 || x.strict != y.strict || x.tag != y.tag) return false;
  }
  for (std::size_t i = 0; i < a.identities.size(); ++i) {
    const auto &x = a.identities[i], &y = b.identities[i];
    if (x.c != y.c || x.c0 != y.c0 || x.tag != y.tag) return false;
  }
  for (std::size_t i = 0; i < a.subs.size(); ++i) {
    const auto &x = a.subs[i], &y = b.subs[i];
    if (x.var != y.var || x.a != y.a || x.c != y.c || x.c0 != y.c0 || x.tag != y.tag) return false;
  }
  return true;
}

IneqSystem merge(const std::vector<IneqSystem>& parts) {
  IneqSystem r;
  for (const auto& p : parts) {
    for (const auto& v : p.vars) r.add_var(v);
    for (const auto& c : p.consts) r.add_const(c);
    r.rows.insert(r.rows.end(), p.rows.begin(), p.rows.end());
    r.identities.insert(r.identities.end(), p.identities.begin(), p.identities.end());
    r.subs.insert(r.subs.end(), p.subs.begin(), p.subs.end());
  }
  return r;
}

IneqSystem apply_subs(const IneqSystem& s) {
  IneqSystem r = s;
  std::vector<Substitution> subs = r.subs;
  r.subs.clear();
  for (std::size_t i = 0; i < subs.size(); ++i) {
    const Substitution& sb = subs[i];
    auto rewrite = [&](Lin& a, Lin& c, Q& c0, int side) {
      // side = +1: expression sits on the variable side of a row (a.v <= c.k + c0);
      // side = -1: expression is itself a right-hand side (substitution bodies).
      auto it = a.find(sb.var);
      if (it == a.end()) return;
      Q coef = it->second;
      a.erase(it);
      axpy(a, coef, sb.a);
      axpy(c, -side * coef, sb.c);
      c0 -= side * coef * sb.c0;
    };
    for (auto& row : r.rows) rewrite(row.a, row.c, row.c0, +1);
    for (std::size_t j = i + 1; j < subs.size(); ++j) rewrite(subs[j].a, subs[j].c, subs[j].c0, -1);
    for (const auto& [k, v] : sb.c) r.add_const(k);
    r.vars.erase(std::remove(r.vars.begin(), r.vars.end(), sb.var), r.vars.end());
  }
  return r;
}

IneqSystem drop_tags(const IneqSystem& s, const std::vector<std::string>& prefixes) {
  IneqSystem r = s;
  r.rows.clear();
  for (const auto& row : s.rows) {
    bool drop = false;
    for (const auto& p : prefixes)
      if (row.tag.rfind(p, 0) == 0) drop = true;
    if (!drop) r.rows.push_back(row);
  }
  return r;
}

IneqSystem rename_in_consts(const IneqSystem& s, const std::string& from, const std::string& to) {
  std::map<std::string, std::string> m;
  for (const auto& k : s.consts) {
    if (!is_info_symbol(k)) {
      m[k] = k;
      continue;
    }
    // Replace whole names only: split on the separators.
    std::string out, tok;
    auto flush = [&] {
      out += (tok == from ? to : tok);
      tok.clear();
    };
    for (std::size_t i = 2; i + 1 < k.size(); ++i) {
      char ch = k[i];
      if (ch == ',' || ch == ';' || ch == '|') {
        flush();
        out += ch;
      } else {
        tok += ch;
      }
    }
    flush();
    m[k] = canonical_const("I(" + out + ")");
  }
  auto remap = [&](const Lin& l) {
    Lin r;
    for (const auto& [k, v] : l) addto(r, m.count(k) ? m.at(k) : k, v);
    return r;
  };
  IneqSystem r = s;
  r.consts.clear();
  for (const auto& k : s.consts) r.add_const(m[k]);
  for (auto& row : r.rows) row.c = remap(row.c);
  for (auto& id : r.identities) id.c = remap(id.c);
  for (auto& sb : r.subs) sb.c = remap(sb.c);
  return r;
}

IneqSystem canonicalize(const IneqSystem& s) {
  IneqSystem r = s;
  r.rows.clear();
  std::map<std::string, Ineq> uniq;
  for (Ineq row : s.rows) {
    if (row.a.empty() && lin_nonneg(row.c) && sgn(row.c0) >= 0) continue;  // trivially true
    Q scale = 0;
    for (const auto& v : s.vars)
      if (auto it = row.a.find(v); it != row.a.end()) {
        scale = abs(it->second);
        break;
      }
    if (sgn(scale) == 0 && !row.a.empty()) scale = abs(row.a.begin()->second);
    if (sgn(scale) == 0)
      for (const auto& k : s.consts)
        if (auto it = row.c.find(k); it != row.c.end()) {
          scale = abs(it->second);
          break;
        }
    if (sgn(scale) == 0 && !row.c.empty()) scale = abs(row.c.begin()->second);
    if (sgn(scale) == 0) scale = abs(row.c0);
    if (sgn(scale) != 0 && scale != 1) {
      for (auto& [k, v] : row.a) v /= scale;
      for (auto& [k, v] : row.c) v /= scale;
      row.c0 /= scale;
    }
    std::string key = row_key(s, row);
    auto it = uniq.find(key);
    if (it == uniq.end()) {
      uniq.emplace(key, std::move(row));
    } else {
      it->second.strict = it->second.strict || row.strict;
      it->second.origin.insert(row.origin.begin(), row.origin.end());
    }
  }
  for (auto& [k, row] : uniq) r.rows.push_back(std::move(row));
  return r;
}

IneqSystem eliminate_var(const IneqSystem& s, const std::string& v) {
  if (!s.has_var(v)) return s;
  IneqSystem r = s;
  r.rows.clear();
  std::vector<const Ineq*> up, lo;
  for (const auto& row : s.rows) {
    auto it = row.a.find(v);
    if (it == row.a.end())
      r.rows.push_back(row);
    else if (sgn(it->second) > 0)
      up.push_back(&row);
    else
      lo.push_back(&row);
  }
  for (const Ineq* p : up)
    for (const Ineq* n : lo) {
      Q mp = -n->a.at(v), mn = p->a.at(v);
      Ineq row;
      axpy(row.a, mp, p->a);
      axpy(row.a, mn, n->a);
      axpy(row.c, mp, p->c);
      axpy(row.c, mn, n->c);
      row.c0 = mp * p->c0 + mn * n->c0;
      row.strict = p->strict || n->strict;
      row.tag = "elim." + v;
      row.origin = p->origin;
      row.origin.insert(n->origin.begin(), n->origin.end());
      r.rows.push_back(std::move(row));
    }
  r.vars.erase(std::remove(r.vars.begin(), r.vars.end(), v), r.vars.end());
  return canonicalize(r);
}

namespace {

// Exact feasibility LP behind `implies`. `only` restricts the usable rows.
std::optional<Certificate> farkas(const IneqSystem& s, const Ineq& t, const std::vector<std::size_t>& use,
                                  bool allow_slack) {
  std::set<std::string> vnames, knames;
  for (std::size_t i : use) {
    for (const auto& [k, v] : s.rows[i].a) vnames.insert(k);
    for (const auto& [k, v] : s.rows[i].c) knames.insert(k);
  }
  for (const auto& [k, v] : t.a) vnames.insert(k);
  for (const auto& [k, v] : t.c) knames.insert(k);
  for (const auto& id : s.identities)
    for (const auto& [k, v] : id.c) knames.insert(k);
  // Quick reject: a target variable no usable row mentions.
  for (const auto& [k, v] : t.a) {
    bool found = false;
    for (std::size_t i : use)
      if (s.rows[i].a.count(k)) {
        found = true;
        break;
      }
    if (!found) return std::nullopt;
  }
  const std::size_t m = use.size(), K = s.identities.size(), J = knames.size();
  const std::size_t n = m + 2 * K + (allow_slack ? J + 1 : 0);
  LpProblem<Q> lp;
  lp.n = n;
  for (const auto& vn : vnames) {
    std::vector<Q> row(n, Q(0));
    for (std::size_t i = 0; i < m; ++i)
      if (auto it = s.rows[use[i]].a.find(vn); it != s.rows[use[i]].a.end()) row[i] = it->second;
    Q rhs = t.a.count(vn) ? t.a.at(vn) : Q(0);
    lp.add(std::move(row), Rel::Eq, rhs);
  }
  std::size_t j = 0;
  for (const auto& kn : knames) {
    std::vector<Q> row(n, Q(0));
    for (std::size_t i = 0; i < m; ++i)
      if (auto it = s.rows[use[i]].c.find(kn); it != s.rows[use[i]].c.end()) row[i] = it->second;
    for (std::size_t k = 0; k < K; ++k)
      if (auto it = s.identities[k].c.find(kn); it != s.identities[k].c.end()) {
        row[m + 2 * k] = it->second;
        row[m + 2 * k + 1] = -it->second;
      }
    if (allow_slack) row[m + 2 * K + j] = 1;
    Q rhs = t.c.count(kn) ? t.c.at(kn) : Q(0);
    lp.add(std::move(row), Rel::Eq, rhs);
    ++j;
  }
  {
    std::vector<Q> row(n, Q(0));
    for (std::size_t i = 0; i < m; ++i) row[i] = s.rows[use[i]].c0;
    for (std::size_t k = 0; k < K; ++k) {
      row[m + 2 * k] = -s.identities[k].c0;
      row[m + 2 * k + 1] = s.identities[k].c0;
    }
    if (allow_slack) row[n - 1] = 1;
    lp.add(std::move(row), Rel::Eq, t.c0);
  }
  auto res = solve_lp(lp);
  if (res.status != LpStatus::Optimal) return std::nullopt;
  Certificate cert;
  for (std::size_t i = 0; i < m; ++i)
    if (sgn(res.x[i]) > 0) cert.lambda.emplace_back(use[i], res.x[i]);
  for (std::size_t k = 0; k < K; ++k) {
    Q mu = res.x[m + 2 * k] - res.x[m + 2 * k + 1];
    if (sgn(mu) != 0) cert.mu.emplace_back(k, mu);
  }
  if (allow_slack) {
    j = 0;
    for (const auto& kn : knames) {
      if (sgn(res.x[m + 2 * K + j]) > 0) cert.slack[kn] = res.x[m + 2 * K + j];
      ++j;
    }
    cert.tail = res.x[n - 1];
  }
  return cert;
}

bool proportional(const Lin& a, const Lin& b, Q& ratio) {
  // ratio * a == b, ratio > 0
  if (a.size() != b.size()) return false;
  if (a.empty()) {
    ratio = 0;
    return true;
  }
  ratio = b.begin()->second / a.begin()->second;
  if (sgn(ratio) <= 0) return false;
  for (const auto& [k, v] : a) {
    auto it = b.find(k);
    if (it == b.end() || it->second != ratio * v) return false;
  }
  return true;
}

}  // namespace

std::optional<Certificate> implies(const IneqSystem& s, const Ineq& target) {
  std::vector<std::size_t> use(s.rows.size());
  for (std::size_t i = 0; i < use.size(); ++i) use[i] = i;
  auto c = farkas(s, target, use, true);
  if (c && !verify(s, target, *c)) throw DomainError("internal: Farkas certificate failed exact verification");
  return c;
}

bool verify(const IneqSystem& s, const Ineq& t, const Certificate& cert) {
  Lin a, c;
  Q c0 = 0;
  for (const auto& [i, l] : cert.lambda) {
    if (sgn(l) < 0 || i >= s.rows.size()) return false;
    axpy(a, l, s.rows[i].a);
    axpy(c, l, s.rows[i].c);
    c0 += l * s.rows[i].c0;
  }
  for (const auto& [k, mu] : cert.mu) {
    if (k >= s.identities.size()) return false;
    axpy(c, mu, s.identities[k].c);
    c0 -= mu * s.identities[k].c0;
  }
  for (const auto& [k, v] : cert.slack) {
    if (sgn(v) < 0) return false;
    addto(c, k, v);
  }
  if (sgn(cert.tail) < 0) return false;
  c0 += cert.tail;
  return a == t.a && c == t.c && c0 == t.c0;
}

std::string certificate_text(const IneqSystem& s, const Certificate& cert) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [i, l] : cert.lambda) {
    os << (first ? "" : " + ") << l.get_str() << "*[" << s.rows[i].tag << "]";
    first = false;
  }
  for (const auto& [k, mu] : cert.mu) {
    os << (first ? "" : " + ") << mu.get_str() << "*{" << s.identities[k].tag << "}";
    first = false;
  }
  for (const auto& [k, v] : cert.slack) {
    os << (first ? "" : " + ") << v.get_str() << "*slack(" << k << ")";
    first = false;
  }
  if (sgn(cert.tail) > 0) os << (first ? "" : " + ") << cert.tail.get_str() << "*slack(1)";
  if (first) os << "nonnegativity of constants";
  return os.str();
}

IneqSystem remove_redundant(const IneqSystem& s0) {
  IneqSystem s = canonicalize(s0);
  std::vector<bool> keep(s.rows.size(), true);
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    std::vector<std::size_t> use;
    for (std::size_t j = 0; j < s.rows.size(); ++j)
      if (j != i && keep[j]) use.push_back(j);
    if (farkas(s, s.rows[i], use, true)) keep[i] = false;
  }
  IneqSystem r = s;
  r.rows.clear();
  for (std::size_t i = 0; i < s.rows.size(); ++i)
    if (keep[i]) r.rows.push_back(s.rows[i]);
  return r;
}

IneqSystem eliminate_all(const IneqSystem& s, const std::vector<std::string>& order, bool prune) {
  IneqSystem r = prune ? remove_redundant(s) : canonicalize(s);
  for (const auto& v : order) {
    r = eliminate_var(r, v);
    if (prune) r = remove_redundant(r);
  }
  return r;
}

const char* match_name(MatchKind k) {
  switch (k) {
    case MatchKind::Exact:
      return "exact";
    case MatchKind::Redundancy:
      return "redundancy mismatch";
    default:
      return "error";
  }
}

Direction check_direction(const IneqSystem& from0, const IneqSystem& to, const std::string& name) {
  IneqSystem from = from0;
  from.identities.insert(from.identities.end(), to.identities.begin(), to.identities.end());
  for (const auto& k : to.consts) from.add_const(k);
  Direction d;
  d.name = name;
  for (const auto& t : to.rows) {
    RowCheck rc;
    rc.row = print_row(to, t);
    rc.tag = t.tag;
    // Exact: a single source row with proportional variable part, no slack.
    for (std::size_t i = 0; i < from.rows.size() && !rc.cert; ++i) {
      Q ratio;
      if (!proportional(from.rows[i].a, t.a, ratio)) continue;
      auto c = farkas(from, t, {i}, false);
      if (c && !c->lambda.empty()) {
        rc.kind = MatchKind::Exact;
        rc.cert = c;
      }
    }
    if (!rc.cert) {
      auto c = implies(from, t);
      if (c) {
        rc.kind = MatchKind::Redundancy;
        rc.cert = c;
      } else {
        rc.kind = MatchKind::Error;
        d.holds = false;
      }
    }
    if (rc.cert) {
      if (!verify(from, t, *rc.cert)) throw DomainError("internal: certificate failed verification");
      rc.cert_text = certificate_text(from, *rc.cert);
    }
    d.rows.push_back(std::move(rc));
  }
  return d;
}

EquivalenceReport compare(const IneqSystem& a, const IneqSystem& b, const std::string& a_name,
                          const std::string& b_name, bool one_way) {
  EquivalenceReport r;
  r.forward = check_direction(a, b, a_name + " => " + b_name);
  r.backward = check_direction(b, a, b_name + " => " + a_name);
  r.equivalent = r.forward.holds && (one_way || r.backward.holds);
  for (const Direction* d : {&r.forward, &r.backward})
    for (const auto& rc : d->rows)
      if (rc.kind == MatchKind::Error) r.unmatched.push_back(d->name + ": " + rc.row + "  @" + rc.tag);
  return r;
}

std::string report_to_json(const EquivalenceReport& r, const std::string& extra_json) {
  using nlohmann::json;
  auto dir = [](const Direction& d) {
    json j;
    j["name"] = d.name;
    j["holds"] = d.holds;
    std::size_t ex = 0, red = 0, err = 0;
    json rows = json::array();
    for (const auto& rc : d.rows) {
      json x;
      x["row"] = rc.row;
      x["tag"] = rc.tag;
      x["status"] = match_name(rc.kind);
      if (rc.cert) x["certificate"] = rc.cert_text;
      rows.push_back(x);
      (rc.kind == MatchKind::Exact ? ex : rc.kind == MatchKind::Redundancy ? red : err)++;
    }
    j["counts"] = {{"exact", ex}, {"redundancy mismatch", red}, {"error", err}};
    j["rows"] = rows;
    return j;
  };
  json j;
  j["equivalent"] = r.equivalent;
  j["forward"] = dir(r.forward);
  j["backward"] = dir(r.backward);
  j["unmatched"] = r.unmatched;
  j["notes"] = r.notes;
  if (!extra_json.empty()) j["derivation"] = json::parse(extra_json);
  return j.dump(2);
}

}  // namespace bcsl::fme
