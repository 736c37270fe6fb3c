#include "bcsl/orderings.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "bcsl/error.hpp"
#include "bcsl/lp.hpp"
#include "bcsl/parallel.hpp"
#include "bcsl/rng.hpp"

namespace bcsl {

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::True:
      return "true";
    case Verdict::False:
      return "false";
    default:
      return "indeterminate";
  }
}

namespace {

void check_pair(const Channel3& ch, int a, int b) {
  (void)ch.ny(a);
  (void)ch.ny(b);
}

Verdict classify(double gap) {
  if (gap <= kOrderPass) return Verdict::True;
  if (gap > kOrderFail) return Verdict::False;
  return Verdict::Indeterminate;
}

// I(S;Y) for a joint over (s, y) given as row-major K x ny.
double mi_joint(const std::vector<double>& j, std::size_t k, std::size_t ny) {
  std::vector<double> ps(k, 0.0), py(ny, 0.0);
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t y = 0; y < ny; ++y) {
      ps[s] += j[s * ny + y];
      py[y] += j[s * ny + y];
    }
  double v = 0.0;
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t y = 0; y < ny; ++y) {
      double q = j[s * ny + y];
      if (q > 0.0) v += q * std::log2(q / (ps[s] * py[y]));
    }
  return v;
}

std::vector<double> compose(const std::vector<double>& r, std::size_t k, std::size_t nx, const std::vector<double>& w,
                            std::size_t ny) {
  std::vector<double> j(k * ny, 0.0);
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t x = 0; x < nx; ++x) {
      double m = r[s * nx + x];
      if (m == 0.0) continue;
      for (std::size_t y = 0; y < ny; ++y) j[s * ny + y] += m * w[x * ny + y];
    }
  return j;
}

// d I(U;Y) / d r(u,x), up to an additive constant shared by all coordinates.
std::vector<double> mi_grad(const std::vector<double>& r0, std::size_t k, std::size_t nx, const std::vector<double>& w,
                            std::size_t ny) {
  std::vector<double> r(r0.size());
  const double sm = 1e-12;
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = (1.0 - sm) * r0[i] + sm / static_cast<double>(r.size());
  std::vector<double> j = compose(r, k, nx, w, ny);
  std::vector<double> ps(k, 0.0), py(ny, 0.0);
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t y = 0; y < ny; ++y) {
      ps[s] += j[s * ny + y];
      py[y] += j[s * ny + y];
    }
  std::vector<double> g(k * nx, 0.0);
  for (std::size_t s = 0; s < k; ++s)
    for (std::size_t x = 0; x < nx; ++x) {
      double v = 0.0;
      for (std::size_t y = 0; y < ny; ++y) {
        double t = w[x * ny + y];
        if (t > 0.0) v += t * std::log2(j[s * ny + y] / (ps[s] * py[y]));
      }
      g[s * nx + x] = v;
    }
  return g;
}

// d I(X;Y) / d p(x) = D(W_x || q), up to a shared constant.
std::vector<double> io_grad(const std::vector<double>& p, std::size_t nx, const std::vector<double>& w, std::size_t ny) {
  std::vector<double> q(ny, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) q[y] += p[x] * w[x * ny + y];
  std::vector<double> g(nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t y = 0; y < ny; ++y) {
      double t = w[x * ny + y];
      // q[y] == 0 with t > 0 means an unused letter could open a new output: steep ascent.
      if (t > 0.0) g[x] += t * (q[y] > 0.0 ? std::log2(t / q[y]) : 60.0);
    }
  return g;
}

using Fn = std::function<double(const std::vector<double>&)>;
using Grad = std::function<std::vector<double>(const std::vector<double>&)>;

// Projected gradient ascent with step adaptation.
std::vector<double> ascend(const Fn& f, const Grad& grad, std::vector<double> v, int iters) {
  double fv = f(v), eta = 0.5;
  for (int it = 0; it < iters && eta > 1e-12; ++it) {
    std::vector<double> g = grad(v);
    bool moved = false;
    while (eta > 1e-12) {
      std::vector<double> c(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) c[i] = v[i] + eta * g[i];
      c = project_simplex(std::move(c));
      double fc = f(c);
      if (fc > fv + 1e-16) {
        v = std::move(c);
        fv = fc;
        eta *= 1.5;
        moved = true;
        break;
      }
      eta *= 0.5;
    }
    if (!moved) break;
  }
  return v;
}

void compositions(std::size_t parts, int total, std::vector<int>& cur, const std::function<void(const std::vector<int>&)>& cb) {
  if (cur.size() + 1 == parts) {
    cur.push_back(total);
    cb(cur);
    cur.pop_back();
    return;
  }
  for (int k = 0; k <= total; ++k) {
    cur.push_back(k);
    compositions(parts, total - k, cur, cb);
    cur.pop_back();
  }
}

std::vector<std::vector<double>> simplex_grid(std::size_t dim, int steps) {
  std::vector<std::vector<double>> pts;
  std::vector<int> cur;
  compositions(dim, steps, cur, [&](const std::vector<int>& c) {
    std::vector<double> p(dim);
    for (std::size_t i = 0; i < dim; ++i) p[i] = static_cast<double>(c[i]) / steps;
    pts.push_back(std::move(p));
  });
  return pts;
}

struct Best {
  double val = -1e300;
  std::vector<double> arg;
  void offer(double v, const std::vector<double>& a) {
    if (v > val) {
      val = v;
      arg = a;
    }
  }
};

// Multistart ascent; restart i uses Rng(seed, Search, salt + i). Reduction keeps
// the lowest restart index among ties, so thread count does not matter.
Best multistart(const Fn& f, const Grad& grad, std::size_t dim, const SearchConfig& cfg, std::uint64_t salt,
                const std::vector<std::vector<double>>& seeds) {
  std::size_t total = seeds.size() + static_cast<std::size_t>(std::max(0, cfg.restarts));
  std::vector<double> vals(total);
  std::vector<std::vector<double>> args(total);
  parallel_for(total, cfg.threads, [&](std::size_t i) {
    std::vector<double> start;
    if (i < seeds.size()) {
      start = seeds[i];
    } else {
      Rng rng(cfg.seed, Stream::Search, salt + i);
      // Alternate diffuse and sparse starts; sparse ones probe simplex faces.
      start = rng.dirichlet(dim, (i % 2) ? 1.0 : 0.3);
    }
    args[i] = ascend(f, grad, std::move(start), cfg.iters);
    vals[i] = f(args[i]);
  });
  Best b;
  for (std::size_t i = 0; i < total; ++i) b.offer(vals[i], args[i]);
  return b;
}

}  // namespace

std::vector<double> project_simplex(std::vector<double> v) {
  std::vector<double> u = v;
  std::sort(u.begin(), u.end(), std::greater<>());
  double css = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    css += u[i];
    double t = (css - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  double s = 0.0;
  for (auto& x : v) {
    x = std::max(0.0, x - theta);
    s += x;
  }
  for (auto& x : v) x /= s;
  return v;
}

double mc_gap_at(const std::vector<double>& wa, const std::vector<double>& wb, std::size_t nx, std::size_t na,
                 std::size_t nb, const std::vector<double>& px) {
  // One source symbol per input letter: r(s = x, x) = p(x).
  std::vector<double> r(nx * nx, 0.0);
  for (std::size_t x = 0; x < nx; ++x) r[x * nx + x] = px[x];
  return mi_joint(compose(r, nx, nx, wb, nb), nx, nb) - mi_joint(compose(r, nx, nx, wa, na), nx, na);
}

double ln_gap_at(const std::vector<double>& wa, const std::vector<double>& wb, std::size_t nx, std::size_t na,
                 std::size_t nb, std::size_t nu, const std::vector<double>& pux) {
  return mi_joint(compose(pux, nu, nx, wb, nb), nu, nb) - mi_joint(compose(pux, nu, nx, wa, na), nu, na);
}

OrderingReport is_degraded(const Channel3& ch, int a, int b) {
  check_pair(ch, a, b);
  OrderingReport r;
  r.predicate = "degraded";
  r.a = a;
  r.b = b;
  r.certification = "exact rational LP";
  const std::size_t nx = ch.nx(), na = ch.ny(a), nb = ch.ny(b);
  r.witness_rows = na;
  r.witness_cols = nb;
  if (a == b) {
    r.verdict = Verdict::True;
    r.witness.assign(na * nb, 0.0);
    for (std::size_t i = 0; i < na; ++i) r.witness[i * nb + i] = 1.0;
    return r;
  }
  std::vector<double> wa = ch.marginal(a), wb = ch.marginal(b);
  // Variables: W (na*nb), e+ (nx*nb), e- (nx*nb). Minimize total residual exactly.
  const std::size_t nw = na * nb, ne = nx * nb;
  LpProblem<mpq_class> lp;
  lp.n = nw + 2 * ne;
  lp.c.assign(lp.n, mpq_class(0));
  for (std::size_t k = nw; k < lp.n; ++k) lp.c[k] = -1;
  for (std::size_t i = 0; i < na; ++i) {
    std::vector<mpq_class> row(lp.n, mpq_class(0));
    for (std::size_t j = 0; j < nb; ++j) row[i * nb + j] = 1;
    lp.add(std::move(row), Rel::Eq, mpq_class(1));
  }
  for (std::size_t x = 0; x < nx; ++x)
    for (std::size_t j = 0; j < nb; ++j) {
      std::vector<mpq_class> row(lp.n, mpq_class(0));
      for (std::size_t i = 0; i < na; ++i) row[i * nb + j] = mpq_class(wa[x * na + i]);
      row[nw + x * nb + j] = 1;
      row[nw + ne + x * nb + j] = -1;
      lp.add(std::move(row), Rel::Eq, mpq_class(wb[x * nb + j]));
    }
  auto res = solve_lp(lp);
  if (res.status != LpStatus::Optimal) throw DomainError("degradation LP failed unexpectedly");
  double resid = -res.value.get_d();
  r.gap = resid;
  r.witness.resize(nw);
  for (std::size_t k = 0; k < nw; ++k) r.witness[k] = res.x[k].get_d();
  r.verdict = resid <= kDegradedTol ? Verdict::True : Verdict::False;
  return r;
}

OrderingReport is_more_capable(const Channel3& ch, int a, int b, const SearchConfig& cfg) {
  check_pair(ch, a, b);
  const std::size_t nx = ch.nx(), na = ch.ny(a), nb = ch.ny(b);
  OrderingReport r;
  r.predicate = "more_capable";
  r.a = a;
  r.b = b;
  r.witness_rows = 1;
  r.witness_cols = nx;
  if (a == b) {
    r.verdict = Verdict::True;
    r.witness.assign(nx, 1.0 / static_cast<double>(nx));
    r.certification = "reflexive";
    return r;
  }
  if (nx > cfg.grid_cap_nx && !cfg.multistart_only)
    throw CapabilityError("input alphabet of size " + std::to_string(nx) + " exceeds the grid cap of " +
                          std::to_string(cfg.grid_cap_nx) + "; rerun in multistart-only mode");
  std::vector<double> wa = ch.marginal(a), wb = ch.marginal(b);
  Fn f = [&](const std::vector<double>& p) { return mc_gap_at(wa, wb, nx, na, nb, p); };
  Grad g = [&](const std::vector<double>& p) {
    auto gb = io_grad(p, nx, wb, nb), ga = io_grad(p, nx, wa, na);
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= ga[i];
    return gb;
  };
  Best best;
  std::vector<std::vector<double>> starts;
  if (!cfg.multistart_only) {
    auto pts = simplex_grid(nx, cfg.grid);
    Best grid_best;
    for (const auto& p : pts) grid_best.offer(f(p), p);
    best = grid_best;
    starts.push_back(grid_best.arg);
  }
  starts.push_back(std::vector<double>(nx, 1.0 / static_cast<double>(nx)));
  Best ms = multistart(f, g, nx, cfg, 0, starts);
  if (ms.val > best.val) best = ms;
  r.gap = std::max(0.0, best.val);
  r.witness = best.arg;
  r.verdict = classify(best.val);
  r.restarts = cfg.restarts;
  r.grid = cfg.multistart_only ? 0 : cfg.grid;
  std::ostringstream os;
  os << "numerically certified only up to search effort (" << cfg.restarts << " restarts, grid "
     << (cfg.multistart_only ? std::string("off") : std::to_string(cfg.grid)) << ")";
  r.certification = os.str();
  return r;
}

OrderingReport is_less_noisy(const Channel3& ch, int a, int b, const SearchConfig& cfg) {
  check_pair(ch, a, b);
  const std::size_t nx = ch.nx(), na = ch.ny(a), nb = ch.ny(b);
  const std::size_t nu = cfg.aux_card ? cfg.aux_card : nx + 1;
  OrderingReport r;
  r.predicate = "less_noisy";
  r.a = a;
  r.b = b;
  r.witness_rows = nu;
  r.witness_cols = nx;
  if (a == b) {
    r.verdict = Verdict::True;
    r.witness.assign(nu * nx, 1.0 / static_cast<double>(nu * nx));
    r.certification = "reflexive";
    return r;
  }
  if (nx > cfg.grid_cap_nx && !cfg.multistart_only)
    throw CapabilityError("input alphabet of size " + std::to_string(nx) + " exceeds the grid cap of " +
                          std::to_string(cfg.grid_cap_nx) + "; rerun in multistart-only mode");
  std::vector<double> wa = ch.marginal(a), wb = ch.marginal(b);
  Fn f = [&](const std::vector<double>& p) { return ln_gap_at(wa, wb, nx, na, nb, nu, p); };
  Grad g = [&](const std::vector<double>& p) {
    auto gb = mi_grad(p, nu, nx, wb, nb), ga = mi_grad(p, nu, nx, wa, na);
    for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= ga[i];
    return gb;
  };
  Best best;
  std::vector<std::vector<double>> starts;
  if (!cfg.multistart_only && nu >= 2) {
    // Structured sampling: binary U embedded in the first two labels.
    int steps = cfg.ln_grid;
    int cond_steps = nx <= 2 ? steps : std::max(2, steps / 2);
    auto conds = simplex_grid(nx, cond_steps);
    Best grid_best;
    for (int t = 0; t <= steps; ++t) {
      double pu = static_cast<double>(t) / steps;
      for (const auto& c0 : conds)
        for (const auto& c1 : conds) {
          std::vector<double> p(nu * nx, 0.0);
          for (std::size_t x = 0; x < nx; ++x) {
            p[x] = pu * c0[x];
            p[nx + x] = (1.0 - pu) * c1[x];
          }
          grid_best.offer(f(p), p);
        }
    }
    best = grid_best;
    starts.push_back(grid_best.arg);
  }
  // U = X embedding of the worst more-capable input: a less-noisy violation
  // must be at least as large as the more-capable one.
  {
    SearchConfig mc = cfg;
    auto rep = is_more_capable(ch, a, b, mc);
    std::vector<double> p(nu * nx, 0.0);
    for (std::size_t x = 0; x < nx && x < nu; ++x) p[x * nx + x] = rep.witness[x];
    if (nu >= nx) starts.push_back(p);
  }
  Best ms = multistart(f, g, nu * nx, cfg, 1u << 20, starts);
  if (ms.val > best.val) best = ms;
  r.gap = std::max(0.0, best.val);
  r.witness = best.arg;
  r.verdict = classify(best.val);
  r.restarts = cfg.restarts;
  r.grid = cfg.multistart_only ? 0 : cfg.ln_grid;
  std::ostringstream os;
  os << "numerically certified only up to search effort (" << cfg.restarts << " restarts, |U| = " << nu << ", grid "
     << (cfg.multistart_only ? std::string("off") : std::to_string(cfg.ln_grid)) << ")";
  r.certification = os.str();
  return r;
}

ImplicationReport implication_check(const Channel3& ch, int a, int b, const SearchConfig& cfg) {
  ImplicationReport r;
  r.degraded = is_degraded(ch, a, b);
  r.less_noisy = is_less_noisy(ch, a, b, cfg);
  r.more_capable = is_more_capable(ch, a, b, cfg);
  if (r.degraded.verdict == Verdict::True && r.less_noisy.verdict == Verdict::False)
    r.violations.push_back("degraded but not less noisy");
  if (r.less_noisy.verdict == Verdict::True && r.more_capable.verdict == Verdict::False)
    r.violations.push_back("less noisy but not more capable");
  if (r.degraded.verdict == Verdict::True && r.more_capable.verdict == Verdict::False)
    r.violations.push_back("degraded but not more capable");
  r.consistent = r.violations.empty();
  return r;
}

std::string ordering_to_json(const OrderingReport& r) {
  nlohmann::json j;
  j["predicate"] = r.predicate;
  j["pair"] = {r.a, r.b};
  j["verdict"] = verdict_name(r.verdict);
  j["gap_bits"] = r.gap;
  j["witness"] = {{"rows", r.witness_rows}, {"cols", r.witness_cols}, {"values", r.witness}};
  j["restarts"] = r.restarts;
  j["grid"] = r.grid;
  j["certification"] = r.certification;
  return j.dump(2);
}

OrderingReport ordering_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    OrderingReport r;
    r.predicate = j.at("predicate").get<std::string>();
    r.a = j.at("pair").at(0).get<int>();
    r.b = j.at("pair").at(1).get<int>();
    std::string v = j.at("verdict").get<std::string>();
    r.verdict = v == "true" ? Verdict::True : v == "false" ? Verdict::False : Verdict::Indeterminate;
    r.gap = j.value("gap_bits", 0.0);
    if (j.contains("witness")) {
      r.witness_rows = j["witness"].value("rows", std::size_t{0});
      r.witness_cols = j["witness"].value("cols", std::size_t{0});
      r.witness = j["witness"].value("values", std::vector<double>{});
    }
    r.restarts = j.value("restarts", 0);
    r.grid = j.value("grid", 0);
    r.certification = j.value("certification", std::string());
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("ordering report: ") + e.what());
  }
}

}  // namespace bcsl
