// Small-blocklength instance of the layered secure code: superposition clouds,
// double-binned satellites, first-fit pairing, typicality decoders and an exact
// equivocation enumerator for the wiretapper.

#include "bcsl/codec.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "bcsl/error.hpp"
#include "bcsl/info.hpp"
#include "bcsl/parallel.hpp"
#include "bcsl/rng.hpp"

namespace bcsl {

using nlohmann::json;

namespace {

constexpr double kRateTol = 1e-12;

const char* const kConfigKeys[] = {"n",  "R0", "R1e", "R1p", "R1d", "Q2",  "Q3",          "P3",
                                   "P3d", "P1e", "P1p", "eps", "seed", "max_symbols", "max_tries"};

double pair_info(const AuxJoint& aux) {
  return clamp_info(conditional_mi(aux.joint(), {"U2"}, {"U3"}, {"U1"}), "I(U2;U3|U1)");
}

struct Tab {
  std::vector<std::size_t> dims;
  std::vector<double> p;
};

Tab table_of(const JointPmf& j, const Axes& axes) {
  JointPmf m = j.marginal(axes);
  return {m.dims(), m.probs()};
}

bool typical(const std::vector<const Seq*>& seqs, const Tab& t, double eps) {
  return jointly_typical(seqs, t.dims, t.p, eps);
}

// Draws one symbol per position from the conditional law slice, retrying until
// the tuple (context..., new) is typical under `t`.
Seq draw_conditional(Rng& rng, const std::vector<const Seq*>& ctx, const Tab& t, double eps, int n,
                     int max_tries, const char* what) {
  const std::size_t k = t.dims.back();
  std::size_t ctx_cells = 1;
  for (std::size_t i = 0; i + 1 < t.dims.size(); ++i) ctx_cells *= t.dims[i];
  // Conditional rows p(new | ctx), one per context cell.
  std::vector<double> cond(ctx_cells * k, 0.0);
  for (std::size_t c = 0; c < ctx_cells; ++c) {
    double s = 0;
    for (std::size_t a = 0; a < k; ++a) s += t.p[c * k + a];
    for (std::size_t a = 0; a < k; ++a) cond[c * k + a] = s > 0 ? t.p[c * k + a] / s : 0.0;
  }
  Seq out(static_cast<std::size_t>(n));
  std::vector<const Seq*> all = ctx;
  all.push_back(&out);
  for (int tr = 0; tr < max_tries; ++tr) {
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      std::size_t c = 0;
      for (std::size_t d = 0; d < ctx.size(); ++d) c = c * t.dims[d] + (*ctx[d])[static_cast<std::size_t>(i)];
      const double* row = &cond[c * k];
      double mass = 0;
      for (std::size_t a = 0; a < k; ++a) mass += row[a];
      if (mass <= 0) {
        ok = false;
        break;
      }
      out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(rng.categorical(row, k));
    }
    if (ok && typical(all, t, eps)) return out;
  }
  throw DomainError(std::string("typicality rejection cap exceeded while drawing from ") + what +
                    " (raise eps or n, or lower max_tries pressure)");
}

std::size_t checked_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > SIZE_MAX / a) throw CapabilityError("codebook size overflows");
  return a * b;
}

}  // namespace

std::size_t set_size(int n, double rate) {
  if (!(rate >= 0) || !std::isfinite(rate)) throw ValidationError("rates must be finite and nonnegative");
  double e = n * rate;
  if (e > 40) throw CapabilityError("2^(n*rate) exceeds 2^40; lower n or the rate");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::exp2(e) + 1e-9)));
}

CodeConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("code config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ValidationError("code config: expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : kConfigKeys) known = known || it.key() == k;
    if (!known) throw ValidationError("code config: unknown key '" + it.key() + "'");
  }
  if (!j.contains("n")) throw ValidationError("code config: missing 'n'");
  CodeConfig c;
  try {
    c.n = j.at("n").get<int>();
    auto num = [&](const char* k, double& dst) {
      if (j.contains(k)) dst = j.at(k).get<double>();
    };
    num("R0", c.R0);
    num("R1e", c.R1e);
    num("R1p", c.R1p);
    num("R1d", c.R1d);
    num("Q2", c.Q2);
    num("Q3", c.Q3);
    num("P3", c.P3);
    num("P3d", c.P3d);
    num("P1e", c.P1e);
    num("P1p", c.P1p);
    num("eps", c.eps);
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("max_symbols")) c.max_symbols = j.at("max_symbols").get<std::size_t>();
    if (j.contains("max_tries")) c.max_tries = j.at("max_tries").get<int>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("code config: ") + e.what());
  }
  if (c.n < 1) throw ValidationError("code config: n must be >= 1");
  if (!(c.eps > 0)) throw ValidationError("code config: eps must be > 0");
  if (c.max_tries < 1) throw ValidationError("code config: max_tries must be >= 1");
  return c;
}

std::string config_to_json(const CodeConfig& c) {
  json j;
  j["n"] = c.n;
  j["R0"] = c.R0;
  j["R1e"] = c.R1e;
  j["R1p"] = c.R1p;
  j["R1d"] = c.R1d;
  j["Q2"] = c.Q2;
  j["Q3"] = c.Q3;
  j["P3"] = c.P3;
  j["P3d"] = c.P3d;
  j["P1e"] = c.P1e;
  j["P1p"] = c.P1p;
  j["eps"] = c.eps;
  j["seed"] = c.seed;
  j["max_symbols"] = c.max_symbols;
  j["max_tries"] = c.max_tries;
  return j.dump(2);
}

void validate_config(const CodeConfig& c, const AuxJoint& aux) {
  const double rates[] = {c.R0, c.R1e, c.R1p, c.R1d, c.Q2, c.Q3, c.P3, c.P3d, c.P1e, c.P1p};
  for (double r : rates)
    if (!(r >= 0) || !std::isfinite(r)) throw ValidationError("code config: rates must be finite and nonnegative");
  const double J = pair_info(aux);
  char buf[256];
  auto fail = [&](const char* tag, const char* text, double lhs, double rhs) {
    std::snprintf(buf, sizeof buf, "code config violates %s: %s (%.6g vs %.6g)", tag, text, lhs, rhs);
    throw DomainError(buf);
  };
  if (c.R1e + c.R1p + c.R1d > c.Q2 + kRateTol) fail("bin.u2", "R1e + R1p + R1d <= Q2", c.R1e + c.R1p + c.R1d, c.Q2);
  if (c.P3 + c.P3d > c.Q3 + kRateTol) fail("bin.u3", "P3 + P3d <= Q3", c.P3 + c.P3d, c.Q3);
  if (c.R1d + c.P3d < J - kRateTol) fail("bin.pair", "R1d + P3d >= I(U2;U3|U1)", c.R1d + c.P3d, J);
  if (c.R1e + c.R1p + c.P3 > c.Q2 + c.Q3 - J + kRateTol)
    fail("bin.joint", "R1e + R1p + P3 <= Q2 + Q3 - I(U2;U3|U1)", c.R1e + c.R1p + c.P3, c.Q2 + c.Q3 - J);
}

bool jointly_typical(const std::vector<const Seq*>& seqs, const std::vector<std::size_t>& dims,
                     const std::vector<double>& p, double eps) {
  if (seqs.size() != dims.size()) throw UsageError("jointly_typical: sequence and axis counts differ");
  if (seqs.empty()) return true;
  const std::size_t n = seqs[0]->size();
  thread_local std::vector<int> counts;
  counts.assign(p.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t c = 0;
    for (std::size_t d = 0; d < seqs.size(); ++d) c = c * dims[d] + (*seqs[d])[i];
    if (p[c] <= 0) return false;
    ++counts[c];
  }
  const double nn = static_cast<double>(n);
  for (std::size_t c = 0; c < p.size(); ++c) {
    if (p[c] <= 0) continue;
    if (std::fabs(counts[c] - nn * p[c]) > eps * nn * p[c] + 1e-12) return false;
  }
  return true;
}

double Codebook::pairing_failure_fraction() const {
  std::size_t f = 0;
  for (int s : sel_d2) f += s < 0;
  return sel_d2.empty() ? 0.0 : static_cast<double>(f) / static_cast<double>(sel_d2.size());
}

void Codebook::check() const {
  if (u1.size() != N0 || u2.size() != N0 * NQ2() || u3.size() != N0 * NQ3())
    throw UsageError("codebook: layer sizes disagree with the index sets");
  if (sel_d2.size() != bins() || sel_d3.size() != bins() || x.size() != bins() * NP1e * NP1p)
    throw UsageError("codebook: bin tables disagree with the index sets");
  // q2 <-> (w1, w1p, w1d) round trip.
  for (std::size_t q = 0; q < NQ2(); ++q) {
    std::size_t w1d = q % N1d, w1p = (q / N1d) % N1p, w1 = q / (N1d * N1p);
    if (q2(w1, w1p, w1d) != q) throw UsageError("codebook: q2 index map is not bijective");
  }
  for (std::size_t q = 0; q < NQ3(); ++q)
    if (q3(q / N3d, q % N3d) != q) throw UsageError("codebook: q3 index map is not bijective");
  auto in_range = [&](const std::vector<Seq>& v, std::size_t k, bool allow_empty) {
    for (const auto& s : v) {
      if (s.empty() && allow_empty) continue;
      if (s.size() != static_cast<std::size_t>(n)) throw UsageError("codebook: sequence of wrong length");
      for (auto a : s)
        if (a >= k) throw UsageError("codebook: symbol outside its alphabet");
    }
  };
  in_range(u1, aux.m1(), false);
  in_range(u2, aux.m2(), false);
  in_range(u3, aux.m3(), false);
  in_range(x, aux.nx(), true);
}

Codebook build_codebook(const CodeConfig& cfg, const AuxJoint& aux) {
  if (cfg.n < 1) throw ValidationError("code config: n must be >= 1");
  if (!(cfg.eps > 0)) throw ValidationError("code config: eps must be > 0");
  if (aux.m1() > 255 || aux.m2() > 255 || aux.m3() > 255 || aux.nx() > 255)
    throw CapabilityError("alphabets above 255 symbols are not supported by the simulator");
  validate_config(cfg, aux);

  Codebook cb;
  cb.cfg = cfg;
  cb.aux = aux;
  cb.n = cfg.n;
  const int n = cfg.n;
  cb.N0 = set_size(n, cfg.R0);
  cb.N1e = set_size(n, cfg.R1e);
  cb.N1p = set_size(n, cfg.R1p);
  cb.N1d = set_size(n, cfg.R1d);
  cb.N3 = set_size(n, cfg.P3);
  cb.N3d = set_size(n, cfg.P3d);
  cb.NP1e = set_size(n, cfg.P1e);
  cb.NP1p = set_size(n, cfg.P1p);

  std::size_t words = cb.N0;
  words += checked_mul(cb.N0, cb.NQ2());
  words += checked_mul(cb.N0, cb.NQ3());
  words += checked_mul(checked_mul(cb.bins(), cb.NP1e), cb.NP1p);
  if (checked_mul(words, static_cast<std::size_t>(n)) > cfg.max_symbols)
    throw CapabilityError("codebook needs " + std::to_string(words * static_cast<std::size_t>(n)) +
                          " symbols, above max_symbols=" + std::to_string(cfg.max_symbols));

  const JointPmf j = aux.joint();
  const Tab t1 = table_of(j, {"U1"});
  const Tab t12 = table_of(j, {"U1", "U2"});
  const Tab t13 = table_of(j, {"U1", "U3"});
  const Tab t123 = table_of(j, {"U1", "U2", "U3"});
  const Tab t123x = table_of(j, {"U1", "U2", "U3", "X"});

  Rng rng(cfg.seed, Stream::Codebook, 0);
  const double eps = cfg.eps;
  for (std::size_t w0 = 0; w0 < cb.N0; ++w0)
    cb.u1.push_back(draw_conditional(rng, {}, t1, eps, n, cfg.max_tries, "p(u1)"));
  for (std::size_t w0 = 0; w0 < cb.N0; ++w0)
    for (std::size_t q = 0; q < cb.NQ2(); ++q)
      cb.u2.push_back(draw_conditional(rng, {&cb.u1[w0]}, t12, eps, n, cfg.max_tries, "p(u2|u1)"));
  for (std::size_t w0 = 0; w0 < cb.N0; ++w0)
    for (std::size_t q = 0; q < cb.NQ3(); ++q)
      cb.u3.push_back(draw_conditional(rng, {&cb.u1[w0]}, t13, eps, n, cfg.max_tries, "p(u3|u1)"));

  cb.sel_d2.assign(cb.bins(), -1);
  cb.sel_d3.assign(cb.bins(), -1);
  cb.x.assign(cb.bins() * cb.NP1e * cb.NP1p, Seq{});
  for (std::size_t w0 = 0; w0 < cb.N0; ++w0)
    for (std::size_t w1 = 0; w1 < cb.N1e; ++w1)
      for (std::size_t w1p = 0; w1p < cb.N1p; ++w1p)
        for (std::size_t p3 = 0; p3 < cb.N3; ++p3) {
          const std::size_t b = cb.bin(w0, w1, w1p, p3);
          bool found = false;
          for (std::size_t d2 = 0; d2 < cb.N1d && !found; ++d2)
            for (std::size_t d3 = 0; d3 < cb.N3d && !found; ++d3) {
              const Seq& a = cb.U2(w0, cb.q2(w1, w1p, d2));
              const Seq& c = cb.U3(w0, cb.q3(p3, d3));
              if (typical({&cb.u1[w0], &a, &c}, t123, eps)) {
                cb.sel_d2[b] = static_cast<int>(d2);
                cb.sel_d3[b] = static_cast<int>(d3);
                found = true;
              }
            }
          if (!found) continue;
          const Seq& a = cb.U2(w0, cb.q2(w1, w1p, static_cast<std::size_t>(cb.sel_d2[b])));
          const Seq& c = cb.U3(w0, cb.q3(p3, static_cast<std::size_t>(cb.sel_d3[b])));
          for (std::size_t p1 = 0; p1 < cb.NP1e; ++p1)
            for (std::size_t p1p = 0; p1p < cb.NP1p; ++p1p)
              cb.x[cb.xi(b, p1, p1p)] =
                  draw_conditional(rng, {&cb.u1[w0], &a, &c}, t123x, eps, n, cfg.max_tries, "p(x|u1,u2,u3)");
        }
  return cb;
}

Encoded encode(const Codebook& cb, std::size_t w0, std::size_t w1, std::size_t w2, std::uint64_t nonce) {
  if (w0 >= cb.N0 || w1 >= cb.N1e || w2 >= cb.NW2()) throw ValidationError("encode: message index out of range");
  Rng rng(cb.cfg.seed, Stream::Encoder, nonce);
  Encoded e;
  e.w1p = rng.below(cb.N1p);
  e.p1p = rng.below(cb.NP1p);
  const std::size_t p1 = w2 / cb.N3, p3 = w2 % cb.N3;
  const std::size_t b = cb.bin(w0, w1, e.w1p, p3);
  if (cb.sel_d2[b] < 0) throw DomainError("encode: product bin has no jointly typical pair");
  e.x = cb.x[cb.xi(b, p1, e.p1p)];
  return e;
}

Decoder::Decoder(const Codebook& cb, const Channel3& ch) : cb_(cb) {
  if (ch.nx() != cb.aux.nx()) throw ValidationError("decoder: channel and auxiliary input alphabets differ");
  const JointPmf j = induced_joint(ch, cb.aux);
  auto conv = [&](const Axes& a) {
    Tab t = table_of(j, a);
    return Decoder::Table{t.dims, t.p};
  };
  t1_ = conv({"U1", "U2", "U3", "X", "Y1"});
  t2a_ = conv({"U2", "Y2"});
  t2b_ = conv({"U1", "U2", "Y2"});
  t3_ = conv({"U3", "Y3"});
}

Decoded Decoder::decode(const Seq& y1, const Seq& y2, const Seq& y3) const {
  const Codebook& cb = cb_;
  const std::size_t n = static_cast<std::size_t>(cb.n);
  if (y1.size() != n || y2.size() != n || y3.size() != n) throw ValidationError("decode: output length differs from n");
  const double eps = cb.cfg.eps;
  auto tp = [&](const std::vector<const Seq*>& s, const Table& t) { return jointly_typical(s, t.dims, t.p, eps); };
  Decoded d;

  // Receiver 1: all layers jointly with y1; randomization indices are nuisance.
  {
    long hit[3] = {-1, -1, -1};
    bool amb = false;
    for (std::size_t w0 = 0; w0 < cb.N0 && !amb; ++w0)
      for (std::size_t w1 = 0; w1 < cb.N1e && !amb; ++w1)
        for (std::size_t w1p = 0; w1p < cb.N1p && !amb; ++w1p)
          for (std::size_t p3 = 0; p3 < cb.N3 && !amb; ++p3) {
            const std::size_t b = cb.bin(w0, w1, w1p, p3);
            if (cb.sel_d2[b] < 0) continue;
            const Seq& a = cb.U2(w0, cb.q2(w1, w1p, static_cast<std::size_t>(cb.sel_d2[b])));
            const Seq& c = cb.U3(w0, cb.q3(p3, static_cast<std::size_t>(cb.sel_d3[b])));
            for (std::size_t p1 = 0; p1 < cb.NP1e && !amb; ++p1)
              for (std::size_t p1p = 0; p1p < cb.NP1p; ++p1p) {
                if (!tp({&cb.u1[w0], &a, &c, &cb.x[cb.xi(b, p1, p1p)], &y1}, t1_)) continue;
                long m[3] = {static_cast<long>(w0), static_cast<long>(w1), static_cast<long>(p1 * cb.N3 + p3)};
                if (hit[0] < 0) {
                  std::copy(m, m + 3, hit);
                } else if (m[0] != hit[0] || m[1] != hit[1] || m[2] != hit[2]) {
                  amb = true;
                  break;
                }
              }
          }
    if (!amb && hit[0] >= 0) {
      d.w0_1 = hit[0];
      d.w1_1 = hit[1];
      d.w2_1 = hit[2];
    }
  }

  // Receiver 2: indirect decoding of w0 through u2, then w1 with the cloud center.
  {
    long w0h = -1;
    bool amb = false;
    for (std::size_t w0 = 0; w0 < cb.N0 && !amb; ++w0)
      for (std::size_t q = 0; q < cb.NQ2(); ++q)
        if (tp({&cb.U2(w0, q), &y2}, t2a_)) {
          if (w0h < 0)
            w0h = static_cast<long>(w0);
          else if (w0h != static_cast<long>(w0))
            amb = true;
          break;
        }
    if (!amb && w0h >= 0) {
      d.w0_2 = w0h;
      const std::size_t w0 = static_cast<std::size_t>(w0h);
      long w1h = -1;
      bool amb1 = false;
      for (std::size_t q = 0; q < cb.NQ2() && !amb1; ++q)
        if (tp({&cb.u1[w0], &cb.U2(w0, q), &y2}, t2b_)) {
          long w1 = static_cast<long>(q / (cb.N1p * cb.N1d));
          if (w1h < 0)
            w1h = w1;
          else if (w1h != w1)
            amb1 = true;
        }
      if (!amb1) d.w1_2 = w1h;
    }
  }

  // Receiver 3: indirect decoding of w0 through u3.
  {
    long w0h = -1;
    bool amb = false;
    for (std::size_t w0 = 0; w0 < cb.N0 && !amb; ++w0)
      for (std::size_t q = 0; q < cb.NQ3(); ++q)
        if (tp({&cb.U3(w0, q), &y3}, t3_)) {
          if (w0h < 0)
            w0h = static_cast<long>(w0);
          else
            amb = true;
          break;
        }
    if (!amb) d.w0_3 = w0h;
  }
  return d;
}

Decoded decode_all(const Codebook& cb, const Channel3& ch, const Seq& y1, const Seq& y2, const Seq& y3) {
  return Decoder(cb, ch).decode(y1, y2, y3);
}

Interval wilson(std::size_t k, std::size_t n) {
  if (n == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  const double nn = static_cast<double>(n), ph = static_cast<double>(k) / nn;
  const double den = 1 + z * z / nn;
  const double mid = (ph + z * z / (2 * nn)) / den;
  const double half = z * std::sqrt(ph * (1 - ph) / nn + z * z / (4 * nn * nn)) / den;
  Interval r{std::max(0.0, mid - half), std::min(1.0, mid + half)};
  // Keep the point estimate inside against round-off at the ends.
  r.lo = std::min(r.lo, ph);
  r.hi = std::max(r.hi, ph);
  return r;
}

SimReport simulate(const CodeConfig& cfg, const AuxJoint& aux, const Channel3& ch, std::size_t trials,
                   std::uint64_t seed, int threads) {
  CodeConfig c = cfg;
  c.seed = seed;
  Codebook cb = build_codebook(c, aux);
  return simulate(cb, ch, trials, seed, threads);
}

SimReport simulate(const Codebook& cb, const Channel3& ch, std::size_t trials, std::uint64_t seed, int threads) {
  const auto t0 = std::chrono::steady_clock::now();
  const Decoder dec(cb, ch);
  const std::size_t n = static_cast<std::size_t>(cb.n);
  const std::size_t ny1 = ch.ny1(), ny2 = ch.ny2(), ny3 = ch.ny3(), k = ny1 * ny2 * ny3;
  // Bit 0..2: receiver errors, bit 3: encoding failure.
  std::vector<std::uint8_t> out(trials, 0);
  parallel_for(trials, resolve_threads(threads), [&](std::size_t i) {
    Rng rng(seed, Stream::Trial, i);
    const std::size_t w0 = rng.below(cb.N0), w1 = rng.below(cb.N1e), w2 = rng.below(cb.NW2());
    Encoded e;
    try {
      e = encode(cb, w0, w1, w2, i);
    } catch (const DomainError&) {
      out[i] = 0x0F;
      return;
    }
    Seq y1(n), y2(n), y3(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double* row = &ch.probs()[e.x[t] * k];
      std::size_t c = rng.categorical(row, k);
      y3[t] = static_cast<std::uint8_t>(c % ny3);
      y2[t] = static_cast<std::uint8_t>((c / ny3) % ny2);
      y1[t] = static_cast<std::uint8_t>(c / (ny2 * ny3));
    }
    Decoded d = dec.decode(y1, y2, y3);
    std::uint8_t m = 0;
    if (d.w0_1 != static_cast<long>(w0) || d.w1_1 != static_cast<long>(w1) || d.w2_1 != static_cast<long>(w2))
      m |= 1;
    if (d.w0_2 != static_cast<long>(w0) || d.w1_2 != static_cast<long>(w1)) m |= 2;
    if (d.w0_3 != static_cast<long>(w0)) m |= 4;
    out[i] = m;
  });
  SimReport r;
  r.trials = trials;
  for (auto m : out) {
    for (int k2 = 0; k2 < 3; ++k2) r.errors[k2] += (m >> k2) & 1;
    r.encode_failures += (m >> 3) & 1;
  }
  for (int k2 = 0; k2 < 3; ++k2) {
    r.pe[k2] = trials ? static_cast<double>(r.errors[k2]) / static_cast<double>(trials) : 0.0;
    r.ci[k2] = wilson(r.errors[k2], trials);
  }
  r.pairing_failure_fraction = cb.pairing_failure_fraction();
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace {

double plogp(double p) { return p > 0 ? -p * std::log2(p) : 0.0; }

struct EqSums {
  double a12 = 0, a1 = 0, a2 = 0, ay = 0;
  EqSums& operator+=(const EqSums& o) {
    a12 += o.a12;
    a1 += o.a1;
    a2 += o.a2;
    ay += o.ay;
    return *this;
  }
};

}  // namespace

EquivocationReport exact_equivocation(const Codebook& cb, const Channel3& ch, int threads, std::size_t cap) {
  if (ch.nx() != cb.aux.nx()) throw ValidationError("equivocation: channel and auxiliary input alphabets differ");
  const std::size_t n = static_cast<std::size_t>(cb.n), ny3 = ch.ny3();
  double outcomes = std::pow(static_cast<double>(ny3), static_cast<double>(n));
  if (outcomes > static_cast<double>(cap))
    throw CapabilityError("equivocation needs " + std::to_string(ny3) + "^" + std::to_string(n) +
                          " wiretap outcomes, above the cap of " + std::to_string(cap) + "; use a smaller n");
  for (int s : cb.sel_d2)
    if (s < 0) throw DomainError("equivocation: codebook has unpaired bins, the encoder is undefined there");
  const std::size_t total = static_cast<std::size_t>(outcomes + 0.5);
  const std::vector<double> w3 = ch.marginal(3);

  const std::size_t NW1 = cb.N1e, NW2 = cb.NW2();
  const double prior = 1.0 / (static_cast<double>(cb.N0) * NW1 * NW2 * cb.N1p * cb.NP1p);

  constexpr std::size_t kChunk = 1024;
  const std::size_t chunks = (total + kChunk - 1) / kChunk;
  std::vector<EqSums> part(chunks);
  parallel_for(chunks, resolve_threads(threads), [&](std::size_t ci) {
    EqSums s;
    Seq y(n);
    std::vector<double> pw(NW1 * NW2), p1(NW1), p2(NW2);
    const std::size_t lo = ci * kChunk, hi = std::min(total, lo + kChunk);
    for (std::size_t idx = lo; idx < hi; ++idx) {
      std::size_t v = idx;
      for (std::size_t t = n; t-- > 0;) {
        y[t] = static_cast<std::uint8_t>(v % ny3);
        v /= ny3;
      }
      std::fill(pw.begin(), pw.end(), 0.0);
      for (std::size_t w0 = 0; w0 < cb.N0; ++w0)
        for (std::size_t w1 = 0; w1 < NW1; ++w1)
          for (std::size_t w1p = 0; w1p < cb.N1p; ++w1p)
            for (std::size_t p3 = 0; p3 < cb.N3; ++p3) {
              const std::size_t b = cb.bin(w0, w1, w1p, p3);
              for (std::size_t p1 = 0; p1 < cb.NP1e; ++p1)
                for (std::size_t p1p = 0; p1p < cb.NP1p; ++p1p) {
                  const Seq& x = cb.x[cb.xi(b, p1, p1p)];
                  double l = prior;
                  for (std::size_t t = 0; t < n && l > 0; ++t) l *= w3[x[t] * ny3 + y[t]];
                  pw[w1 * NW2 + p1 * cb.N3 + p3] += l;
                }
            }
      std::fill(p1.begin(), p1.end(), 0.0);
      std::fill(p2.begin(), p2.end(), 0.0);
      double py = 0;
      for (std::size_t a = 0; a < NW1; ++a)
        for (std::size_t c = 0; c < NW2; ++c) {
          const double p = pw[a * NW2 + c];
          s.a12 += plogp(p);
          p1[a] += p;
          p2[c] += p;
        }
      for (std::size_t a = 0; a < NW1; ++a) {
        s.a1 += plogp(p1[a]);
        py += p1[a];
      }
      for (std::size_t c = 0; c < NW2; ++c) s.a2 += plogp(p2[c]);
      s.ay += plogp(py);
    }
    part[ci] = s;
  });
  // Pairwise tree reduction: the summation order depends only on the chunk count.
  for (std::size_t step = 1; step < chunks; step *= 2)
    for (std::size_t i = 0; i + step < chunks; i += 2 * step) part[i] += part[i + step];
  const EqSums tot = chunks ? part[0] : EqSums{};

  EquivocationReport r;
  r.n = cb.n;
  r.h_w1 = std::log2(static_cast<double>(NW1));
  r.h_w2 = std::log2(static_cast<double>(NW2));
  auto fix = [](double v, double hi) { return std::min(hi, std::max(0.0, v)); };
  r.h_w1_y3 = fix(tot.a1 - tot.ay, r.h_w1);
  r.h_w2_y3 = fix(tot.a2 - tot.ay, r.h_w2);
  r.h_w12_y3 = fix(tot.a12 - tot.ay, r.h_w1 + r.h_w2);
  return r;
}

std::vector<StudyRow> secrecy_gap_study(const std::vector<CodeConfig>& grid, const AuxJoint& aux,
                                        const Channel3& ch, const std::vector<std::uint64_t>& seeds,
                                        int threads) {
  std::vector<StudyRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::uint64_t s : seeds) {
      CodeConfig c = grid[g];
      c.seed = s;
      Codebook cb = build_codebook(c, aux);
      EquivocationReport e = exact_equivocation(cb, ch, threads);
      StudyRow r;
      r.config = g;
      r.seed = s;
      r.n = c.n;
      r.R1p = c.R1p;
      r.P1p = c.P1p;
      r.R1e_actual = e.h_w1 / c.n;
      r.R2e_actual = std::log2(static_cast<double>(cb.NP1e * cb.N3)) / c.n;
      r.e1 = e.rate_w1_y3();
      r.e2 = e.rate_w2_y3();
      r.e12 = e.rate_w12_y3();
      r.gap1 = r.R1e_actual - r.e1;
      r.gap2 = r.R2e_actual - r.e2;
      r.gap12 = r.R1e_actual + r.R2e_actual - r.e12;
      rows.push_back(r);
    }
  return rows;
}

std::string study_csv(const std::vector<StudyRow>& rows) {
  std::ostringstream o;
  o << "config,seed,n,R1p,P1p,R1e,R2e,H_W1_Y3_per_n,H_W2_Y3_per_n,H_W12_Y3_per_n,gap_R1e,gap_R2e,gap_sum\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%zu,%llu,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  r.config, static_cast<unsigned long long>(r.seed), r.n, r.R1p, r.P1p, r.R1e_actual, r.R2e_actual,
                  r.e1, r.e2, r.e12, r.gap1, r.gap2, r.gap12);
    o << buf;
  }
  return o.str();
}

std::string sim_report_to_json(const SimReport& r) {
  json j;
  j["trials"] = r.trials;
  const char* names[3] = {"Y1", "Y2", "Y3"};
  for (int k = 0; k < 3; ++k) {
    json e;
    e["errors"] = r.errors[k];
    e["pe"] = r.pe[k];
    e["ci95"] = {r.ci[k].lo, r.ci[k].hi};
    j["receivers"][names[k]] = e;
  }
  j["pairing_failure_fraction"] = r.pairing_failure_fraction;
  j["encode_failures"] = r.encode_failures;
  return j.dump(2);
}

std::string equivocation_to_json(const EquivocationReport& r) {
  json j;
  j["n"] = r.n;
  j["H_W1"] = r.h_w1;
  j["H_W2"] = r.h_w2;
  j["H_W1_given_Y3"] = r.h_w1_y3;
  j["H_W2_given_Y3"] = r.h_w2_y3;
  j["H_W12_given_Y3"] = r.h_w12_y3;
  j["per_use"] = {{"W1", r.rate_w1_y3()}, {"W2", r.rate_w2_y3()}, {"W12", r.rate_w12_y3()}};
  return j.dump(2);
}

}  // namespace bcsl
