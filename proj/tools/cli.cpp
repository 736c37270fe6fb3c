#include "cli.hpp"

#include <openssl/evp.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcsl/codec.hpp"
#include "bcsl/error.hpp"
#include "bcsl/fme.hpp"
#include "bcsl/orderings.hpp"
#include "bcsl/parallel.hpp"
#include "bcsl/regions.hpp"

#ifndef BCSL_VERSION
#define BCSL_VERSION "0.0.0"
#endif

namespace bcsl::cli {

using nlohmann::json;

namespace {

struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

// Collects everything the manifest needs while a command runs.
struct Run {
  std::string command;
  json params = json::object();
  json inputs = json::array();
  json extra = json::object();
  std::optional<std::uint64_t> seed;
  std::string started = utc_now();

  std::string input(const std::string& path) {
    std::string bytes = read_file(path);
    inputs.push_back({{"path", path}, {"sha256", sha256_hex(bytes)}, {"bytes", bytes.size()}});
    return bytes;
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw FileError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw FileError("write failed for '" + path + "'");
}

// Primary output to --out or stdout; the manifest goes next to it or to stderr.
void finish(Run& run, const std::string& out_path, const std::string& text, std::ostream& out, std::ostream& err) {
  if (out_path.empty())
    out << text << (text.empty() || text.back() == '\n' ? "" : "\n");
  else
    write_text(out_path, text);
  json m;
  m["command"] = run.command;
  m["parameters"] = run.params;
  m["inputs"] = run.inputs;
  m["seed"] = run.seed ? json(*run.seed) : json(nullptr);
  m["version"] = BCSL_VERSION;
  m["started"] = run.started;
  m["finished"] = utc_now();
  if (!run.extra.empty()) m["run"] = run.extra;
  if (!out_path.empty()) {
    m["output"] = {{"path", out_path}, {"sha256", sha256_hex(text)}};
    write_text(out_path + ".manifest.json", m.dump(2) + "\n");
  } else {
    err << m.dump() << "\n";
  }
}

std::pair<int, int> parse_pair(const std::string& s) {
  int a = 0, b = 0;
  char c = 0;
  std::istringstream is(s);
  if (!(is >> a >> c >> b) || c != ',' || !is.eof()) throw UsageError("--pair expects 'a,b', got '" + s + "'");
  return {a, b};
}

std::array<double, kNumRates> parse_weights(const std::string& s) {
  std::array<double, kNumRates> w{};
  std::istringstream is(s);
  std::string tok;
  std::size_t i = 0;
  while (std::getline(is, tok, ',')) {
    if (i >= w.size()) throw UsageError("--weights expects 5 comma-separated numbers");
    try {
      std::size_t used = 0;
      w[i] = std::stod(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("--weights: '" + tok + "' is not a number");
    }
    ++i;
  }
  if (i != w.size()) throw UsageError("--weights expects 5 comma-separated numbers");
  return w;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void diagnose(std::ostream& err, const char* kind, const std::string& msg) {
  err << json({{"error", kind}, {"message", msg}}).dump() << "\n";
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FileError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Channel3 parse_channel(const std::string& path) {
  try {
    return channel_from_json(read_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rate-equivocation toolkit for three-receiver broadcast channels", "bcsl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", BCSL_VERSION);

  std::string channel, aux_path, out_path, config_path, grid_path, bound = "inner3dm", predicate = "all",
                                                                     pair = "1,3", target = "theorem1";
  std::vector<std::string> ordering_paths, weights, order, drop;
  std::optional<std::uint64_t> seed;
  int restarts = 0, grid = 64, iters = 0, threads = 0, replicates = 1;
  std::size_t trials = 10000, m1 = 0, m2 = 0, m3 = 0;
  bool assume = false, strict = false, symbolic = false, no_ident = false;

  auto add_threads = [&](CLI::App* c) {
    c->add_option("--threads", threads, "Worker threads (default: BCSL_THREADS or 1)")->check(CLI::PositiveNumber);
  };

  auto* ord = app.add_subcommand("orderings", "Test degraded / less noisy / more capable orderings");
  ord->add_option("--channel", channel, "Channel JSON")->required();
  ord->add_option("--pair", pair, "Receiver pair a,b (default 1,3)");
  ord->add_option("--predicate", predicate, "degraded, more_capable, less_noisy or all")
      ->check(CLI::IsMember({"degraded", "more_capable", "less_noisy", "all"}));
  ord->add_option("--restarts", restarts, "Multi-start count");
  ord->add_option("--grid", grid, "Simplex grid steps per dimension");
  ord->add_option("--seed", seed, "Master seed");
  ord->add_option("--out", out_path, "Output file");
  add_threads(ord);

  auto* reg = app.add_subcommand("regions", "Evaluate and optimize rate regions");
  reg->require_subcommand(1);
  auto* rev = reg->add_subcommand("eval", "Instantiate a bound for one auxiliary");
  auto* rfr = reg->add_subcommand("frontier", "Maximize a weighted rate sum over auxiliaries");
  for (auto* c : {rev, rfr}) {
    c->add_option("--bound", bound, "inner3dm, outer3dm, outer_nosecrecy, inner_type1, outer_type1, region_type2");
    c->add_option("--channel", channel, "Channel JSON")->required();
    c->add_option("--ordering", ordering_paths, "Ordering report JSON (repeatable)");
    c->add_flag("--assume-ordering", assume, "Skip the ordering precondition; output is marked unverified");
    c->add_option("--out", out_path, "Output file");
  }
  rev->add_option("--aux", aux_path, "Auxiliary joint JSON")->required();
  rfr->add_option("--weights", weights, "Five weights for R0,R1,R1e,R2,R2e (repeatable)")->required();
  rfr->add_option("--seed", seed, "Master seed");
  rfr->add_option("--restarts", restarts, "Restarts (default 16)");
  rfr->add_option("--iters", iters, "Coordinate-ascent sweeps per restart (default 300)");
  rfr->add_option("--m1", m1, "|U1| (default nx+1)");
  rfr->add_option("--m2", m2, "|U2| (default nx+1)");
  rfr->add_option("--m3", m3, "|U3| (default nx+1)");
  add_threads(rfr);

  auto* fm = app.add_subcommand("fme", "Fourier-Motzkin re-derivations");
  fm->require_subcommand(1);
  auto* fder = fm->add_subcommand("derive", "Eliminate the coding constraints and compare with a stated region");
  fder->add_option("--target", target, "theorem1 or corollary1")->check(CLI::IsMember({"theorem1", "corollary1"}));
  fder->add_option("--order", order, "Elimination order")->delimiter(',');
  fder->add_option("--drop-tag", drop, "Drop input rows whose tag has this prefix (repeatable)");
  fder->add_flag("--no-identities", no_ident, "Ignore declared information identities");
  auto* fapp = fm->add_subcommand("appendix", "Layered-scheme reduction check");
  fapp->add_flag("--symbolic", symbolic, "Eliminate the extra layer's rates instead of setting them to zero");
  for (auto* c : {fder, fapp}) {
    c->add_flag("--strict", strict, "Exit 1 when the comparison does not hold");
    c->add_option("--out", out_path, "Output file");
  }

  auto* sim = app.add_subcommand("sim", "Random-code simulation and exact equivocation");
  sim->require_subcommand(1);
  auto* srun = sim->add_subcommand("run", "Monte Carlo block error rates");
  auto* seq = sim->add_subcommand("equivocation", "Exact wiretapper equivocation of one codebook");
  auto* sst = sim->add_subcommand("study", "Equivocation over a grid of code configurations");
  for (auto* c : {srun, seq, sst}) {
    c->add_option("--channel", channel, "Channel JSON")->required();
    c->add_option("--aux", aux_path, "Auxiliary joint JSON")->required();
    c->add_option("--seed", seed, "Master seed");
    c->add_option("--out", out_path, "Output file");
    add_threads(c);
  }
  srun->add_option("--config", config_path, "Code config JSON")->required();
  srun->add_option("--trials", trials, "Trials (default 10000)");
  seq->add_option("--config", config_path, "Code config JSON")->required();
  sst->add_option("--grid", grid_path, "JSON with a 'configs' array of code configs")->required();
  sst->add_option("--replicates", replicates, "Seeds seed, seed+1, ... per config (default 1)")
      ->check(CLI::PositiveNumber);

  std::vector<const char*> argv{"bcsl"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  auto need_seed = [&](const char* cmd) {
    if (!seed) throw UsageError(std::string(cmd) + " is stochastic and requires --seed");
    return *seed;
  };

  try {
    Run run;
    int nthreads = resolve_threads(threads);
    if (ord->parsed()) {
      run.command = "orderings";
      auto [a, b] = parse_pair(pair);
      const Channel3 ch = channel_from_json(run.input(channel));
      SearchConfig sc;
      if (restarts > 0) sc.restarts = restarts;
      sc.grid = grid;
      sc.threads = nthreads;
      if (predicate != "degraded") sc.seed = need_seed("orderings");
      run.seed = seed;
      run.params = {{"pair", {a, b}}, {"predicate", predicate}, {"restarts", sc.restarts}, {"grid", sc.grid},
                    {"threads", nthreads}};
      std::string text;
      if (predicate == "degraded") {
        text = ordering_to_json(is_degraded(ch, a, b));
      } else if (predicate == "more_capable") {
        text = ordering_to_json(is_more_capable(ch, a, b, sc));
      } else if (predicate == "less_noisy") {
        text = ordering_to_json(is_less_noisy(ch, a, b, sc));
      } else {
        ImplicationReport r = implication_check(ch, a, b, sc);
        json j;
        j["degraded"] = json::parse(ordering_to_json(r.degraded));
        j["less_noisy"] = json::parse(ordering_to_json(r.less_noisy));
        j["more_capable"] = json::parse(ordering_to_json(r.more_capable));
        j["consistent"] = r.consistent;
        j["violations"] = r.violations;
        text = j.dump(2);
      }
      finish(run, out_path, text, out, err);
      return kOk;
    }

    if (rev->parsed() || rfr->parsed()) {
      const BoundId id = bound_from_name(bound);
      const Channel3 ch = channel_from_json(run.input(channel));
      BoundOptions bo;
      bo.assume_ordering = assume;
      for (const auto& p : ordering_paths) bo.orderings.push_back(ordering_from_json(run.input(p)));
      run.params = {{"bound", bound_name(id)}, {"assume_ordering", assume}, {"orderings", ordering_paths.size()}};
      if (rev->parsed()) {
        run.command = "regions eval";
        const AuxJoint aux = aux_from_json(run.input(aux_path));
        finish(run, out_path, polytope_to_json(eval_bound(id, ch, aux, bo)), out, err);
        return kOk;
      }
      run.command = "regions frontier";
      FrontierConfig fc;
      fc.seed = need_seed("regions frontier");
      run.seed = seed;
      if (restarts > 0) fc.restarts = restarts;
      if (iters > 0) fc.iters = iters;
      fc.m1 = m1;
      fc.m2 = m2;
      fc.m3 = m3;
      fc.threads = nthreads;
      run.params["restarts"] = fc.restarts;
      run.params["iters"] = fc.iters;
      run.params["cardinalities"] = {fc.m1, fc.m2, fc.m3};
      run.params["weights"] = weights;
      run.params["threads"] = nthreads;
      std::string csv = "w_R0,w_R1,w_R1e,w_R2,w_R2e,R0,R1,R1e,R2,R2e,value\n";
      json side;
      side["bound"] = bound_name(id);
      side["rows"] = json::array();
      for (const auto& ws : weights) {
        const auto w = parse_weights(ws);
        FrontierResult r = max_weighted_rate(id, ch, w, fc, bo);
        for (double v : w) csv += num(v) + ",";
        for (int i = 0; i < kNumRates; ++i) csv += num(r.rates[i]) + ",";
        csv += num(r.value) + "\n";
        side["rows"].push_back({{"weights", w},
                                {"value", r.value},
                                {"best_restart", r.best_restart},
                                {"aux", json::parse(aux_to_json(r.aux))},
                                {"notes", r.notes}});
      }
      if (!out_path.empty()) {
        write_text(out_path + ".aux.json", side.dump(2) + "\n");
        run.extra["sidecar"] = out_path + ".aux.json";
      } else {
        run.extra["sidecar"] = side;
      }
      finish(run, out_path, csv, out, err);
      return kOk;
    }

    if (fder->parsed()) {
      run.command = "fme derive";
      fme::DeriveOptions o;
      o.order = order;
      o.drop_tags = drop;
      o.without_identities = no_ident;
      run.params = {{"target", target}, {"order", order}, {"drop_tags", drop}, {"no_identities", no_ident},
                    {"strict", strict}};
      fme::Derivation d = target == "theorem1" ? fme::derive_inner_bound(o) : fme::derive_type1_bound(o);
      finish(run, out_path, fme::report_to_json(d.report, fme::derivation_summary_json(d)), out, err);
      if (strict && !d.report.equivalent) {
        diagnose(err, "mismatch", "derived region does not match " + target);
        return kDomain;
      }
      return kOk;
    }

    if (fapp->parsed()) {
      run.command = "fme appendix";
      run.params = {{"symbolic", symbolic}, {"strict", strict}};
      fme::AppendixResult r = fme::appendix_reduction(!symbolic);
      finish(run, out_path, fme::report_to_json(r.report), out, err);
      if (strict && !r.report.equivalent) {
        diagnose(err, "mismatch", "appendix system does not reduce as expected");
        return kDomain;
      }
      return kOk;
    }

    if (srun->parsed() || seq->parsed() || sst->parsed()) {
      const Channel3 ch = channel_from_json(run.input(channel));
      const AuxJoint aux = aux_from_json(run.input(aux_path));
      run.params["threads"] = nthreads;
      if (sst->parsed()) {
        run.command = "sim study";
        const std::uint64_t s0 = need_seed("sim study");
        run.seed = s0;
        json g;
        try {
          g = json::parse(run.input(grid_path));
        } catch (const json::exception& e) {
          throw ValidationError(grid_path + ": malformed JSON: " + e.what());
        }
        if (!g.is_object() || !g.contains("configs") || !g["configs"].is_array())
          throw ValidationError(grid_path + ": expected an object with a 'configs' array");
        std::vector<CodeConfig> grid_cfg;
        for (const auto& c : g["configs"]) grid_cfg.push_back(config_from_json(c.dump()));
        std::vector<std::uint64_t> seeds;
        for (int k = 0; k < replicates; ++k) seeds.push_back(s0 + static_cast<std::uint64_t>(k));
        run.params["replicates"] = replicates;
        run.params["configs"] = grid_cfg.size();
        finish(run, out_path, study_csv(secrecy_gap_study(grid_cfg, aux, ch, seeds, nthreads)), out, err);
        return kOk;
      }
      CodeConfig cfg = config_from_json(run.input(config_path));
      cfg.seed = need_seed(srun->parsed() ? "sim run" : "sim equivocation");
      run.seed = cfg.seed;
      run.params["config"] = json::parse(config_to_json(cfg));
      if (srun->parsed()) {
        run.command = "sim run";
        run.params["trials"] = trials;
        SimReport r = simulate(cfg, aux, ch, trials, cfg.seed, nthreads);
        run.extra["wall_seconds"] = r.wall_seconds;
        finish(run, out_path, sim_report_to_json(r), out, err);
        return kOk;
      }
      run.command = "sim equivocation";
      Codebook cb = build_codebook(cfg, aux);
      finish(run, out_path, equivocation_to_json(exact_equivocation(cb, ch, nthreads)), out, err);
      return kOk;
    }
    err << app.help();
    return kUsage;
  } catch (const UsageError& e) {
    diagnose(err, "usage", e.what());
    return kUsage;
  } catch (const ValidationError& e) {
    diagnose(err, "validation", e.what());
    return kDomain;
  } catch (const DomainError& e) {
    diagnose(err, "domain", e.what());
    return kDomain;
  } catch (const CapabilityError& e) {
    diagnose(err, "capability", e.what());
    return kDomain;
  } catch (const FileError& e) {
    diagnose(err, "file", e.what());
    return kDomain;
  } catch (const json::exception& e) {
    diagnose(err, "json", e.what());
    return kDomain;
  }
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace bcsl::cli
