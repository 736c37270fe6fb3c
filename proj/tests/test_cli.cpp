#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <nlohmann/json.hpp>

#include "bcsl/channel.hpp"
#include "bcsl/codec.hpp"
#include "bcsl/orderings.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kData = BCSL_DATA_DIR;

struct Result {
  int code;
  std::string out, err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  int code = bcsl::cli::dispatch(args, o, e);
  return {code, o.str(), e.str()};
}

std::string data(const std::string& f) { return kData + "/" + f; }

fs::path scratch() {
  static fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("bcsl_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("usage errors exit 2") {
  CHECK(run({}).code == bcsl::cli::kUsage);
  CHECK(run({"frobnicate"}).code == bcsl::cli::kUsage);
  CHECK(run({"orderings"}).code == bcsl::cli::kUsage);
  auto r = run({"sim", "run", "--channel", data("bsc_toy.json"), "--aux", data("aux_u2x.json"), "--config",
                data("code_toy.json")});
  CHECK(r.code == bcsl::cli::kUsage);
  CHECK(r.err.find("--seed") != std::string::npos);
  CHECK(run({"regions", "frontier", "--channel", data("bsc_toy.json"), "--weights", "1,2", "--seed", "1"}).code ==
        bcsl::cli::kUsage);
}

TEST_CASE("sha256 of a known string") {
  CHECK(bcsl::cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(bcsl::cli::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("fme derive reports a two-way match") {
  auto r = run({"fme", "derive", "--target", "theorem1"});
  REQUIRE(r.code == bcsl::cli::kOk);
  auto j = json::parse(r.out);
  CHECK(j.dump().find("\"holds\":true") != std::string::npos);
  // Manifest on stderr when there is no --out.
  auto m = json::parse(r.err);
  CHECK(m["command"] == "fme derive");

  auto s = run({"fme", "derive", "--target", "corollary1", "--strict"});
  CHECK(s.code == bcsl::cli::kDomain);
  CHECK(run({"fme", "derive", "--target", "corollary1"}).code == bcsl::cli::kOk);
}

TEST_CASE("outer bound without ordering evidence is a domain error") {
  auto r = run({"regions", "eval", "--bound", "outer3dm", "--channel", data("bsc_toy.json"), "--aux",
                data("aux_u2x.json")});
  CHECK(r.code == bcsl::cli::kDomain);
  auto e = json::parse(r.err);
  CHECK(e["error"].get<std::string>().size() > 0);
  CHECK(e["message"].get<std::string>().find("is more capable than") != std::string::npos);
}

TEST_CASE("ordering report feeds the outer bound") {
  auto ord = (scratch() / "mc13.json").string();
  auto a = run({"orderings", "--channel", data("bsc_toy.json"), "--pair", "1,3", "--predicate", "more_capable",
                "--seed", "4", "--out", ord});
  REQUIRE(a.code == bcsl::cli::kOk);
  CHECK(fs::exists(ord + ".manifest.json"));
  auto rep = bcsl::ordering_from_json(slurp(ord));
  CHECK(rep.verdict == bcsl::Verdict::True);

  auto b = run({"regions", "eval", "--bound", "outer3dm", "--channel", data("bsc_toy.json"), "--aux",
                data("aux_u2x.json"), "--ordering", ord});
  REQUIRE(b.code == bcsl::cli::kOk);
  CHECK(b.out.find("precondition verified") != std::string::npos);

  auto c = run({"regions", "eval", "--bound", "outer3dm", "--channel", data("bsc_toy.json"), "--aux",
                data("aux_u2x.json"), "--assume-ordering"});
  REQUIRE(c.code == bcsl::cli::kOk);
  CHECK(c.out.find("condition unverified") != std::string::npos);
}

TEST_CASE("bad input files exit 1 with a JSON diagnostic") {
  auto bad = scratch() / "bad_channel.json";
  std::ofstream(bad) << R"({"nx":2,"ny1":2,"ny2":1,"ny3":1,"p":[[[[0.5]],[[0.4]]],[[[0.5]],[[0.5]]]]})";
  auto r = run({"orderings", "--channel", bad.string(), "--predicate", "degraded"});
  CHECK(r.code == bcsl::cli::kDomain);
  auto e = json::parse(r.err);
  CHECK(e["message"].get<std::string>().find("x=0") != std::string::npos);

  CHECK(run({"orderings", "--channel", (scratch() / "missing.json").string(), "--predicate", "degraded"}).code ==
        bcsl::cli::kDomain);
  auto notjson = scratch() / "notjson.json";
  std::ofstream(notjson) << "{ nope";
  CHECK(run({"orderings", "--channel", notjson.string(), "--predicate", "degraded"}).code == bcsl::cli::kDomain);
}

TEST_CASE("key order in the channel file does not matter") {
  auto text = bcsl::cli::read_file(data("bsc_toy.json"));
  auto j = json::parse(text);
  std::string permuted = "{\"p\":" + j["p"].dump() + ",\"ny3\":2,\"ny2\":2,\"nx\":2,\"ny1\":2}";
  auto path = scratch() / "permuted.json";
  std::ofstream(path) << permuted;
  auto a = bcsl::cli::parse_channel(data("bsc_toy.json"));
  auto b = bcsl::cli::parse_channel(path.string());
  CHECK(a.probs() == b.probs());
  auto ra = run({"orderings", "--channel", data("bsc_toy.json"), "--predicate", "degraded"});
  auto rb = run({"orderings", "--channel", path.string(), "--predicate", "degraded"});
  CHECK(ra.out == rb.out);
}

TEST_CASE("sim run output is reproducible, thread-independent and described by its manifest") {
  auto o1 = (scratch() / "run1.json").string(), o8 = (scratch() / "run8.json").string();
  std::vector<std::string> base{"sim", "run", "--channel", data("bsc_toy.json"), "--aux", data("aux_u2x.json"),
                                "--config", data("code_toy.json"), "--trials", "2000", "--seed", "7"};
  auto a1 = base, a8 = base;
  a1.insert(a1.end(), {"--threads", "1", "--out", o1});
  a8.insert(a8.end(), {"--threads", "8", "--out", o8});
  REQUIRE(run(a1).code == bcsl::cli::kOk);
  REQUIRE(run(a8).code == bcsl::cli::kOk);
  CHECK(slurp(o1) == slurp(o8));

  auto m = json::parse(slurp(o1 + ".manifest.json"));
  CHECK(m["seed"] == 7);
  CHECK(m["command"] == "sim run");
  CHECK(m["output"]["sha256"] == bcsl::cli::sha256_hex(slurp(o1)));
  REQUIRE(m["inputs"].size() == 3);
  CHECK(m["inputs"][0]["sha256"] == bcsl::cli::sha256_hex(slurp(data("bsc_toy.json"))));

  auto j = json::parse(slurp(o1));
  CHECK(j.dump().find("Y1") != std::string::npos);
}

TEST_CASE("sim equivocation and study write parseable outputs") {
  auto e = run({"sim", "equivocation", "--channel", data("bsc_wiretap.json"), "--aux", data("aux_u2x.json"),
                "--config", data("code_wiretap.json"), "--seed", "1"});
  REQUIRE(e.code == bcsl::cli::kOk);
  auto j = json::parse(e.out);
  CHECK(j.contains("H_W1_given_Y3"));
  CHECK(j["H_W1_given_Y3"].get<double>() >= 0.0);

  auto s = run({"sim", "study", "--channel", data("bsc_wiretap.json"), "--aux", data("aux_u2x.json"), "--grid",
                data("grid_binning.json"), "--seed", "1", "--replicates", "3"});
  REQUIRE(s.code == bcsl::cli::kOk);
  std::istringstream lines(s.out);
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 1 + 2 * 3);
  CHECK(s.out.rfind("config,seed,n,", 0) == 0);
}

TEST_CASE("frontier writes a CSV with an auxiliary sidecar") {
  auto out = (scratch() / "front.csv").string();
  auto r = run({"regions", "frontier", "--bound", "inner3dm", "--channel", data("bsc_wiretap.json"), "--weights",
                "0,0,0,0,1", "--seed", "3", "--restarts", "2", "--iters", "60", "--out", out});
  REQUIRE(r.code == bcsl::cli::kOk);
  auto csv = slurp(out);
  CHECK(csv.rfind("w_R0,", 0) == 0);
  REQUIRE(fs::exists(out + ".aux.json"));
  auto sidecar = json::parse(slurp(out + ".aux.json"));
  CHECK(!sidecar.empty());
}
