#include <doctest.h>

#include <algorithm>
#include <map>

#include <json.hpp>

#include "bcsl/channel.hpp"
#include "bcsl/error.hpp"
#include "bcsl/info.hpp"
#include "helpers.hpp"

using namespace bcsl;

namespace {

// Frozen from tests/oracle/oracle.py.
constexpr double kH09 = 0.4689955935892812;
constexpr double kBsc02Capacity = 0.2780719051126379;

JointPmf random_joint(Rng& rng, const Axes& axes, const std::vector<std::size_t>& dims) {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return JointPmf(axes, dims, rng.dirichlet(n, 0.7));
}

// Independent brute force: I(A;B|C) from explicit marginal tables over flat
// multi-indices, no use of the library's entropy helpers.
double brute_cmi(const JointPmf& j, const std::vector<std::size_t>& A, const std::vector<std::size_t>& B,
                 const std::vector<std::size_t>& C) {
  const auto& dims = j.dims();
  const auto& p = j.probs();
  std::map<std::vector<std::size_t>, double> pabc, pac, pbc, pc;
  std::vector<std::size_t> idx(dims.size(), 0);
  for (std::size_t flat = 0; flat < p.size(); ++flat) {
    std::size_t r = flat;
    for (std::size_t d = dims.size(); d-- > 0;) {
      idx[d] = r % dims[d];
      r /= dims[d];
    }
    auto pick = [&](std::initializer_list<const std::vector<std::size_t>*> gs) {
      std::vector<std::size_t> k;
      for (auto g : gs) {
        for (auto a : *g) k.push_back(idx[a]);
        k.push_back(99);
      }
      return k;
    };
    pabc[pick({&A, &B, &C})] += p[flat];
    pac[pick({&A, &C})] += p[flat];
    pbc[pick({&B, &C})] += p[flat];
    pc[pick({&C})] += p[flat];
  }
  double s = 0;
  // Sum over (a,b,c) cells of p(abc) log p(abc)p(c) / (p(ac)p(bc)).
  for (const auto& [k, v] : pabc) {
    if (v <= 0) continue;
    std::vector<std::size_t> ka, kb, kc;
    std::size_t part = 0;
    for (auto x : k) {
      if (x == 99) {
        ++part;
        continue;
      }
      (part == 0 ? ka : part == 1 ? kb : kc).push_back(x);
    }
    auto join = [](std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
      a.push_back(99);
      a.insert(a.end(), b.begin(), b.end());
      a.push_back(99);
      return a;
    };
    std::vector<std::size_t> kc1 = kc;
    kc1.push_back(99);
    s += v * std::log2(v * pc[kc1] / (pac[join(ka, kc)] * pbc[join(kb, kc)]));
  }
  return s;
}

}  // namespace

TEST_CASE("entropy of small pmfs") {
  CHECK(entropy(Pmf({0.5, 0.5})) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(entropy(Pmf({1.0, 0.0})) == 0.0);
  CHECK(entropy(Pmf({0.9, 0.1})) == doctest::Approx(kH09).epsilon(1e-14));
  CHECK_THROWS_AS(Pmf({0.6, 0.6}), ValidationError);
  CHECK_THROWS_AS(Pmf({1.1, -0.1}), ValidationError);
  CHECK_THROWS_AS(Pmf({}), ValidationError);
}

TEST_CASE("entropy stays within [0, log2 k]") {
  Rng rng(11, Stream::Search, 0);
  for (int t = 0; t < 200; ++t) {
    std::size_t k = 1 + rng.below(8);
    double h = entropy(Pmf(rng.dirichlet(k, 0.5)));
    CHECK(h >= 0.0);
    CHECK(h <= std::log2(static_cast<double>(k)) + 1e-12);
  }
}

TEST_CASE("mutual information examples") {
  // Independent product.
  std::vector<double> p;
  for (double a : {0.3, 0.7})
    for (double b : {0.2, 0.5, 0.3}) p.push_back(a * b);
  JointPmf ind({"A", "B"}, {2, 3}, p);
  CHECK(mutual_information(ind, {"A"}, {"B"}) == doctest::Approx(0.0).epsilon(1e-15));

  // Copy on four symbols.
  std::vector<double> c(16, 0.0);
  for (int i = 0; i < 4; ++i) c[static_cast<std::size_t>(i * 4 + i)] = 0.25;
  JointPmf copy({"A", "B"}, {4, 4}, c);
  CHECK(mutual_information(copy, {"A"}, {"B"}) == doctest::Approx(2.0).epsilon(1e-14));

  // Uniform input through BSC(0.2).
  JointPmf b = input_output_joint({0.5, 0.5}, testing::bsc(0.2), 2);
  CHECK(mutual_information(b, {"X"}, {"Y"}) == doctest::Approx(kBsc02Capacity).epsilon(1e-13));

  CHECK_THROWS_AS(mutual_information(copy, {"A"}, {"A"}), UsageError);
  CHECK_THROWS_AS(mutual_information(copy, {"A"}, {"Z"}), UsageError);
}

TEST_CASE("conditional mutual information examples") {
  Rng rng(5, Stream::Search, 1);
  // C independent of (A,B) with A independent of B.
  std::vector<double> p;
  auto pa = rng.dirichlet(2), pb = rng.dirichlet(3), pc = rng.dirichlet(2);
  for (double a : pa)
    for (double b : pb)
      for (double c : pc) p.push_back(a * b * c);
  JointPmf j({"A", "B", "C"}, {2, 3, 2}, p);
  CHECK(conditional_mi(j, {"A"}, {"B"}, {"C"}) == doctest::Approx(0.0).epsilon(1e-14));

  // A -> C -> B with C a copy of A.
  std::vector<double> q(2 * 2 * 2, 0.0);
  auto wb = testing::bsc(0.3);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) q[static_cast<std::size_t>((a * 2 + b) * 2 + a)] = 0.5 * wb[static_cast<std::size_t>(a * 2 + b)];
  JointPmf m({"A", "B", "C"}, {2, 2, 2}, q);
  CHECK(conditional_mi(m, {"A"}, {"B"}, {"C"}) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(mutual_information(m, {"A"}, {"B"}) > 0.1);

  CHECK_THROWS_AS(conditional_mi(m, {"A"}, {"B"}, {"A"}), UsageError);
}

TEST_CASE("conditional MI agrees with a brute-force sum over random joints") {
  Rng rng(2024, Stream::Search, 2);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::size_t> dims{2 + rng.below(2), 2 + rng.below(2), 2 + rng.below(2), 1 + rng.below(2)};
    JointPmf j = random_joint(rng, {"A", "B", "C", "D"}, dims);
    CHECK(conditional_mi(j, {"A"}, {"B"}, {"C"}) == doctest::Approx(brute_cmi(j, {0}, {1}, {2})).epsilon(1e-10));
    CHECK(conditional_mi(j, {"A", "D"}, {"B"}, {"C"}) ==
          doctest::Approx(brute_cmi(j, {0, 3}, {1}, {2})).epsilon(1e-10));
    CHECK(conditional_mi(j, {"A"}, {"B"}, {}) == doctest::Approx(brute_cmi(j, {0}, {1}, {})).epsilon(1e-10));
  }
}

TEST_CASE("chain rule, symmetry, data processing and nonnegativity") {
  Rng rng(77, Stream::Search, 3);
  for (int t = 0; t < 300; ++t) {
    std::vector<std::size_t> dims{2 + rng.below(3), 2 + rng.below(3), 1 + rng.below(3)};
    JointPmf j = random_joint(rng, {"A", "B", "C"}, dims);
    // H(A,B) = H(A) + H(B|A)
    CHECK(std::fabs(j.entropy({"A", "B"}) - j.entropy({"A"}) - conditional_entropy(j, {"B"}, {"A"})) <= 1e-10);
    CHECK(std::fabs(mutual_information(j, {"A"}, {"B"}) - mutual_information(j, {"B"}, {"A"})) <= 1e-12);
    CHECK(mutual_information(j, {"A"}, {"B", "C"}) >= 0.0);
    CHECK(conditional_mi(j, {"A"}, {"B"}, {"C"}) >= 0.0);
    CHECK(conditional_entropy(j, {"B"}, {"A", "C"}) >= 0.0);

    // A -> B -> C built by composition.
    const std::size_t ka = dims[0], kb = dims[1], kc = dims[2];
    auto pa = rng.dirichlet(ka, 1.0);
    auto wab = testing::random_stochastic(rng, ka, kb);
    auto wbc = testing::random_stochastic(rng, kb, kc);
    std::vector<double> p(ka * kb * kc);
    for (std::size_t a = 0; a < ka; ++a)
      for (std::size_t b = 0; b < kb; ++b)
        for (std::size_t c = 0; c < kc; ++c) p[(a * kb + b) * kc + c] = pa[a] * wab[a * kb + b] * wbc[b * kc + c];
    JointPmf m({"A", "B", "C"}, dims, p);
    CHECK(mutual_information(m, {"A"}, {"C"}) <= mutual_information(m, {"A"}, {"B"}) + 1e-10);
  }
}

TEST_CASE("clamp policy") {
  CHECK(clamp_info(0.25, "x") == 0.25);
  CHECK(clamp_info(-1e-12, "x") == 0.0);
  CHECK(clamp_info(-5e-7, "x") == 0.0);
  CHECK_THROWS_AS(clamp_info(-1e-5, "x"), DomainError);
}

TEST_CASE("joint pmf validation and marginals") {
  CHECK_THROWS_AS(JointPmf({"A", "A"}, {2, 2}, {0.25, 0.25, 0.25, 0.25}), ValidationError);
  CHECK_THROWS_AS(JointPmf({"A", "B"}, {2, 2}, {0.25, 0.25, 0.25, 0.2}), ValidationError);
  JointPmf j({"A", "B"}, {2, 3}, {0.1, 0.2, 0.1, 0.3, 0.2, 0.1});
  JointPmf m = j.marginal({"B", "A"});
  CHECK(m.axes() == Axes{"B", "A"});
  CHECK(m.probs()[1] == doctest::Approx(0.3));  // B=0, A=1
  CHECK(m.probs()[2] == doctest::Approx(0.2));  // B=1, A=0
}

TEST_CASE("induced joint examples") {
  Rng rng(3, Stream::Search, 4);
  Channel3 ch = testing::random_channel(rng, 2, 2, 3, 2);
  // Deterministic X = 0.
  AuxJoint det(1, 1, 1, 2, {1.0, 0.0});
  JointPmf j = induced_joint(ch, det);
  JointPmf y = j.marginal({"Y1", "Y2", "Y3"});
  for (std::size_t k = 0; k < y.probs().size(); ++k) CHECK(y.probs()[k] == doctest::Approx(ch.probs()[k]).epsilon(1e-15));

  // Independent outputs.
  Channel3 prod = Channel3::from_marginals(2, testing::bsc(0.1), 2, testing::bsc(0.4), 2, testing::bsc(0.2), 2);
  AuxJoint uni(1, 1, 1, 2, {0.5, 0.5});
  JointPmf k = induced_joint(prod, uni);
  CHECK(mutual_information(k, {"Y1"}, {"Y2"}) > 0.0);  // dependent through X
  CHECK(conditional_mi(k, {"Y1"}, {"Y2"}, {"X"}) == doctest::Approx(0.0).epsilon(1e-14));

  CHECK_THROWS_AS(induced_joint(testing::random_channel(rng, 3, 2, 2, 2), det), UsageError);
}

TEST_CASE("induced joint marginalizes to p(x) p(y|x)") {
  Rng rng(9, Stream::Search, 5);
  for (int t = 0; t < 50; ++t) {
    Channel3 ch = testing::random_channel(rng, 2 + rng.below(2), 2, 2, 1 + rng.below(3));
    AuxJoint aux = testing::random_aux(rng, 2, 2, 3, ch.nx());
    JointPmf j = induced_joint(ch, aux).marginal({"X", "Y1", "Y2", "Y3"});
    JointPmf px = aux.joint().marginal({"X"});
    const std::size_t row = ch.ny1() * ch.ny2() * ch.ny3();
    for (std::size_t x = 0; x < ch.nx(); ++x)
      for (std::size_t r = 0; r < row; ++r)
        CHECK(std::fabs(j.probs()[x * row + r] - px.probs()[x] * ch.probs()[x * row + r]) <= 1e-12);
  }
}

TEST_CASE("channel JSON: validation, round trip, key order") {
  const char* ok = R"({"nx":2,"ny1":2,"ny2":1,"ny3":1,"p":[[[[0.9]],[[0.1]]],[[[0.2]],[[0.8]]]]})";
  Channel3 ch = channel_from_json(ok);
  CHECK(ch.nx() == 2);
  Channel3 back = channel_from_json(channel_to_json(ch));
  CHECK(back.probs() == ch.probs());

  const char* permuted = R"({"p":[[[[0.9]],[[0.1]]],[[[0.2]],[[0.8]]]],"ny3":1,"ny2":1,"nx":2,"ny1":2})";
  CHECK(channel_to_json(channel_from_json(permuted)) == channel_to_json(ch));

  const char* bad = R"({"nx":2,"ny1":2,"ny2":1,"ny3":1,"p":[[[[0.9]],[[0.1]]],[[[0.2]],[[0.78]]]]})";
  try {
    channel_from_json(bad);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("x=1") != std::string::npos);
  }
  CHECK_THROWS_AS(channel_from_json("{"), ValidationError);
  CHECK_THROWS_AS(channel_from_json(R"({"nx":2})"), ValidationError);
}

TEST_CASE("aux JSON round trip") {
  Rng rng(1, Stream::Search, 6);
  AuxJoint a = testing::random_aux(rng, 2, 2, 2, 3);
  AuxJoint b = aux_from_json(aux_to_json(a));
  CHECK(b.probs() == a.probs());
  CHECK(b.m3() == 2);
}
