#include <doctest.h>

#include "bcsl/error.hpp"
#include "bcsl/orderings.hpp"
#include "helpers.hpp"

using namespace bcsl;
using testing::bec;
using testing::bsc;
using testing::bsc3;

TEST_CASE("degraded: BSC composition is found with a BSC witness") {
  // Y2 = BSC(0.1) then BSC(q), q chosen so the cascade is BSC(0.26).
  const double q = (0.26 - 0.1) / (1 - 0.2);
  auto ch = bsc3(0.1, 0.26, 0.4);
  auto r = is_degraded(ch, 1, 2);
  CHECK(r.verdict == Verdict::True);
  CHECK(r.gap <= kDegradedTol);
  REQUIRE(r.witness.size() == 4);
  CHECK(r.witness[0] == doctest::Approx(1 - q).epsilon(1e-9));
  CHECK(r.witness[1] == doctest::Approx(q).epsilon(1e-9));
  CHECK(r.witness[2] == doctest::Approx(q).epsilon(1e-9));
  CHECK(r.witness[3] == doctest::Approx(1 - q).epsilon(1e-9));

  auto self = is_degraded(ch, 2, 2);
  CHECK(self.verdict == Verdict::True);
  CHECK(self.witness == std::vector<double>{1, 0, 0, 1});

  // Noiseless is not a degraded version of a noisy BSC.
  auto ch2 = Channel3::from_marginals(2, bsc(0.2), 2, testing::noiseless(2), 2, bsc(0.2), 2);
  auto n = is_degraded(ch2, 1, 2);
  CHECK(n.verdict == Verdict::False);
  CHECK(n.gap > 1e-3);
}

TEST_CASE("more capable: BSC(0.1) over BSC(0.3) and the reverse gap") {
  auto ch = bsc3(0.1, 0.3, 0.3);
  auto r = is_more_capable(ch, 1, 2);
  CHECK(r.verdict == Verdict::True);
  CHECK(r.gap <= kOrderPass);

  auto s = is_more_capable(ch, 2, 1);
  CHECK(s.verdict == Verdict::False);
  // Oracle: h(0.3) - h(0.1) at the uniform input.
  CHECK(s.gap == doctest::Approx(0.4122953056414115).epsilon(1e-7));
  REQUIRE(s.witness.size() == 2);
  CHECK(s.witness[0] == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("BEC(0.4) is more capable than BSC(0.1) but not less noisy") {
  auto ch = Channel3::from_marginals(2, bec(0.4), 3, bsc(0.1), 2, bsc(0.1), 2);
  auto mc = is_more_capable(ch, 1, 2);
  CHECK(mc.verdict == Verdict::True);
  CHECK(mc.gap <= kOrderPass);

  auto ln = is_less_noisy(ch, 1, 2);
  CHECK(ln.verdict == Verdict::False);
  // Oracle grid minimum of I(U;Ya) - I(U;Yb) is -0.006450188; the continuous search
  // can only do at least as well.
  CHECK(ln.gap >= 0.006450187986182909 - 1e-9);
  CHECK(ln.gap < 0.0075);
  // The reported witness reproduces the reported gap.
  auto wa = ch.marginal(1), wb = ch.marginal(2);
  CHECK(ln_gap_at(wa, wb, 2, 3, 2, ln.witness_rows, ln.witness) == doctest::Approx(ln.gap).epsilon(1e-9));

  auto rep = implication_check(ch, 1, 2);
  CHECK(rep.consistent);
  CHECK(rep.degraded.verdict == Verdict::False);
}

TEST_CASE("verdicts are invariant under output relabeling") {
  bcsl::Rng rng(7, Stream::Search, 0);
  for (int t = 0; t < 5; ++t) {
    auto w1 = testing::random_stochastic(rng, 2, 3);
    auto w2 = testing::random_stochastic(rng, 2, 2);
    auto ch = Channel3::from_marginals(2, w1, 3, w2, 2, w2, 2);
    // Permute Y1 labels (0 1 2) -> (2 0 1).
    std::vector<double> p1(6);
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 3; ++y) p1[x * 3 + (y + 2) % 3] = w1[x * 3 + y];
    auto chp = Channel3::from_marginals(2, p1, 3, w2, 2, w2, 2);
    for (auto [a, b] : {std::pair{1, 2}, std::pair{2, 1}}) {
      auto m = is_more_capable(ch, a, b), mp = is_more_capable(chp, a, b);
      CHECK(m.verdict == mp.verdict);
      CHECK(m.gap == doctest::Approx(mp.gap).epsilon(1e-6));
      CHECK(is_degraded(ch, a, b).verdict == is_degraded(chp, a, b).verdict);
    }
  }
}

TEST_CASE("implication chain holds on random binary-input channels") {
  bcsl::Rng rng(11, Stream::Search, 0);
  SearchConfig cfg;
  cfg.restarts = 8;
  for (int t = 0; t < 12; ++t) {
    Channel3 ch = t % 3 == 0
                      ? [&] {
                          // Force a degraded pair so the first implication is exercised.
                          auto w1 = testing::random_stochastic(rng, 2, 2);
                          auto w2 = testing::compose(w1, testing::random_stochastic(rng, 2, 2), 2, 2, 2);
                          return Channel3::from_marginals(2, w1, 2, w2, 2, w2, 2);
                        }()
                      : testing::random_channel(rng, 2, 2, 2, 2);
    cfg.seed = static_cast<std::uint64_t>(t);
    auto rep = implication_check(ch, 1, 2, cfg);
    CHECK_MESSAGE(rep.consistent, "channel " << t);
    if (t % 3 == 0) CHECK(rep.degraded.verdict == Verdict::True);
  }
}

TEST_CASE("errors and JSON round trip") {
  auto ch = bsc3(0.1, 0.2, 0.3);
  CHECK_THROWS_AS(is_more_capable(ch, 0, 2), UsageError);
  CHECK_THROWS_AS(is_degraded(ch, 1, 4), UsageError);

  std::vector<double> w(16, 0.25);
  Channel3 big = Channel3::from_marginals(4, w, 4, w, 4, w, 4);
  CHECK_THROWS_AS(is_more_capable(big, 1, 2), CapabilityError);
  SearchConfig ms;
  ms.multistart_only = true;
  ms.restarts = 2;
  CHECK(is_more_capable(big, 1, 2, ms).verdict == Verdict::True);

  auto r = is_more_capable(ch, 3, 1);
  auto back = ordering_from_json(ordering_to_json(r));
  CHECK(back.predicate == r.predicate);
  CHECK(back.a == 3);
  CHECK(back.b == 1);
  CHECK(back.verdict == r.verdict);
  CHECK(back.gap == r.gap);
  CHECK(back.witness == r.witness);
  CHECK(ordering_to_json(back) == ordering_to_json(r));
}

TEST_CASE("simplex projection") {
  auto p = project_simplex({0.5, 0.5, 0.5});
  for (double v : p) CHECK(v == doctest::Approx(1.0 / 3));
  auto q = project_simplex({2.0, -1.0});
  CHECK(q[0] == doctest::Approx(1.0));
  CHECK(q[1] == doctest::Approx(0.0));
}
