#include "swarmstab/analyze.hpp"

#include <doctest.h>

#include <cmath>

using namespace swarmstab;

namespace {

SwarmParams example2(Rational l12, Rational l34) {
  SwarmParams p;
  p.K = 4;
  p.arrivals = {{PieceSet::of(4, {1, 2}), Rate(l12)}, {PieceSet::of(4, {3, 4}), Rate(l34)}};
  return p;
}

SwarmParams example3(Rational l1, Rational l2, Rational l3, Rate mu, Rate gamma) {
  SwarmParams p;
  p.K = 3;
  p.mu = mu;
  p.gamma = gamma;
  p.arrivals = {{PieceSet::of(3, {1}), Rate(l1)}, {PieceSet::of(3, {2}), Rate(l2)}, {PieceSet::of(3, {3}), Rate(l3)}};
  return p;
}

SwarmParams coded_mix(int q, int K, double f) {
  SwarmParams p;
  p.K = K;
  p.coded = true;
  p.q = q;
  p.arrivals = {{PieceSet(K), Rate(1 - f)}};
  p.coded_arrivals = {{Rate(f), 1, {}}};
  return p;
}

}  // namespace

TEST_CASE("delta on the half-file example") {
  auto p = example2(1, 3);
  CHECK(delta_S(p, PieceSet::of(4, {1, 2, 4})) == Rational(-5));
  auto v = classify(p);
  CHECK(v.verdict == Verdict::Transient);
  CHECK(v.binding == std::vector<int>{1, 2});
  CHECK_THROWS(delta_S(p, PieceSet::full(4)));
}

TEST_CASE("only full arrivals with a seed are stable everywhere") {
  SwarmParams p;
  p.K = 3;
  p.Us = Rate(1);
  p.gamma = Rate(4);
  p.arrivals = {{PieceSet::full(3), Rate(5)}};
  for (std::uint64_t m = 0; m < 7; ++m) CHECK(delta_S(p, PieceSet::from_mask(3, m)) < 0);
}

TEST_CASE("three single-piece streams: algebraic form of the set {1,2}") {
  // Delta_{12} < 0 iff l1 + l2 < l3 (2 + rho) / (1 - rho).
  for (int a = 1; a <= 6; ++a)
    for (int b = 1; b <= 6; ++b)
      for (int c = 1; c <= 6; ++c)
        for (auto [mu, g] : {std::pair{1, 2}, std::pair{1, 3}, std::pair{2, 5}}) {
          auto p = example3(Rational(a, 2), Rational(b, 3), Rational(c, 2), Rate(mu), Rate(g));
          const Rational rho(mu, g);
          const Rational lhs = Rational(a, 2) + Rational(b, 3);
          const Rational rhs = Rational(c, 2) * (2 + rho) / (1 - rho);
          CHECK((delta_S(p, PieceSet::of(3, {1, 2})) < 0) == (lhs < rhs));
          CHECK((delta_S(p, PieceSet::of(3, {1, 2})) == 0) == (lhs == rhs));
        }
}

TEST_CASE("classifier special cases") {
  SwarmParams e1;
  e1.K = 1;
  e1.Us = Rate(2);
  e1.gamma = Rate(2);
  e1.arrivals = {{PieceSet(1), Rate(1)}};
  CHECK(classify(e1).verdict == Verdict::PositiveRecurrent);
  CHECK(classify(example3(1, 1, 1, Rate(1), Rate::infinity())).verdict == Verdict::Borderline);
  SwarmParams lost;
  lost.K = 2;
  lost.gamma = Rate(0.5);
  lost.arrivals = {{PieceSet::of(2, {1}), Rate(1)}};
  CHECK(classify(lost).verdict == Verdict::Transient);
  lost.Us = Rate(0.1);
  CHECK(classify(lost).verdict == Verdict::PositiveRecurrent);
}

TEST_CASE("coded thresholds at q=64, K=200") {
  CHECK(classify_coded(coded_mix(64, 200, 0.00507)).verdict == Verdict::Transient);
  CHECK(classify_coded(coded_mix(64, 200, 0.00511)).verdict == Verdict::Unknown);
  CHECK(classify_coded(coded_mix(64, 200, 0.00516)).verdict == Verdict::PositiveRecurrent);
  // The same arrivals without coding: one random data piece per gifted arrival.
  SwarmParams u;
  u.K = 200;
  u.arrivals = {{PieceSet(200), Rate(0.9)}};
  for (int k = 1; k <= 200; ++k) u.arrivals.push_back({PieceSet::of(200, {k}), Rate(Rational(1, 2000))});
  CHECK(classify(u).verdict == Verdict::Transient);
}

TEST_CASE("coded second clause") {
  auto p = coded_mix(4, 3, 0.5);
  p.Us = Rate(1);
  p.gamma = Rate(Rational(1, 2));
  CHECK(classify_coded(p).verdict == Verdict::PositiveRecurrent);
}

TEST_CASE("branching moment limits") {
  auto m = branching_moments(3, 1, 2, 1e-12);
  CHECK(m.m_b == doctest::Approx(6).epsilon(1e-10));
  CHECK(m.m_f == doctest::Approx(2).epsilon(1e-10));
  CHECK(m.m_g(1) == doctest::Approx(5).epsilon(1e-10));
  auto k2 = branching_moments(2, 1, 2, 0.2);
  CHECK(k2.finite);
  CHECK(k2.s == doctest::Approx(8));
  CHECK(k2.m_b == doctest::Approx(15));
  CHECK(k2.m_f == doctest::Approx(5));
  CHECK_FALSE(branching_moments(3, 1, 2, 0.3).finite);
}

TEST_CASE("tail bound formulas") {
  CHECK(kingman_bound(1, 1, 2, 10, 2) == doctest::Approx(0.9));
  CHECK(kingman_bound(1, 1, 2, 1e12, 2) == doctest::Approx(1.0));
  CHECK(mginfty_bound(1, 1, 20, 1) == doctest::Approx(2 * std::exp(2.0) * std::pow(2.0, -20)).epsilon(1e-12));
  CHECK(mginfty_bound(1, 1, 0, 1) == 1.0);
  CHECK_THROWS(kingman_bound(1, 1, 2, 10, 0.5));
}
