#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "opdyn/errors.hpp"
#include "opdyn/orbits.hpp"
#include "support.hpp"

using namespace opdyn;
using namespace opdyn::testing;

namespace {

HittingSet random_set(std::mt19937_64& g, std::int64_t n_max, double p) {
  HittingSet H(n_max);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (uniform(g, 0, 1) < p) H.insert(n);
  }
  return H;
}

// Exhaustive oracle: smallest k, then smallest a.
std::optional<APWitness> brute_ap(const HittingSet& H, std::int64_t m, std::int64_t tau, std::int64_t K) {
  for (std::int64_t k = 1; k <= K; ++k) {
    for (std::int64_t a = 1; a + m * tau * k <= H.n_max(); ++a) {
      bool ok = true;
      for (std::int64_t j = 0; j <= m && ok; ++j) ok = H.contains(a + j * tau * k);
      if (ok) return APWitness{a, k, m, tau};
    }
  }
  return std::nullopt;
}

}  // namespace

TEST(HittingSet, Basics) {
  HittingSet H = HittingSet::from_indices(20, {3, 5, 7});
  EXPECT_EQ(H.count(), 3);
  EXPECT_TRUE(H.contains(5));
  EXPECT_FALSE(H.contains(4));
  EXPECT_THROW(H.insert(0), RangeError);
  EXPECT_THROW(H.insert(21), RangeError);
  EXPECT_EQ(H.members(), (std::vector<std::int64_t>{3, 5, 7}));
  EXPECT_EQ(HittingSet::from_predicate(20, [](std::int64_t n) { return n % 2 == 1 && n > 2 && n < 8; }), H);
  std::ostringstream os;
  write_csv(os, H);
  EXPECT_EQ(os.str(), "n\n3\n5\n7\n");
}

TEST(HittingSet, MatchesBruteForceAcrossWorkerCounts) {
  auto g = rng(40);
  const std::vector<std::pair<ShiftOp, ScalingSeq>> ops{
      {ShiftOp(Side::Unilateral, weights::ConstantW{2.0}), ScalingSeq{}},
      {ShiftOp(Side::Unilateral, weights::ConstantW{1.0}, LogScalar::from_real(1.5)), ScalingSeq{family::LogPow{1.0}}},
      {ShiftOp(Side::Unilateral, weights::SqrtRatio{}), ScalingSeq{family::Factorial{}, true}},
  };
  for (const auto& [T, lam] : ops) {
    for (int t = 0; t < 15; ++t) {
      // concentrated near e_1 so some n hit
      CoefVec x = random_vector(g, Side::Unilateral, 1, 60, 6).scaled(LogScalar::from_real(0.05));
      for (std::int64_t n = 8; n <= 60; n += 8) x.set(n, LogScalar::from_real(std::pow(2.0, -static_cast<double>(n))));
      const Ball b(CoefVec::basis(Side::Unilateral, 1), uniform(g, 0.05, 1.0));
      const std::int64_t N = 70;
      const auto oracle = HittingSet::from_predicate(
          N, [&](std::int64_t n) { return in_ball(scaled_orbit_point(lam, T, n, x), b); });
      EXPECT_EQ(hitting_set(x, lam, T, b, N, 1), oracle);
      EXPECT_EQ(hitting_set(x, lam, T, b, N, 4), oracle);
    }
  }
}

TEST(OrbitProbe, DistanceUpperBoundIsTight) {
  auto g = rng(41);
  const ShiftOp T(Side::Unilateral, weights::ConstantW{2.0});
  for (int t = 0; t < 20; ++t) {
    const CoefVec x = random_vector(g, Side::Unilateral, 1, 80, 10).scaled(LogScalar::from_real(1e-3));
    const CoefVec y = random_vector(g, Side::Unilateral, 1, 4, 2);
    const OrbitProbe probe(x, ScalingSeq{}, T, Ball(y, 0.5), 60);
    for (std::int64_t n = 1; n <= 60; ++n) {
      const CoefVec p = scaled_orbit_point(ScalingSeq{}, T, n, x);
      if (log_norm(p) > 300) continue;
      const double d = dist(p, y);
      const double up = probe.distance_upper(n);
      EXPECT_GE(up, d * (1 - 1e-12));
      EXPECT_LE(up, d * (1 + 1e-3) + 1e-300);
      EXPECT_EQ(probe.hit(n), d < 0.5);
    }
  }
}

TEST(Density, PeriodicSetMatchesClosedForm) {
  for (std::int64_t P : {2, 7, 48}) {
    const std::int64_t N = 100'000;
    const auto H = HittingSet::from_predicate(N, [&](std::int64_t n) { return n % P == 0; });
    const std::int64_t n0 = 1000;
    const DensityStats d = density_stats(H, n0);
    // oracle: direct running count
    double lo = 1.0;
    double hi = 0.0;
    std::int64_t c = 0;
    for (std::int64_t n = 1; n <= N; ++n) {
      c += n % P == 0;
      if (n >= n0) {
        lo = std::min(lo, static_cast<double>(c) / static_cast<double>(n));
        hi = std::max(hi, static_cast<double>(c) / static_cast<double>(n));
      }
    }
    EXPECT_DOUBLE_EQ(d.lower_est, lo);
    EXPECT_DOUBLE_EQ(d.upper_est, hi);
    EXPECT_NEAR(d.lower_est, 1.0 / static_cast<double>(P), 1.0 / static_cast<double>(n0));
    EXPECT_LE(d.lower_est, d.upper_est);
  }
}

TEST(Density, WindowPreconditions) {
  const HittingSet H(1000);
  EXPECT_THROW((void)density_stats(H, 5), PreconditionError);
  EXPECT_THROW((void)density_stats(H, 101), PreconditionError);
  EXPECT_EQ(default_window_start(1'000'000), 1000);
  EXPECT_EQ(default_window_start(50), 10);
  EXPECT_EQ(density_stats(H).lower_est, 0.0);
}

TEST(FindAP, MatchesExhaustiveSearchOnRandomSets) {
  auto g = rng(42);
  for (int t = 0; t < 100; ++t) {
    const HittingSet H = random_set(g, 2000, uniform(g, 0.05, 0.4));
    const std::int64_t m = uniform_int(g, 1, 5);
    const std::int64_t tau = uniform_int(g, 1, 3);
    const std::int64_t K = default_max_k(2000, m, tau);
    const auto want = brute_ap(H, m, tau, K);
    EXPECT_EQ(find_ap(H, m, tau, K, 1), want);
    EXPECT_EQ(find_ap(H, m, tau, K, 3), want);
    if (want) EXPECT_TRUE(verify_ap(H, *want));
  }
}

TEST(FindAP, MembersAndVerification) {
  const auto H = HittingSet::from_predicate(500, [](std::int64_t n) { return n % 6 == 4; });
  const auto w = find_ap(H, 3, 1, 100);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->a, 4);
  EXPECT_EQ(w->k, 6);
  const auto starts = ap_k_members(H, 6, 3, 1);
  EXPECT_EQ(starts.front(), 4);
  for (auto a : starts) EXPECT_TRUE(verify_ap(H, {a, 6, 3, 1}));
  EXPECT_FALSE(verify_ap(H, {5, 6, 3, 1}));
  EXPECT_FALSE(find_ap(H, 3, 1, 5).has_value());
  EXPECT_THROW((void)find_ap(H, 0, 1, 5), PreconditionError);
}

TEST(IntPolynomial, BinomialBasis) {
  const auto sq = IntPolynomial::from_power_coeffs({0, 1});
  EXPECT_EQ(sq.binomial_coeffs(), (std::vector<std::int64_t>{1, 2}));
  auto g = rng(43);
  for (int t = 0; t < 200; ++t) {
    const std::int64_t a1 = uniform_int(g, -5, 5), a2 = uniform_int(g, -5, 5), a3 = uniform_int(g, -3, 3);
    const auto p = IntPolynomial::from_power_coeffs({a1, a2, a3});
    const std::int64_t k = uniform_int(g, -50, 50);
    EXPECT_EQ(p(k), a1 * k + a2 * k * k + a3 * k * k * k);
  }
  EXPECT_THROW((void)IntPolynomial::from_power_coeffs({0, 0, 0, 1})(10'000'000), OverflowError);
}

TEST(PolyPattern, MatchesBruteForce) {
  auto g = rng(44);
  const std::vector<IntPolynomial> polys{IntPolynomial::from_power_coeffs({0, 1}),
                                         IntPolynomial::from_power_coeffs({1, 1})};
  for (int t = 0; t < 30; ++t) {
    const HittingSet H = random_set(g, 1500, 0.3);
    std::optional<PolyPatternWitness> want;
    for (std::int64_t k = 1; k <= 30 && !want; ++k) {
      for (std::int64_t a = 1; a + k * k + k <= 1500; ++a) {
        if (H.contains(a) && H.contains(a + k * k) && H.contains(a + k * k + k)) {
          want = PolyPatternWitness{a, k};
          break;
        }
      }
    }
    const auto got = find_poly_pattern(H, polys, 30);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) {
      EXPECT_EQ(got->a, want->a);
      EXPECT_EQ(got->k, want->k);
    }
  }
}

TEST(MRWitness, FoundAndReverifiedForTwiceB) {
  // x = sum over k of 2^{-8k} e_{8k+1}: (2B)^{8k} x is close to e_1
  const ShiftOp T(Side::Unilateral, weights::ConstantW{2.0});
  CoefVec x(Side::Unilateral);
  for (std::int64_t k = 1; k <= 400; ++k) x.push_back(8 * k + 1, LogScalar::from_log(-8.0L * k * std::log(2.0L)));
  const CoefVec y = CoefVec::basis(Side::Unilateral, 1);
  const auto r = mr_witness_search(x, ScalingSeq{}, T, y, 0.01, 3, 1, 3000, 200, 2);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(verify_mr_witness(T, *r.witness));
  for (double d : r.witness->distances) EXPECT_LT(d, 0.01);
  auto bad = *r.witness;
  bad.ell += 1;
  EXPECT_FALSE(verify_mr_witness(T, bad));
  EXPECT_THROW((void)mr_witness_search(x, ScalingSeq{family::GeomInverse{{0.5, 0.0}}}, T, y, 0.01, 3, 1, 3000, 200),
               PreconditionError);
}

TEST(RecurrenceScan, ShiftAndSymbol) {
  const ShiftOp S(Side::Bilateral, weights::ConstantW{1.0});
  const CoefVec x = parse_vector_literal(Side::Bilateral, "e(0) + e(1)");
  // T^n x and x overlap in at most one coordinate for n >= 1
  EXPECT_TRUE(recurrence_scan(S, x, 1.0, 100).empty());
  EXPECT_EQ(recurrence_scan(S, x, 1.5, 3), (std::vector<std::int64_t>{1}));
  const PolySymbol rot({std::polar(1.0, 2.0 * M_PI / 5.0)});
  const CoefVec h = parse_vector_literal(Side::HardyCoef, "e(0) + 2*e(3)");
  EXPECT_EQ(recurrence_scan(rot, h, 1e-6, 20, 10), (std::vector<std::int64_t>{5, 10, 15, 20}));
}
