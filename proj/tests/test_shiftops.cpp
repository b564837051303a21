#include <gtest/gtest.h>

#include <cmath>

#include "opdyn/errors.hpp"
#include "opdyn/sequences.hpp"
#include "opdyn/shift.hpp"
#include "support.hpp"

using namespace opdyn;
using namespace opdyn::testing;

namespace {

// Relative agreement of log-magnitudes and phases, entry by entry.
void expect_same(const CoefVec& a, const CoefVec& b, double rel) {
  ASSERT_EQ(a.size(), b.size());
  auto ea = a.entries();
  auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) {
    ASSERT_EQ(ea[i].first, eb[i].first);
    const double la = static_cast<double>(ea[i].second.log_mag());
    const double lb = static_cast<double>(eb[i].second.log_mag());
    EXPECT_LE(std::abs(la - lb), rel * std::max(1.0, std::abs(la)));
    EXPECT_LE(std::abs(std::remainder(ea[i].second.phase() - eb[i].second.phase(), 2 * M_PI)), 1e-9);
  }
}

std::int64_t lo_for(Side s, const WeightSeq& w) { return s == Side::Unilateral ? 1 : std::max<std::int64_t>(w.domain_lo() + 1, -100); }
std::int64_t hi_for(const WeightSeq& w) { return std::min<std::int64_t>(w.domain_hi() - 60, 150); }

}  // namespace

TEST(ProductTable, MatchesNaiveSums) {
  auto g = rng(20);
  for (const auto& [side, w] : all_weight_families()) {
    ProductTable pt(side, w);
    const std::int64_t lo = lo_for(side, w);
    const std::int64_t hi = hi_for(w);
    pt.ensure(lo - 1, hi + 60);
    for (int t = 0; t < 200; ++t) {
      const std::int64_t j = uniform_int(g, lo, hi);
      const std::int64_t n = uniform_int(g, 0, 50);
      EXPECT_NEAR(static_cast<double>(pt.forward(j, n)), static_cast<double>(naive_log_product(w, j + 1, j + n)), 1e-12)
          << w.describe();
      if (j - n + 1 >= w.domain_lo() && j - n + 1 >= lo) {
        EXPECT_NEAR(static_cast<double>(pt.backward(j, n)),
                    static_cast<double>(naive_log_product(w, j - n + 1, j)), 1e-12);
      }
    }
  }
}

TEST(ProductTable, SqrtRatioClosedForm) {
  ProductTable pt(Side::Unilateral, weights::SqrtRatio{});
  pt.ensure(0, 1'000'000);
  for (std::int64_t n : {1, 2, 10, 999, 123457, 1'000'000}) {
    EXPECT_NEAR(static_cast<double>(pt.forward(0, n)), 0.5 * std::log(static_cast<double>(n + 1)), 1e-12);
  }
  const LogScalar q = product_query(pt, ProductQuery::forward(0, 3));
  EXPECT_NEAR(q.magnitude(), 2.0, 1e-14);
  EXPECT_THROW((void)product_query(pt, ProductQuery::forward(0, 2'000'000)), RangeError);
}

TEST(ProductTable, RefusesUndefinedRanges) {
  ProductTable uni(Side::Unilateral, weights::ConstantW{2.0});
  EXPECT_THROW(uni.ensure(-3, 5), RangeError);
  ProductTable tab(Side::Unilateral, weights::TableW{1, {1.0, 2.0, 3.0}});
  EXPECT_THROW(tab.ensure(0, 10), RangeError);
  EXPECT_THROW((void)WeightSeq(weights::ConstantW{0.0}), std::invalid_argument);
  EXPECT_THROW((void)WeightSeq(weights::SqrtRatio{}).log_weight(0), DomainError);
}

// power_apply agrees with n single applications for every family.
TEST(ShiftOps, PowerApplyMatchesIteratedApply) {
  auto g = rng(21);
  for (const auto& [side, w] : all_weight_families()) {
    const ShiftOp T(side, w, LogScalar::from_complex({0.8, 0.6}));
    const std::int64_t lo = side == Side::Unilateral ? 1 : std::max<std::int64_t>(w.domain_lo() + 60, -100);
    const std::int64_t hi = std::min<std::int64_t>(w.domain_hi() - 60, 200);
    for (int t = 0; t < 100; ++t) {
      const CoefVec x = random_vector(g, side, lo, hi, 6);
      const std::int64_t n = uniform_int(g, 0, 50);
      CoefVec it = x;
      for (std::int64_t s = 0; s < n; ++s) it = apply(T, it);
      expect_same(power_apply(T, n, x), it, 1e-9);
    }
  }
}

TEST(ShiftOps, UnilateralBackwardShiftDropsFirstCoordinate) {
  const ShiftOp B(Side::Unilateral, weights::ConstantW{1.0});
  EXPECT_TRUE(apply(B, CoefVec::basis(Side::Unilateral, 1)).empty());
  const CoefVec y = apply(B, CoefVec::basis(Side::Unilateral, 4));
  EXPECT_EQ(y.min_support(), 3);
  const ShiftOp bil(Side::Bilateral, weights::ConstantW{1.0});
  EXPECT_EQ(power_apply(bil, 10, CoefVec::basis(Side::Bilateral, 1)).min_support(), -9);
}

TEST(ShiftOps, WeightedShiftFormula) {
  // (T e_k) = premult w_k e_{k-1}
  const ShiftOp T(Side::Bilateral, weights::StepBilateral{}, LogScalar::from_real(3.0));
  EXPECT_NEAR(apply(T, CoefVec::basis(Side::Bilateral, 1)).at(0).magnitude(), 6.0, 1e-14);
  EXPECT_NEAR(apply(T, CoefVec::basis(Side::Bilateral, 0)).at(-1).magnitude(), 3.0, 1e-14);
  EXPECT_NEAR(T.norm_bound(), 6.0, 1e-14);
  EXPECT_THROW(ShiftOp(Side::Bilateral, weights::SqrtRatio{}), std::invalid_argument);
}

TEST(ShiftOps, ScaledOrbitPointIsLambdaTimesPower) {
  auto g = rng(22);
  const ShiftOp T(Side::Unilateral, weights::ConstantW{2.0});
  const ScalingSeq lam{family::Factorial{}, true};
  for (int t = 0; t < 50; ++t) {
    const CoefVec x = random_vector(g, Side::Unilateral, 1, 80, 5);
    const std::int64_t n = uniform_int(g, 1, 40);
    expect_same(scaled_orbit_point(lam, T, n, x), power_apply(T, n, x).scaled(eval_log(lam, n)), 1e-12);
  }
}

TEST(ShiftOps, HugePowersStayInLogDomain) {
  const ShiftOp T(Side::Unilateral, weights::ConstantW{2.0});
  CoefVec x(Side::Unilateral);
  x.push_back(200'001, LogScalar::one());
  const CoefVec y = power_apply(T, 200'000, x);
  EXPECT_EQ(y.min_support(), 1);
  EXPECT_NEAR(static_cast<double>(y.at(1).log_mag()), 200'000 * std::log(2.0), 1e-6);
}
