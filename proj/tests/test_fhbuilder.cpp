#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "opdyn/errors.hpp"
#include "opdyn/fu_builder.hpp"
#include "support.hpp"

using namespace opdyn;
using namespace opdyn::testing;

namespace {

std::vector<FUTarget> three_targets(double eps = 1e-3) {
  return {{parse_vector_literal(Side::Unilateral, "e(1)"), eps},
          {parse_vector_literal(Side::Unilateral, "e(1) + e(2)"), eps},
          {parse_vector_literal(Side::Unilateral, "e(2)"), eps}};
}

const ShiftOp kTwoB(Side::Unilateral, weights::ConstantW{2.0});

}  // namespace

TEST(BlockPlan, ClassesPartitionTheResidues) {
  const BlockPlan p = make_plan(three_targets(), 16);
  EXPECT_EQ(p.r(), 3);
  EXPECT_EQ(p.period(), 48);
  EXPECT_EQ(p.n_min, 16);
  EXPECT_EQ(p.max_q(), 2);
  for (std::int64_t n = p.n_min; n < 1000; ++n) {
    int owners = 0;
    for (std::size_t i = 0; i < 3; ++i) owners += p.in_class(i, n);
    EXPECT_EQ(owners, n % 16 == 0 ? 1 : 0) << n;
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const auto members = p.class_members(i, 1000);
    EXPECT_EQ(members.front(), static_cast<std::int64_t>(i + 1) * 16);
    for (std::size_t k = 1; k < members.size(); ++k) EXPECT_EQ(members[k] - members[k - 1], 48);
  }
  EXPECT_EQ(make_plan(three_targets()).g, 2 * 2 + 8);
  EXPECT_THROW((void)make_plan(three_targets(), 2), PreconditionError);
  EXPECT_THROW((void)make_plan({{CoefVec::basis(Side::Unilateral, 1), 0.0}}), PreconditionError);
}

TEST(BuildFU, PlannedVisitsAreHitAndIndependentlyConfirmed) {
  const std::int64_t N = 20'000;
  const FUVector v = build_fu(ScalingSeq{}, kTwoB, three_targets(), N, 16, 2);
  EXPECT_TRUE(v.report().clean());
  const auto checks = verify_fu(v, {}, 1);
  ASSERT_EQ(checks.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(checks[i].missing, 0);
    for (auto n : v.plan().class_members(i, N - v.plan().q(i))) EXPECT_TRUE(checks[i].hits.contains(n));
  }
  // Oracle: raw orbit points at a few planned indices.
  for (std::int64_t n : {16, 64, 112, 4816}) {
    const CoefVec p = scaled_orbit_point(ScalingSeq{}, kTwoB, n, v.x());
    EXPECT_LT(dist(p, v.plan().targets[0].y), 1e-3);
  }
  // Off-class indices miss every target.
  const CoefVec off = scaled_orbit_point(ScalingSeq{}, kTwoB, 24, v.x());
  for (const auto& t : v.plan().targets) EXPECT_GE(dist(off, t.y), 1e-3);
}

TEST(BuildFU, RandomTargetsAndScalings) {
  auto g = rng(60);
  const std::vector<std::pair<ScalingSeq, ShiftOp>> cases{
      {ScalingSeq{family::LogPow{1.0}}, kTwoB},
      {ScalingSeq{family::Factorial{}}, ShiftOp(Side::Unilateral, weights::ConstantW{1.0})},
      {ScalingSeq{family::GeomInverse{{0.25, 0.0}}}, ShiftOp(Side::Unilateral, weights::ConstantW{1.0}, LogScalar::from_real(2.0))},
  };
  for (const auto& [lam, T] : cases) {
    for (int t = 0; t < 3; ++t) {
      std::vector<FUTarget> ts;
      const int r = static_cast<int>(uniform_int(g, 1, 3));
      for (int i = 0; i < r; ++i) ts.push_back({random_vector(g, Side::Unilateral, 1, 4, 2), uniform(g, 1e-4, 1e-2)});
      const FUVector v = build_fu(lam, T, ts, 3000);
      EXPECT_TRUE(v.report().clean()) << lam.describe();
      for (const auto& c : verify_fu(v)) EXPECT_EQ(c.missing, 0);
    }
  }
}

TEST(BuildFU, DeterministicAcrossWorkers) {
  const FUVector a = build_fu(ScalingSeq{}, kTwoB, three_targets(), 30'000, 16, 1);
  const FUVector b = build_fu(ScalingSeq{}, kTwoB, three_targets(), 30'000, 16, 4);
  EXPECT_EQ(a.x(), b.x());
  EXPECT_EQ(verify_fu(a, {}, 1)[1].hits, verify_fu(b, {}, 3)[1].hits);
}

TEST(BuildFU, RejectsNonDecayingPlacements) {
  // lambda = 1 and T = B: every placed coefficient equals the target
  EXPECT_THROW((void)build_fu(ScalingSeq{}, ShiftOp(Side::Unilateral, weights::ConstantW{1.0}), three_targets(), 5000),
               InfeasibleDecay);
  EXPECT_THROW((void)build_fu(ScalingSeq{}, ShiftOp(Side::Bilateral, weights::ConstantW{2.0}), three_targets(), 5000),
               PreconditionError);
}

TEST(BuildFU, DoublingTheGapKeepsSuccess) {
  const std::vector<std::pair<ScalingSeq, ShiftOp>> cases{
      {ScalingSeq{}, kTwoB},
      {ScalingSeq{family::Factorial{}}, ShiftOp(Side::Unilateral, weights::ConstantW{1.0})},
      {ScalingSeq{}, ShiftOp(Side::Unilateral, weights::SqrtRatio{}, LogScalar::from_real(1.5))},
  };
  for (const auto& [lam, T] : cases) {
    int successes = 0;
    for (std::int64_t g : {10, 14, 20, 28, 40}) {
      bool ok = true;
      try {
        ok = build_fu(lam, T, three_targets(), 8000, g).report().clean();
      } catch (const VerificationFailed&) {
        ok = false;
      }
      if (!ok) continue;
      ++successes;
      EXPECT_NO_THROW(EXPECT_TRUE(build_fu(lam, T, three_targets(), 8000, 2 * g).report().clean()))
          << lam.describe() << " g=" << g;
    }
    EXPECT_GT(successes, 0) << lam.describe();
  }
}

TEST(VerifyFU, RadiusOverrides) {
  const FUVector v = build_fu(ScalingSeq{}, kTwoB, three_targets(), 10'000, 16);
  const auto wide = verify_fu(v, {0.5, 0.5, 0.5});
  const auto tight = verify_fu(v);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_GE(wide[i].hits.count(), tight[i].hits.count());
}

TEST(FUWindow, Start) {
  EXPECT_EQ(fu_window_start(100'000), 1000);
  EXPECT_EQ(fu_window_start(400), 20);
}
