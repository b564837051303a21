#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "opdyn/coef_vec.hpp"
#include "opdyn/errors.hpp"
#include "support.hpp"

using namespace opdyn;
using namespace opdyn::testing;

namespace {

std::map<std::int64_t, std::complex<double>> dense(const CoefVec& x) {
  std::map<std::int64_t, std::complex<double>> m;
  for (const auto& [i, v] : x.entries()) m[i] = v.to_complex();
  return m;
}

double naive_dist(const CoefVec& a, const CoefVec& b) {
  auto da = dense(a);
  for (const auto& [i, v] : dense(b)) da[i] -= v;
  double s = 0.0;
  for (const auto& [i, v] : da) s += std::norm(v);
  return std::sqrt(s);
}

}  // namespace

TEST(CoefVec, LiteralParsing) {
  const CoefVec x = parse_vector_literal(Side::Unilateral, "2*e(1) + e(3) - (0,1)*e(4)");
  EXPECT_EQ(x.size(), 3u);
  EXPECT_NEAR(std::abs(x.at(1).to_complex() - 2.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(x.at(4).to_complex() - std::complex<double>(0, -1)), 0.0, 1e-15);
  EXPECT_TRUE(x.at(2).is_zero());
  EXPECT_THROW(parse_vector_literal(Side::Unilateral, "e(0)"), DomainError);
  EXPECT_THROW(parse_vector_literal(Side::Unilateral, "e(1) +"), std::invalid_argument);
  EXPECT_EQ(parse_vector_literal(Side::Bilateral, "e(-3)").min_support(), -3);
}

TEST(CoefVec, LiteralRoundTrip) {
  auto g = rng(10);
  for (int t = 0; t < 200; ++t) {
    const CoefVec x = random_vector(g, Side::Bilateral, -30, 30, 6);
    const CoefVec y = parse_vector_literal(Side::Bilateral, to_literal(x));
    EXPECT_LE(naive_dist(x, y), 1e-13 * std::max(1.0, norm(x)));
  }
}

TEST(CoefVec, NormAndDistMatchNaive) {
  auto g = rng(11);
  for (int t = 0; t < 300; ++t) {
    const CoefVec x = random_vector(g, Side::Unilateral, 1, 40, 8);
    const CoefVec y = random_vector(g, Side::Unilateral, 1, 40, 8);
    EXPECT_NEAR(norm(x), naive_dist(x, CoefVec(Side::Unilateral)), 1e-12);
    EXPECT_NEAR(dist(x, y), naive_dist(x, y), 1e-12);
    // triangle inequality and symmetry
    EXPECT_NEAR(dist(x, y), dist(y, x), 1e-14);
    EXPECT_LE(dist(x, y), norm(x) + norm(y) + 1e-12);
  }
}

TEST(CoefVec, AxpyMatchesNaive) {
  auto g = rng(12);
  for (int t = 0; t < 200; ++t) {
    const CoefVec x = random_vector(g, Side::Bilateral, -10, 10, 5);
    const CoefVec y = random_vector(g, Side::Bilateral, -10, 10, 5);
    const auto a = random_complex(g, 3.0);
    auto want = dense(y);
    for (const auto& [i, v] : dense(x)) want[i] += a * v;
    auto got = dense(axpy(LogScalar::from_complex(a), x, y));
    for (const auto& [i, v] : want) EXPECT_NEAR(std::abs(got[i] - v), 0.0, 1e-12);
  }
  const CoefVec x = parse_vector_literal(Side::Unilateral, "e(1) + 2*e(2)");
  EXPECT_TRUE(axpy(LogScalar::from_real(-1.0), x, x).empty());
}

TEST(CoefVec, DuplicatesSumAndZerosVanish) {
  const CoefVec x = CoefVec::from_complex(Side::Unilateral, {{3, 1.0}, {1, 2.0}, {3, -1.0}});
  EXPECT_EQ(x.size(), 1u);
  EXPECT_EQ(x.min_support(), 1);
  CoefVec y = x;
  y.set(1, LogScalar::zero());
  EXPECT_TRUE(y.empty());
}

TEST(CoefVec, SideChecks) {
  const CoefVec a(Side::Unilateral);
  const CoefVec b(Side::Bilateral);
  EXPECT_THROW((void)dist(a, b), SideMismatch);
  EXPECT_EQ(min_index(Side::HardyCoef), 0);
  EXPECT_NO_THROW(CoefVec::basis(Side::HardyCoef, 0));
}

TEST(CoefVec, LogNormHandlesHugeEntries) {
  CoefVec x(Side::Unilateral);
  x.push_back(1, LogScalar::from_log(1e5L));
  x.push_back(2, LogScalar::from_log(1e5L));
  EXPECT_NEAR(static_cast<double>(log_norm(x)), 1e5 + 0.5 * std::log(2.0), 1e-6);
  EXPECT_THROW((void)norm(x), OverflowError);
  EXPECT_TRUE(std::isinf(static_cast<double>(log_norm(CoefVec(Side::Unilateral)))));
}

TEST(Ball, IsOpen) {
  const Ball b(CoefVec::basis(Side::Unilateral, 1), 0.5);
  EXPECT_TRUE(in_ball(parse_vector_literal(Side::Unilateral, "1.25*e(1)"), b));
  EXPECT_FALSE(in_ball(parse_vector_literal(Side::Unilateral, "1.5*e(1)"), b));
  EXPECT_THROW(Ball(CoefVec(Side::Unilateral), 0.0), std::invalid_argument);
}

TEST(CoefVec, Summaries) {
  EXPECT_EQ(summarize(parse_vector_literal(Side::Unilateral, "e(2)")), to_literal(parse_vector_literal(Side::Unilateral, "e(2)")));
  CoefVec big(Side::Unilateral);
  for (int i = 1; i <= 20; ++i) big.push_back(i, LogScalar::one());
  EXPECT_EQ(summarize(big), "sparse(nnz=20, support=1..20)");
}
