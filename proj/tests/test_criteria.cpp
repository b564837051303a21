#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "opdyn/criteria.hpp"
#include "opdyn/errors.hpp"
#include "support.hpp"

using namespace opdyn;
using namespace opdyn::testing;

namespace {

// Smallest n in (2q, n_max] meeting all 2 m (2q+1) inequalities, from naive sums.
std::optional<std::int64_t> naive_first_n(const WeightSeq& w, std::int64_t m, std::int64_t q, double eps,
                                          std::int64_t n_max) {
  const long double L = std::log(1.0L / eps);
  for (std::int64_t n = 2 * q + 1; n <= n_max; ++n) {
    bool ok = true;
    for (std::int64_t j = -q; j <= q && ok; ++j) {
      for (std::int64_t l = 1; l <= m && ok; ++l) {
        ok = naive_log_product(w, j + 1, j + l * n) > L && naive_log_product(w, j - l * n + 1, j) < -L;
      }
    }
    if (ok) return n;
  }
  return std::nullopt;
}

}  // namespace

TEST(ShiftCriteria, MatchesNaiveSearch) {
  const std::vector<WeightSeq> ws{weights::StepBilateral{}, weights::InverseStepBilateral{}, weights::ConstantW{2.0}};
  for (const auto& w : ws) {
    for (std::int64_t m : {1, 2, 3}) {
      for (std::int64_t q : {0, 1, 2}) {
        for (double eps : {0.5, 0.1, 0.01}) {
          const auto want = naive_first_n(w, m, q, eps, 200);
          const auto got = mr_shift_check(w, m, q, eps, 200);
          ASSERT_EQ(got.certificate.has_value(), want.has_value()) << w.describe();
          if (want) {
            EXPECT_EQ(got.certificate->n, *want);
            EXPECT_EQ(got.certificate->products.size(), static_cast<std::size_t>(m * (2 * q + 1)));
            EXPECT_TRUE(verify_shift_certificate(w, *got.certificate));
          }
        }
      }
    }
  }
}

TEST(ShiftCriteria, SalasIsTheOrderOneCase) {
  const WeightSeq w = weights::InverseStepBilateral{};
  const auto s = salas_check(w, 0.25, 1, 500);
  const auto m1 = mr_shift_check(w, 1, 1, 0.25, 500);
  ASSERT_TRUE(s.certificate.has_value());
  EXPECT_EQ(s.certificate->n, m1.certificate->n);
  EXPECT_FALSE(salas_check(weights::StepBilateral{}, 0.5, 0, 10'000).certificate.has_value());
}

TEST(ShiftCriteria, TamperedCertificateFails) {
  const WeightSeq w = weights::InverseStepBilateral{};
  auto c = *mr_shift_check(w, 3, 2, 0.1, 100).certificate;
  c.products[2].log_forward += 0.5;
  EXPECT_FALSE(verify_shift_certificate(w, c));
  auto c2 = *mr_shift_check(w, 3, 2, 0.1, 100).certificate;
  c2.n -= 1;
  EXPECT_FALSE(verify_shift_certificate(w, c2));
  EXPECT_THROW((void)mr_shift_check(w, 3, 2, 1.5, 100), PreconditionError);
}

TEST(InvertibleCheck, ClosedForm) {
  // prod_{i=1..ln} w_i = 2^{ln} and prod_{i=0..ln} 1/w_{-i} = 2^{ln+1}
  auto g = rng(50);
  for (int t = 0; t < 30; ++t) {
    const std::int64_t m = uniform_int(g, 1, 4);
    const double G = std::exp(uniform(g, 0.5, 12.0));
    const auto r = mr_invertible_check(weights::InverseStepBilateral{}, m, 80, G);
    std::vector<std::int64_t> want;
    for (std::int64_t n = 1; n <= 80; ++n) {
      if (std::ldexp(1.0, static_cast<int>(n)) > G && std::ldexp(1.0, static_cast<int>(n) + 1) > G) want.push_back(n);
    }
    EXPECT_EQ(r.ns, want) << "G=" << G;
  }
}

TEST(SeriesCheck, GeometricClosedForm) {
  auto g = rng(51);
  for (int t = 0; t < 20; ++t) {
    const double c = uniform(g, 1.2, 5.0);
    const auto v = fhc_series_check(weights::ConstantW{c});
    ASSERT_EQ(v.kind, SeriesVerdict::Kind::ConvergesCertified) << c;
    EXPECT_EQ(v.method, "geometric");
    EXPECT_NEAR(v.partial_sum, 1.0 / (c * c - 1.0), v.tail_bound + 1e-12);
  }
  const auto two = fhc_series_check(weights::ConstantW{2.0});
  EXPECT_NEAR(two.partial_sum, 1.0 / 3.0, 1e-9);
}

TEST(SeriesCheck, PowerTail) {
  // w_n = (n+1)/n gives prod = n+1 and sum 1/(n+1)^2 = pi^2/6 - 1
  const std::int64_t N = 200'000;
  std::vector<double> vals;
  for (std::int64_t n = 1; n <= N; ++n) vals.push_back(static_cast<double>(n + 1) / static_cast<double>(n));
  const auto v = fhc_series_check(weights::TableW{1, vals}, N);
  ASSERT_EQ(v.kind, SeriesVerdict::Kind::ConvergesCertified);
  EXPECT_EQ(v.method, "power");
  const double exact = std::numbers::pi * std::numbers::pi / 6.0 - 1.0;
  EXPECT_LE(v.partial_sum, exact);
  EXPECT_GE(v.partial_sum + v.tail_bound, exact - 1e-12);
}

TEST(SeriesCheck, DivergentAndInconclusive) {
  const auto s = fhc_series_check(weights::SqrtRatio{});
  EXPECT_EQ(s.kind, SeriesVerdict::Kind::DivergesObserved);
  EXPECT_GT(s.partial_sum, 12.0);
  // terms (1.0001)^{-2n}: the ratio test cannot certify the tail within 1e4 terms
  const auto slow = fhc_series_check(weights::ConstantW{1.00001}, 10'000, 1e9);
  EXPECT_EQ(slow.kind, SeriesVerdict::Kind::Inconclusive);
}

TEST(DecayCheck, NormDecayOnContraction) {
  const ShiftOp T(Side::Bilateral, weights::ConstantW{1.0}, LogScalar::from_real(0.9));
  const auto r = norm_decay_check(T, CoefVec::basis(Side::Bilateral, 5), 200);
  EXPECT_TRUE(r.bound_holds);
  EXPECT_NEAR(r.max_ratio, 1.0, 1e-9);
  EXPECT_NEAR(r.min_ratio, 1.0, 1e-9);
  EXPECT_THROW((void)norm_decay_check(ShiftOp(Side::Unilateral, weights::ConstantW{1.0}),
                                      CoefVec::basis(Side::Unilateral, 1), 10),
               PreconditionError);
}

TEST(DecayCheck, SuperratioBound) {
  const ShiftOp T(Side::Unilateral, weights::ConstantW{2.0});
  const CoefVec x = parse_vector_literal(Side::Unilateral, "e(1) + e(7) + 3*e(40)");
  const auto r = superratio_decay_check(ScalingSeq{family::Factorial{}, true}, T, x, 500);
  EXPECT_TRUE(r.bound_holds);
  EXPECT_GE(r.n_o, 1);
  EXPECT_LE(r.max_ratio, 1.0);
  EXPECT_THROW((void)superratio_decay_check(ScalingSeq{}, T, x, 500), PreconditionError);
}
