#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "opdyn/errors.hpp"
#include "opdyn/symbol.hpp"
#include "support.hpp"

using namespace opdyn;
using namespace opdyn::testing;

using C = std::complex<double>;

TEST(PolySymbol, EvaluationAndBounds) {
  const PolySymbol phi({C(1, 0), C(0, 2), C(-3, 0), C(0, 0), C(0, 0)});
  EXPECT_EQ(phi.degree(), 2);
  const C z(0.3, -0.2);
  EXPECT_NEAR(std::abs(phi(z) - (1.0 + C(0, 2) * z - 3.0 * z * z)), 0.0, 1e-15);
  EXPECT_NEAR(phi.derivative_bound(), 2.0 + 6.0, 1e-15);
  EXPECT_NEAR(phi.coefficient_sum(), 6.0, 1e-15);
  EXPECT_TRUE(PolySymbol({C(2, 0)}).is_constant());
}

TEST(Adjoint, MatchesNaiveFormula) {
  auto g = rng(30);
  for (int t = 0; t < 100; ++t) {
    std::vector<C> c;
    for (int j = 0; j < 4; ++j) c.push_back(random_complex(g));
    const PolySymbol phi(c);
    const CoefVec x = random_vector(g, Side::HardyCoef, 0, 30, 7);
    const CoefVec y = apply_adjoint(phi, x, 30);
    for (std::int64_t n = 0; n <= 30; ++n) {
      C want = 0;
      for (std::size_t j = 0; j < phi.coeffs().size(); ++j) {
        const auto v = x.at(n + static_cast<std::int64_t>(j));
        if (!v.is_zero()) want += std::conj(phi.coeffs()[j]) * v.to_complex();
      }
      const auto got = y.at(n);
      EXPECT_NEAR(std::abs((got.is_zero() ? C(0) : got.to_complex()) - want), 0.0, 1e-12);
    }
  }
}

TEST(KernelVector, EntriesAndTail) {
  const C z(0.3, 0.4);
  const KernelVector kv = kernel_vector(z, 40);
  for (std::int64_t n = 0; n <= 40; ++n) {
    EXPECT_NEAR(std::abs(kv.k.at(n).to_complex() - std::pow(std::conj(z), static_cast<double>(n))), 0.0, 1e-14);
  }
  EXPECT_NEAR(kv.tail_norm2_bound, std::pow(0.25, 41) / 0.75, 1e-30);
  EXPECT_THROW((void)kernel_vector(C(1, 0), 10), DomainError);
  EXPECT_THROW((void)kernel_vector(C(0.97, 0), 10), PreconditionError);
}

TEST(EigenCheck, ResidualBelowBoundOnGrid) {
  const std::vector<PolySymbol> phis{PolySymbol({C(0), C(0.5)}), PolySymbol({C(2), C(1)}),
                                     PolySymbol({C(0.1, 0.3), C(-0.5), C(0, 0.25)})};
  for (const auto& phi : phis) {
    for (double r : {0.1, 0.5, 0.9}) {
      for (double th : {0.0, 2.0}) {
        const EigenResidual e = eigen_check(phi, std::polar(r, th), 200);
        EXPECT_TRUE(e.within_bound) << phi.describe() << " r=" << r;
        EXPECT_LE(e.log10_residual, e.log10_bound);
        EXPECT_GE(e.precision_bits, 128);
      }
    }
  }
}

TEST(RangeCircle, NamedVerdicts) {
  const auto inside = range_circle_test(PolySymbol({C(0), C(0.5)}));
  EXPECT_EQ(inside.verdict, RangeCertificate::Verdict::DisjointInside);
  EXPECT_LT(inside.boundary_max_upper, 1.0);
  const auto outside = range_circle_test(PolySymbol({C(2), C(1)}));
  EXPECT_EQ(outside.verdict, RangeCertificate::Verdict::DisjointOutside);
  EXPECT_EQ(outside.winding, 0);
  EXPECT_TRUE(outside.winding_certified);
  const auto hit = range_circle_test(PolySymbol({C(0.8), C(1)}));
  ASSERT_EQ(hit.verdict, RangeCertificate::Verdict::Intersects);
  EXPECT_LT(std::abs(hit.witness), 1.0);
  EXPECT_NEAR(hit.witness_modulus, 1.0, 1e-9);
  EXPECT_THROW((void)range_circle_test(PolySymbol({C(0), C(1)}), 100), PreconditionError);
}

TEST(RangeCircle, RandomInsideSymbols) {
  auto g = rng(31);
  for (int t = 0; t < 40; ++t) {
    std::vector<C> c;
    for (int j = 0; j < 4; ++j) c.push_back(random_complex(g, 0.15));
    const PolySymbol phi(c);
    ASSERT_LT(phi.coefficient_sum(), 1.0);
    const auto rc = range_circle_test(phi);
    EXPECT_EQ(rc.verdict, RangeCertificate::Verdict::DisjointInside);
    EXPECT_TRUE(verify_certificate(phi, rc));
  }
}

TEST(RangeCircle, RandomOutsideSymbols) {
  auto g = rng(32);
  for (int t = 0; t < 40; ++t) {
    std::vector<C> c{std::polar(uniform(g, 2.5, 4.0), uniform(g, -3, 3))};
    for (int j = 1; j < 4; ++j) c.push_back(random_complex(g, 0.3));
    const PolySymbol phi(c);
    const auto rc = range_circle_test(phi);
    EXPECT_EQ(rc.verdict, RangeCertificate::Verdict::DisjointOutside);
    // c_0 dominates, so phi(T) winds zero times around the origin
    EXPECT_EQ(rc.winding, 0);
    EXPECT_TRUE(verify_certificate(phi, rc));
  }
}

TEST(RangeCircle, PlantedIntersections) {
  auto g = rng(33);
  for (int t = 0; t < 40; ++t) {
    const C z0 = std::polar(uniform(g, 0.0, 0.8), uniform(g, -3, 3));
    std::vector<C> c{0};
    for (int j = 1; j < 4; ++j) c.push_back(random_complex(g, 1.0));
    C tail = 0;
    for (int j = 1; j < 4; ++j) tail += c[j] * std::pow(z0, j);
    c[0] = std::polar(1.0, uniform(g, -3, 3)) - tail;
    const PolySymbol phi(c);
    const auto rc = range_circle_test(phi);
    ASSERT_EQ(rc.verdict, RangeCertificate::Verdict::Intersects);
    EXPECT_NEAR(std::abs(phi(rc.witness)), 1.0, 1e-9);
    EXPECT_TRUE(verify_certificate(phi, rc));
  }
}

TEST(RangeCircle, TamperedCertificateIsRejected) {
  const PolySymbol phi({C(0.8), C(1)});
  auto rc = range_circle_test(phi);
  rc.witness = C(0.9, 0.0);
  EXPECT_FALSE(verify_certificate(phi, rc));
  auto in = range_circle_test(PolySymbol({C(0), C(0.5)}));
  in.verdict = RangeCertificate::Verdict::DisjointOutside;
  EXPECT_FALSE(verify_certificate(PolySymbol({C(0), C(0.5)}), in));
}

TEST(Winding, CountsZerosInsideTheDisk) {
  EXPECT_EQ(winding_number(PolySymbol({C(0), C(1)}), 256), 1);
  EXPECT_EQ(winding_number(PolySymbol({C(0), C(0), C(1)}), 256), 2);
  EXPECT_EQ(winding_number(PolySymbol({C(2), C(1)}), 256), 0);
  EXPECT_EQ(winding_number(PolySymbol({C(0.25), C(0), C(0), C(1)}), 1024), 3);
}

TEST(AdjointClass, Constants) {
  EXPECT_EQ(classify_adjoint(PolySymbol({C(0, 1)})), AdjointClass::ConstantRecurrent);
  EXPECT_EQ(classify_adjoint(PolySymbol({C(2)})), AdjointClass::ConstantNotRecurrent);
  EXPECT_EQ(classify_adjoint(PolySymbol({C(0.5)})), AdjointClass::ConstantNotRecurrent);
  EXPECT_EQ(classify_adjoint(PolySymbol({C(0.8), C(1)})), AdjointClass::FrequentlyHypercyclicMultiplyRecurrent);
  EXPECT_EQ(classify_adjoint(PolySymbol({C(0), C(0.5)})), AdjointClass::NotRecurrent);
  EXPECT_EQ(to_string(AdjointClass::FrequentlyHypercyclicMultiplyRecurrent), "FrequentlyHypercyclic-and-MultiplyRecurrent");
}
