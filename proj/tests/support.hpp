#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "opdyn/coef_vec.hpp"
#include "opdyn/shift.hpp"

namespace opdyn::testing {

/// Every property test draws from this seed so failures reproduce.
inline constexpr std::uint64_t kSeed = 20240611;

inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(kSeed ^ (salt * 0x9e3779b97f4a7c15ULL)); }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline std::int64_t uniform_int(std::mt19937_64& g, std::int64_t lo, std::int64_t hi) {
  return std::uniform_int_distribution<std::int64_t>(lo, hi)(g);
}

inline std::complex<double> random_complex(std::mt19937_64& g, double scale = 1.0) {
  return {uniform(g, -scale, scale), uniform(g, -scale, scale)};
}

/// Sparse vector with `nnz` entries drawn from [lo, hi] and moderate magnitudes.
inline CoefVec random_vector(std::mt19937_64& g, Side side, std::int64_t lo, std::int64_t hi, int nnz) {
  std::vector<std::pair<std::int64_t, std::complex<double>>> e;
  for (int i = 0; i < nnz; ++i) e.emplace_back(uniform_int(g, lo, hi), random_complex(g, 2.0));
  return CoefVec::from_complex(side, e);
}

/// One instance of every weight family with the side it lives on.
inline std::vector<std::pair<Side, WeightSeq>> all_weight_families() {
  std::vector<double> table;
  for (int i = 0; i < 400; ++i) table.push_back(0.5 + 0.01 * (i % 150));
  return {
      {Side::Unilateral, weights::ConstantW{2.0}},
      {Side::Bilateral, weights::ConstantW{0.7}},
      {Side::Unilateral, weights::SqrtRatio{}},
      {Side::Bilateral, weights::StepBilateral{}},
      {Side::Bilateral, weights::InverseStepBilateral{}},
      {Side::Unilateral, weights::TableW{1, table}},
      {Side::Bilateral, weights::TableW{-150, table}},
  };
}

/// Naive sum of ln w_i for i in [a, b].
inline long double naive_log_product(const WeightSeq& w, std::int64_t a, std::int64_t b) {
  long double s = 0.0L;
  for (std::int64_t i = a; i <= b; ++i) s += w.log_weight(i);
  return s;
}

}  // namespace opdyn::testing
