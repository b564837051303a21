#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "opdyn/coef_vec.hpp"
#include "opdyn/log_scalar.hpp"
#include "opdyn/sequences.hpp"

namespace opdyn {

namespace weights {

struct ConstantW { double c = 1.0; };
/// w_n = sqrt((n+1)/n), n >= 1
struct SqrtRatio {};
/// w_n = 1 for n <= 0, 2 for n >= 1
struct StepBilateral {};
/// w_n = 1/2 for n <= 0, 2 for n >= 1
struct InverseStepBilateral {};
/// w_{first}, w_{first+1}, ... given explicitly; undefined outside.
struct TableW {
  std::int64_t first = 1;
  std::vector<double> values;
};

}  // namespace weights

/// Positive bounded weight sequence (w_n).
struct WeightSeq {
  std::variant<weights::ConstantW, weights::SqrtRatio, weights::StepBilateral,
               weights::InverseStepBilateral, weights::TableW>
      family;

  WeightSeq() : family(weights::ConstantW{}) {}
  template <class F>
  WeightSeq(F f) : family(std::move(f)) {
    validate();
  }

  /// ln w_n; throws DomainError where the family is undefined.
  log_real log_weight(std::int64_t n) const;
  /// sup_n w_n over the family's domain.
  double sup_bound() const;
  /// inf_n w_n over the family's domain.
  double inf_bound() const;
  /// Index range on which the family is defined (inclusive).
  std::int64_t domain_lo() const;
  std::int64_t domain_hi() const;
  std::string describe() const;

 private:
  void validate() const;
};

/// Backward weighted shift scaled by a premultiplier:
/// (T x)_j = premult * w_{j+1} * x_{j+1}.
struct ShiftOp {
  Side side = Side::Unilateral;
  WeightSeq weights;
  LogScalar premult = LogScalar::one();

  ShiftOp() = default;
  ShiftOp(Side s, WeightSeq w, LogScalar p = LogScalar::one());

  /// |premult| * sup w_n.
  double norm_bound() const;
  std::string describe() const;
};

/// Prefix sums of ln w_n, split at index 0, built lazily to a requested range.
///
/// S(k) = sum_{i=1..k} ln w_i for k >= 0 and S(k) = -sum_{i=k+1..0} ln w_i for
/// k < 0, so sum_{i=a..b} ln w_i = S(b) - S(a-1).
class ProductTable {
 public:
  ProductTable(Side side, WeightSeq weights);

  /// Extends the table so S(k) is available for lo <= k <= hi; grows geometrically.
  void ensure(std::int64_t lo, std::int64_t hi);

  Side side() const { return side_; }
  const WeightSeq& weights() const { return weights_; }
  std::int64_t lo() const { return -static_cast<std::int64_t>(neg_.size()) + 1; }
  std::int64_t hi() const { return static_cast<std::int64_t>(pos_.size()) - 1; }

  log_real prefix(std::int64_t k) const;
  /// ln prod_{i=1..n} w_{j+i}
  log_real forward(std::int64_t j, std::int64_t n) const;
  /// ln prod_{i=0..n-1} w_{j-i}
  log_real backward(std::int64_t j, std::int64_t n) const;

 private:
  void extend_pos(std::int64_t hi);
  void extend_neg(std::int64_t lo);

  Side side_;
  WeightSeq weights_;
  // pos_[k] = S(k), k >= 0; neg_[m] = S(-m), m >= 0 (neg_[0] = 0 shared with pos_[0])
  std::vector<log_real> pos_;
  std::vector<log_real> neg_;
  log_real pos_comp_ = 0.0L;
  log_real neg_comp_ = 0.0L;
};

struct ProductQuery {
  enum class Kind { Forward, Backward };
  Kind kind = Kind::Forward;
  std::int64_t j = 0;
  std::int64_t n = 0;

  static ProductQuery forward(std::int64_t j, std::int64_t n) { return {Kind::Forward, j, n}; }
  static ProductQuery backward(std::int64_t j, std::int64_t n) { return {Kind::Backward, j, n}; }
};

/// Positive real product as a LogScalar; throws RangeError outside the built range.
LogScalar product_query(const ProductTable& pt, ProductQuery q);

/// One application of T, computed directly from the weights.
CoefVec apply(const ShiftOp& T, const CoefVec& x);
/// T^n x via weight products: (T^n x)_j = premult^n prod_{i=1..n} w_{j+i} x_{j+n}.
CoefVec power_apply(const ShiftOp& T, std::int64_t n, const CoefVec& x);
/// Same, reusing a table the caller has already extended over the needed range.
CoefVec power_apply(const ShiftOp& T, std::int64_t n, const CoefVec& x, const ProductTable& pt);
/// Extends pt to cover every product power_apply(T, n, x) needs.
void ensure_for_power(ProductTable& pt, const ShiftOp& T, std::int64_t n, const CoefVec& x);
/// lambda_n T^n x with all magnitudes kept in log form.
CoefVec scaled_orbit_point(const ScalingSeq& lam, const ShiftOp& T, std::int64_t n, const CoefVec& x);

}  // namespace opdyn
