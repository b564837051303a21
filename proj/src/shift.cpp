#include "opdyn/shift.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opdyn/errors.hpp"
#include "opdyn/format.hpp"

namespace opdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr std::int64_t kMinIdx = std::numeric_limits<std::int64_t>::min() / 4;
constexpr std::int64_t kMaxIdx = std::numeric_limits<std::int64_t>::max() / 4;

}  // namespace

void WeightSeq::validate() const {
  std::visit(overloaded{
                 [](const weights::ConstantW& w) {
                   if (!(w.c > 0.0) || !std::isfinite(w.c)) {
                     throw std::invalid_argument("constant weight must be positive and finite");
                   }
                 },
                 [](const weights::TableW& w) {
                   if (w.values.empty()) throw std::invalid_argument("weight table is empty");
                   for (double v : w.values) {
                     if (!(v > 0.0) || !std::isfinite(v)) {
                       throw std::invalid_argument("table weights must be positive and finite");
                     }
                   }
                 },
                 [](const auto&) {},
             },
             family);
}

log_real WeightSeq::log_weight(std::int64_t n) const {
  return std::visit(
      overloaded{
          [](const weights::ConstantW& w) -> log_real { return std::log(static_cast<log_real>(w.c)); },
          [n](const weights::SqrtRatio&) -> log_real {
            if (n < 1) throw DomainError("sqrt_ratio weights are defined for n >= 1");
            return 0.5L * std::log1p(1.0L / static_cast<log_real>(n));
          },
          [n](const weights::StepBilateral&) -> log_real {
            return n <= 0 ? 0.0L : std::log(2.0L);
          },
          [n](const weights::InverseStepBilateral&) -> log_real {
            return n <= 0 ? -std::log(2.0L) : std::log(2.0L);
          },
          [n](const weights::TableW& w) -> log_real {
            const std::int64_t k = n - w.first;
            if (k < 0 || k >= static_cast<std::int64_t>(w.values.size())) {
              throw DomainError("weight table has no entry at n = " + std::to_string(n));
            }
            return std::log(static_cast<log_real>(w.values[static_cast<std::size_t>(k)]));
          },
      },
      family);
}

double WeightSeq::sup_bound() const {
  return std::visit(overloaded{
                        [](const weights::ConstantW& w) { return w.c; },
                        [](const weights::SqrtRatio&) { return std::sqrt(2.0); },
                        [](const weights::StepBilateral&) { return 2.0; },
                        [](const weights::InverseStepBilateral&) { return 2.0; },
                        [](const weights::TableW& w) {
                          return *std::max_element(w.values.begin(), w.values.end());
                        },
                    },
                    family);
}

double WeightSeq::inf_bound() const {
  return std::visit(overloaded{
                        [](const weights::ConstantW& w) { return w.c; },
                        // w_n -> 1 from above
                        [](const weights::SqrtRatio&) { return 1.0; },
                        [](const weights::StepBilateral&) { return 1.0; },
                        [](const weights::InverseStepBilateral&) { return 0.5; },
                        [](const weights::TableW& w) {
                          return *std::min_element(w.values.begin(), w.values.end());
                        },
                    },
                    family);
}

std::int64_t WeightSeq::domain_lo() const {
  return std::visit(overloaded{
                        [](const weights::SqrtRatio&) -> std::int64_t { return 1; },
                        [](const weights::TableW& w) -> std::int64_t { return w.first; },
                        [](const auto&) -> std::int64_t { return kMinIdx; },
                    },
                    family);
}

std::int64_t WeightSeq::domain_hi() const {
  return std::visit(overloaded{
                        [](const weights::TableW& w) -> std::int64_t {
                          return w.first + static_cast<std::int64_t>(w.values.size()) - 1;
                        },
                        [](const auto&) -> std::int64_t { return kMaxIdx; },
                    },
                    family);
}

std::string WeightSeq::describe() const {
  return std::visit(overloaded{
                        [](const weights::ConstantW& w) { return "constant c=" + fmt_num(w.c); },
                        [](const weights::SqrtRatio&) { return std::string("sqrt_ratio"); },
                        [](const weights::StepBilateral&) { return std::string("step_bilateral"); },
                        [](const weights::InverseStepBilateral&) {
                          return std::string("inverse_step_bilateral");
                        },
                        [](const weights::TableW& w) {
                          return "table first=" + std::to_string(w.first) +
                                 " len=" + std::to_string(w.values.size());
                        },
                    },
                    family);
}

ShiftOp::ShiftOp(Side s, WeightSeq w, LogScalar p) : side(s), weights(std::move(w)), premult(p) {
  if (side == Side::HardyCoef) {
    throw std::invalid_argument("weighted shifts act on unilateral or bilateral sequences");
  }
  if (side == Side::Bilateral && std::holds_alternative<weights::SqrtRatio>(weights.family)) {
    throw std::invalid_argument("sqrt_ratio weights are unilateral only");
  }
}

double ShiftOp::norm_bound() const { return premult.magnitude() * weights.sup_bound(); }

std::string ShiftOp::describe() const {
  std::string s = to_string(side) + " shift weights=" + weights.describe();
  if (!(premult == LogScalar::one())) {
    const double mag = premult.magnitude();
    s += " premult=" + fmt_cplx(std::polar(mag, premult.phase()));
  }
  return s;
}

ProductTable::ProductTable(Side side, WeightSeq weights)
    : side_(side), weights_(std::move(weights)), pos_{0.0L}, neg_{0.0L} {}

void ProductTable::extend_pos(std::int64_t target) {
  const std::int64_t cap = weights_.domain_hi();
  if (target > cap) {
    throw RangeError("weights are undefined beyond index " + std::to_string(cap));
  }
  std::int64_t new_hi = std::max(target, 2 * hi());
  new_hi = std::min(new_hi, cap);
  pos_.reserve(static_cast<std::size_t>(new_hi + 1));
  log_real sum = pos_.back();
  for (std::int64_t k = hi() + 1; k <= new_hi; ++k) {
    // Kahan-compensated running sum
    const log_real y = weights_.log_weight(k) - pos_comp_;
    const log_real t = sum + y;
    pos_comp_ = (t - sum) - y;
    sum = t;
    pos_.push_back(sum);
  }
}

void ProductTable::extend_neg(std::int64_t target) {
  if (side_ == Side::Unilateral) {
    throw RangeError("unilateral product tables have no indices below 1");
  }
  const std::int64_t cap = weights_.domain_lo();
  // S(target) needs weights at target+1 .. 0
  if (target + 1 < cap) {
    throw RangeError("weights are undefined below index " + std::to_string(cap));
  }
  std::int64_t new_lo = std::min(target, 2 * lo() - 1);
  new_lo = std::max(new_lo, cap - 1);
  log_real sum = -neg_.back();
  for (std::int64_t m = static_cast<std::int64_t>(neg_.size()); - m >= new_lo; ++m) {
    // S(-m) = S(-m+1) - ln w_{-m+1}
    const log_real y = weights_.log_weight(-m + 1) - neg_comp_;
    const log_real t = sum + y;
    neg_comp_ = (t - sum) - y;
    sum = t;
    neg_.push_back(-sum);
  }
}

void ProductTable::ensure(std::int64_t lo_req, std::int64_t hi_req) {
  if (hi_req > hi()) extend_pos(hi_req);
  if (lo_req < lo()) extend_neg(lo_req);
}

log_real ProductTable::prefix(std::int64_t k) const {
  if (k > hi() || k < lo()) {
    throw RangeError("product table built for [" + std::to_string(lo()) + ", " +
                     std::to_string(hi()) + "], queried at " + std::to_string(k));
  }
  return k >= 0 ? pos_[static_cast<std::size_t>(k)] : neg_[static_cast<std::size_t>(-k)];
}

log_real ProductTable::forward(std::int64_t j, std::int64_t n) const {
  if (n < 0) throw std::invalid_argument("product length must be >= 0");
  if (side_ == Side::Unilateral && j < 0) {
    throw RangeError("unilateral forward product starting below index 1");
  }
  return prefix(j + n) - prefix(j);
}

log_real ProductTable::backward(std::int64_t j, std::int64_t n) const {
  if (n < 0) throw std::invalid_argument("product length must be >= 0");
  if (side_ == Side::Unilateral && j - n < 0) {
    throw RangeError("backward product reaches below index 1; needs a bilateral table");
  }
  return prefix(j) - prefix(j - n);
}

LogScalar product_query(const ProductTable& pt, ProductQuery q) {
  const log_real v = q.kind == ProductQuery::Kind::Forward ? pt.forward(q.j, q.n) : pt.backward(q.j, q.n);
  return LogScalar::from_log(v);
}

namespace {

void check_side(const ShiftOp& T, const CoefVec& x) {
  if (T.side != x.side()) {
    throw SideMismatch("operator acts on " + to_string(T.side) + " vectors, got " + to_string(x.side()));
  }
}

}  // namespace

CoefVec apply(const ShiftOp& T, const CoefVec& x) {
  check_side(T, x);
  CoefVec out(x.side());
  for (const auto& [i, v] : x.entries()) {
    const std::int64_t j = i - 1;
    if (T.side == Side::Unilateral && j < 1) continue;
    out.push_back(j, T.premult * LogScalar::from_log(T.weights.log_weight(i)) * v);
  }
  return out;
}

void ensure_for_power(ProductTable& pt, const ShiftOp& T, std::int64_t n, const CoefVec& x) {
  if (x.empty() || n == 0) return;
  std::int64_t lo = x.min_support() - n;
  if (T.side == Side::Unilateral) lo = std::max<std::int64_t>(lo, 0);
  if (lo > x.max_support()) return;
  pt.ensure(std::min<std::int64_t>(lo, 0), x.max_support());
}

CoefVec power_apply(const ShiftOp& T, std::int64_t n, const CoefVec& x, const ProductTable& pt) {
  check_side(T, x);
  if (n < 0) throw std::invalid_argument("power_apply: n must be >= 0");
  if (n == 0) return x;
  const LogScalar pn = T.premult.pow(n);
  CoefVec out(x.side());
  auto es = x.entries();
  auto it = es.begin();
  if (T.side == Side::Unilateral) {
    it = std::lower_bound(es.begin(), es.end(), n + 1,
                          [](const CoefVec::Entry& e, std::int64_t i) { return e.first < i; });
  }
  for (; it != es.end(); ++it) {
    const std::int64_t i = it->first;
    const std::int64_t j = i - n;
    const log_real lp = pt.prefix(i) - pt.prefix(j);
    out.push_back(j, pn * LogScalar::from_log(lp) * it->second);
  }
  return out;
}

CoefVec power_apply(const ShiftOp& T, std::int64_t n, const CoefVec& x) {
  ProductTable pt(T.side, T.weights);
  ensure_for_power(pt, T, n, x);
  return power_apply(T, n, x, pt);
}

CoefVec scaled_orbit_point(const ScalingSeq& lam, const ShiftOp& T, std::int64_t n, const CoefVec& x) {
  if (n == 0) return x;
  return power_apply(T, n, x).scaled(eval_log(lam, n));
}

}  // namespace opdyn
