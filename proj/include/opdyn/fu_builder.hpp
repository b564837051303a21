#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "opdyn/coef_vec.hpp"
#include "opdyn/orbits.hpp"
#include "opdyn/sequences.hpp"
#include "opdyn/shift.hpp"

namespace opdyn {

/// Placed coefficients do not decay, so no l2 vector realizes the plan.
class InfeasibleDecay : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Some planned n missed its ball; a larger gap usually helps.
class VerificationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FUTarget {
  CoefVec y;
  double eps = 0.0;
};

/// Residue-class schedule: target i (0-based) is planned at
/// A_i = { n >= n_min : n = (i+1) g mod r g }.
struct BlockPlan {
  std::vector<FUTarget> targets;
  std::int64_t g = 0;
  std::int64_t n_min = 0;

  std::int64_t r() const { return static_cast<std::int64_t>(targets.size()); }
  std::int64_t period() const { return r() * g; }
  /// Largest support index of target i.
  std::int64_t q(std::size_t i) const;
  std::int64_t max_q() const;
  bool in_class(std::size_t i, std::int64_t n) const;
  /// A_i intersected with [1, upto].
  std::vector<std::int64_t> class_members(std::size_t i, std::int64_t upto) const;
};

/// g defaults to 2 max q + 8; n_min = g. Throws PreconditionError on g <= max q
/// or targets outside l2(N) with support in [1, q_i].
BlockPlan make_plan(std::vector<FUTarget> targets, std::optional<std::int64_t> g = std::nullopt);

struct TargetReport {
  std::int64_t planned = 0;
  std::int64_t hits = 0;
  std::int64_t misses = 0;
  /// Largest dist(lambda_n T^n x, y_i) over planned n (upper bound).
  double worst_distance = 0.0;
};

struct VerificationReport {
  std::int64_t horizon = 0;
  std::vector<TargetReport> per_target;
  bool clean() const;
};

/// A vector whose scaled orbit was verified to visit every target ball along its residue class.
class FUVector {
 public:
  const CoefVec& x() const { return x_; }
  const BlockPlan& plan() const { return plan_; }
  std::int64_t horizon() const { return horizon_; }
  const ScalingSeq& lam() const { return lam_; }
  const ShiftOp& op() const { return op_; }
  const VerificationReport& report() const { return report_; }

 private:
  friend FUVector build_fu(const ScalingSeq&, const ShiftOp&, std::vector<FUTarget>, std::int64_t,
                           std::optional<std::int64_t>, int);
  FUVector() = default;

  CoefVec x_;
  BlockPlan plan_;
  std::int64_t horizon_ = 0;
  ScalingSeq lam_;
  ShiftOp op_;
  VerificationReport report_;
};

/// Places y_i(j) / (lambda_n premult^n prod_{s=1..n} w_{j+s}) at index j + n for every
/// planned n <= N, then verifies every planned n with n + q_i <= N.
/// Throws InfeasibleDecay or VerificationFailed.
FUVector build_fu(const ScalingSeq& lam, const ShiftOp& T, std::vector<FUTarget> targets, std::int64_t N,
                  std::optional<std::int64_t> g = std::nullopt, int workers = 0);

struct TargetVerification {
  HittingSet hits;
  DensityStats density;
  /// Planned indices absent from the recomputed hitting set (a builder bug if nonzero).
  std::int64_t missing = 0;
};

/// Density window start used by verify_fu: max(default window, N/100).
std::int64_t fu_window_start(std::int64_t N);

/// Recomputes each target's hitting set from scratch and its density statistics.
/// Throws std::logic_error if a planned index is missing. Overrides replace the radii.
std::vector<TargetVerification> verify_fu(const FUVector& v, const std::vector<double>& eps_overrides = {},
                                          int workers = 0);

}  // namespace opdyn
