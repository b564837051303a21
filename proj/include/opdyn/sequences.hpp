#pragma once

#include <complex>
#include <concepts>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "opdyn/log_scalar.hpp"

namespace opdyn {

using cplx = std::complex<double>;

namespace family {

struct Constant { cplx c{1.0, 0.0}; };
/// (log n)^k
struct LogPow { double k = 1.0; };
/// log log n, defined for n >= 3
struct LogLog {};
/// P(n) / Q(n), coefficients low-degree-first
struct RationalPoly {
  std::vector<cplx> p;
  std::vector<cplx> q;
};
/// e^{n^a}
struct ExpPow { double a = 1.0; };
/// e^{n / log n}
struct ExpOverLog {};
/// e^{n / log log n}
struct ExpOverLogLog {};
/// n!
struct Factorial {};
/// lambda_{2n} = lambda_{2n+1} = 2^n
struct GeomEvenOdd {};
/// lambda_n = 2^{2^k} for n in [2^{k-1}, 2^k)
struct DyadicTower {};
/// lambda_n = w^{2n}
struct PowerOfW { cplx w{1.0, 0.0}; };
/// lambda_n = a^{-n}
struct GeomInverse { cplx a{1.0, 0.0}; };
/// lambda_1, lambda_2, ... given explicitly
struct Table { std::vector<LogScalar> values; };

}  // namespace family

using SeqFamily =
    std::variant<family::Constant, family::LogPow, family::LogLog, family::RationalPoly,
                 family::ExpPow, family::ExpOverLog, family::ExpOverLogLog, family::Factorial,
                 family::GeomEvenOdd, family::DyadicTower, family::PowerOfW, family::GeomInverse,
                 family::Table>;

/// theta_n = slope * n + offset, or an explicit table (theta_1, theta_2, ...).
struct PhaseGen {
  double slope = 0.0;
  double offset = 0.0;
  std::vector<double> table;

  static PhaseGen constant(double theta) { return {0.0, theta, {}}; }
  static PhaseGen linear(double slope, double offset = 0.0) { return {slope, offset, {}}; }
  long double at(std::int64_t n) const;
};

/// A scaling sequence lambda_n, n >= 1: a named family, optionally inverted
/// (n -> 1/lambda_n) and rotated by unimodular factors e^{i theta_n}.
struct ScalingSeq {
  SeqFamily family;
  bool reciprocal = false;
  std::vector<PhaseGen> rotations;

  ScalingSeq() : family(family::Constant{}) {}
  template <class F>
    requires std::constructible_from<SeqFamily, F>
  ScalingSeq(F f, bool recip = false) : family(std::move(f)), reciprocal(recip) {}

  /// Smallest n at which the sequence is defined.
  std::int64_t min_index() const;
  /// Stable textual tag with parameters, e.g. "exp_pow a=0.5".
  std::string describe() const;
};

LogScalar eval_log(const ScalingSeq& seq, std::int64_t n);

/// Returns the sequence n -> e^{i theta_n} lambda_n.
ScalingSeq rotate_seq(const ScalingSeq& seq, const PhaseGen& theta);

struct RatioVerdict {
  enum class Kind { Good, Bad, Inconclusive };
  Kind kind = Kind::Inconclusive;
  /// Estimated limit of |lambda_n| / |lambda_{n+tau}| for Bad (0 and +inf allowed).
  double limit = 0.0;
  std::int64_t tau = 1;
  std::int64_t horizon = 0;
  std::int64_t window_begin = 0;
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  /// max |r_n - 1| over the window.
  double max_defect = 0.0;
  /// Ratios at the last few window indices.
  std::vector<double> evidence;
};

/// Restricts the ratio window to indices n = residue (mod modulus).
struct IndexFilter {
  std::int64_t modulus = 1;
  std::int64_t residue = 0;
};

inline constexpr double kDefaultRatioTol = 1e-4;
inline constexpr std::int64_t kDefaultRatioHorizon = 1'000'000;

/// Windowed tau-ratio test over n in [N/2, N].
///
/// Good when every r_n = |lambda_n|/|lambda_{n+tau}| lies within tol of 1;
/// Bad(a) when every r_n lies within tol of a common a away from 1
/// (a = 0 when all r_n <= tol, a = inf when all r_n >= 1/tol);
/// Inconclusive otherwise. No extrapolation is attempted.
RatioVerdict ratio_classify(const ScalingSeq& seq, std::int64_t tau,
                            std::int64_t horizon = kDefaultRatioHorizon,
                            double tol = kDefaultRatioTol, IndexFilter filter = {});

std::string to_string(RatioVerdict::Kind k);

}  // namespace opdyn
