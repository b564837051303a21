#pragma once

#include <complex>
#include <numbers>

namespace opdyn {

/// Extended-precision real used for natural-log magnitudes and prefix sums.
using log_real = long double;

/// Wraps an angle into (-pi, pi].
double wrap_phase(long double theta);

/// Complex scalar stored as (ln|z|, arg z).
///
/// Magnitudes such as 2^(2^20) or 10^5! stay representable; unimodular
/// rotations only touch the phase. Zero is a flag rather than log_mag = -inf
/// so phase arithmetic never sees NaN.
class LogScalar {
 public:
  constexpr LogScalar() = default;

  static LogScalar zero() {
    LogScalar s;
    s.zero_ = true;
    return s;
  }
  static LogScalar one() { return LogScalar{}; }
  static LogScalar from_log(log_real log_mag, long double phase = 0.0L);
  static LogScalar from_complex(std::complex<double> z);
  static LogScalar from_real(double x) { return from_complex({x, 0.0}); }

  bool is_zero() const { return zero_; }
  log_real log_mag() const { return log_mag_; }
  double phase() const { return phase_; }

  /// |z| as a double; may be inf/0 outside the float range.
  double magnitude() const;
  /// Ordinary complex value. Throws OverflowError if log_mag > 709.
  std::complex<double> to_complex() const;

  LogScalar conj() const;
  /// Multiplicative inverse. Throws DomainError on zero.
  LogScalar inverse() const;
  /// z^n for integer n (n may be negative for non-zero z).
  LogScalar pow(long long n) const;
  /// Multiplies by e^{i theta}.
  LogScalar rotated(long double theta) const;

  friend bool operator==(const LogScalar&, const LogScalar&) = default;

 private:
  log_real log_mag_ = 0.0L;
  double phase_ = 0.0;
  bool zero_ = false;
};

LogScalar log_mul(const LogScalar& a, const LogScalar& b);
LogScalar log_div(const LogScalar& a, const LogScalar& b);
/// Relative size below which a sum is treated as full cancellation.
inline constexpr long double kCancelRel = 1e-15L;

/// a + b evaluated relative to the larger magnitude; zero when |a + b| < kCancelRel max(|a|, |b|).
LogScalar log_add(const LogScalar& a, const LogScalar& b);

inline LogScalar operator*(const LogScalar& a, const LogScalar& b) { return log_mul(a, b); }
inline LogScalar operator/(const LogScalar& a, const LogScalar& b) { return log_div(a, b); }
inline LogScalar operator+(const LogScalar& a, const LogScalar& b) { return log_add(a, b); }

/// ln(exp(a) + exp(b)) without overflow.
log_real log_sum_exp(log_real a, log_real b);

}  // namespace opdyn
