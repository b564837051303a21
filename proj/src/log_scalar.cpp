#include "opdyn/log_scalar.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "opdyn/errors.hpp"

namespace opdyn {

namespace {
constexpr long double kPi = std::numbers::pi_v<long double>;
constexpr long double kTwoPi = 2.0L * std::numbers::pi_v<long double>;
}  // namespace

double wrap_phase(long double theta) {
  long double t = std::fmod(theta, kTwoPi);
  if (t <= -kPi) t += kTwoPi;
  if (t > kPi) t -= kTwoPi;
  double d = static_cast<double>(t);
  // rounding to double can land just outside (-pi, pi]
  if (d <= -std::numbers::pi) d = std::numbers::pi;
  return d;
}

LogScalar LogScalar::from_log(log_real log_mag, long double phase) {
  LogScalar s;
  s.log_mag_ = log_mag;
  s.phase_ = wrap_phase(phase);
  return s;
}

LogScalar LogScalar::from_complex(std::complex<double> z) {
  if (z == std::complex<double>{0.0, 0.0}) return zero();
  const long double re = z.real();
  const long double im = z.imag();
  return from_log(std::log(std::hypot(re, im)), std::atan2(im, re));
}

double LogScalar::magnitude() const {
  if (zero_) return 0.0;
  return static_cast<double>(std::exp(log_mag_));
}

std::complex<double> LogScalar::to_complex() const {
  if (zero_) return {0.0, 0.0};
  if (log_mag_ > 709.0L) {
    throw OverflowError("LogScalar magnitude e^" + std::to_string(static_cast<double>(log_mag_)) +
                        " exceeds double range");
  }
  return std::polar(static_cast<double>(std::exp(log_mag_)), phase_);
}

LogScalar LogScalar::conj() const {
  if (zero_) return *this;
  LogScalar s = *this;
  s.phase_ = wrap_phase(-static_cast<long double>(phase_));
  return s;
}

LogScalar LogScalar::inverse() const {
  if (zero_) throw DomainError("inverse of zero LogScalar");
  return from_log(-log_mag_, -static_cast<long double>(phase_));
}

LogScalar LogScalar::pow(long long n) const {
  if (n == 0) return one();
  if (zero_) {
    if (n < 0) throw DomainError("negative power of zero LogScalar");
    return zero();
  }
  return from_log(log_mag_ * static_cast<log_real>(n), static_cast<long double>(phase_) * n);
}

LogScalar LogScalar::rotated(long double theta) const {
  if (zero_) return *this;
  return from_log(log_mag_, static_cast<long double>(phase_) + theta);
}

LogScalar log_mul(const LogScalar& a, const LogScalar& b) {
  if (a.is_zero() || b.is_zero()) return LogScalar::zero();
  return LogScalar::from_log(a.log_mag() + b.log_mag(),
                             static_cast<long double>(a.phase()) + b.phase());
}

LogScalar log_div(const LogScalar& a, const LogScalar& b) { return log_mul(a, b.inverse()); }

LogScalar log_add(const LogScalar& a, const LogScalar& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const LogScalar& big = a.log_mag() >= b.log_mag() ? a : b;
  const LogScalar& small = a.log_mag() >= b.log_mag() ? b : a;
  // big * (1 + small/big), the ratio has modulus <= 1
  const long double rel_mag = std::exp(small.log_mag() - big.log_mag());
  const long double rel_phase = static_cast<long double>(small.phase()) - big.phase();
  const long double re = 1.0L + rel_mag * std::cos(rel_phase);
  const long double im = rel_mag * std::sin(rel_phase);
  const long double mod = std::hypot(re, im);
  // Phases are stored in double precision, so a relative remainder this small is cancellation.
  if (mod < kCancelRel) return LogScalar::zero();
  return LogScalar::from_log(big.log_mag() + std::log(mod),
                             static_cast<long double>(big.phase()) + std::atan2(im, re));
}

log_real log_sum_exp(log_real a, log_real b) {
  constexpr log_real kNegInf = -std::numeric_limits<log_real>::infinity();
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const log_real hi = a > b ? a : b;
  const log_real lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace opdyn
