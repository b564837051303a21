#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opdyn/coef_vec.hpp"
#include "opdyn/sequences.hpp"
#include "opdyn/shift.hpp"

namespace opdyn {

/// One (j, l) pair of a shift criterion: ln prod_{i=1..ln} w_{j+i} and ln prod_{i=0..ln-1} w_{j-i}.
struct ProductRecord {
  std::int64_t j = 0;
  std::int64_t l = 1;
  double log_forward = 0.0;
  double log_backward = 0.0;
};

/// Multiple-recurrence certificate for a bilateral shift: for |j| <= q and
/// l = 1..m, forward products exceed 1/eps and backward products stay below eps.
/// m = 1 is the Salas hypercyclicity condition.
struct ShiftCertificate {
  std::int64_t n = 0;
  std::int64_t m = 1;
  std::int64_t q = 0;
  double eps = 0.0;
  std::vector<ProductRecord> products;
};

struct ShiftCheckResult {
  std::optional<ShiftCertificate> certificate;
  std::int64_t n_max = 0;
  /// Best n seen and its margins in log units (positive = inequality holds).
  std::int64_t best_n = 0;
  double best_forward_margin = 0.0;
  double best_backward_margin = 0.0;
  /// (j, l) pairs failing at best_n.
  std::vector<ProductRecord> failing;
};

/// Smallest n in (2q, N_max] meeting the Salas inequalities for every |j| <= q.
ShiftCheckResult salas_check(const WeightSeq& w, double eps, std::int64_t q, std::int64_t n_max);
/// Smallest n in (2q, N_max] meeting all 2 m (2q+1) inequalities.
ShiftCheckResult mr_shift_check(const WeightSeq& w, std::int64_t m, std::int64_t q, double eps, std::int64_t n_max);
/// Recomputes every product from a fresh table; values must agree within log_tol.
bool verify_shift_certificate(const WeightSeq& w, const ShiftCertificate& c, double log_tol = 1e-10);

struct InvertibleCheckResult {
  std::int64_t m = 1;
  double G = 0.0;
  std::int64_t n_max = 0;
  /// Every n <= N_max with prod_{i=1..ln} w_i > G and prod_{i=0..ln} 1/w_{-i} > G for l = 1..m.
  std::vector<std::int64_t> ns;
};

/// Requires inf w > 0 (T invertible).
InvertibleCheckResult mr_invertible_check(const WeightSeq& w, std::int64_t m, std::int64_t n_max, double G);

struct SeriesVerdict {
  enum class Kind { ConvergesCertified, DivergesObserved, Inconclusive };
  Kind kind = Kind::Inconclusive;
  /// Last partial sum S_N and the N it was taken at.
  double partial_sum = 0.0;
  std::int64_t n_used = 0;
  /// Upper bound for the remaining tail (ConvergesCertified).
  double tail_bound = 0.0;
  /// "geometric" (rate = max term ratio) or "power" (rate = min local exponent).
  std::string method;
  double rate = 0.0;
  double cap = 0.0;
  /// (N, S_N) on a doubling grid.
  std::vector<std::pair<std::int64_t, double>> partial_sums;
};

std::string to_string(SeriesVerdict::Kind k);

inline constexpr double kDefaultSeriesCap = 12.0;
inline constexpr double kGeometricRatioMax = 0.99;
inline constexpr double kPowerExponentMin = 1.05;

/// Partial sums of sum_n (w_1 ... w_n)^{-2}. Convergence is claimed only with an
/// explicit tail bound read off the last decade of terms.
SeriesVerdict fhc_series_check(const WeightSeq& w, std::int64_t n_max = 1'000'000, double cap = kDefaultSeriesCap);

struct DecayReport {
  /// Decay rate used in the bound.
  double rate = 0.0;
  std::int64_t n_from = 1;
  std::int64_t n_to = 0;
  bool bound_holds = false;
  /// Largest and smallest ||orbit_n|| / bound_n over the range (zero orbits excluded from the minimum).
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::int64_t worst_n = 0;
  /// ln of the final orbit norm (-inf once the orbit vanishes).
  double final_log_norm = 0.0;
  /// Located start index for the superratio bound.
  std::int64_t n_o = 0;
  std::string conclusion;
};

/// Checks ||T^n x|| <= rho^n ||x|| (1 + 1e-9) for n <= N, rho = T.norm_bound() < 1.
DecayReport norm_decay_check(const ShiftOp& T, const CoefVec& x, std::int64_t N);

/// For lambda whose ratios |lambda_n|/|lambda_{n+1}| exceed 1 + ||T|| beyond n_o,
/// checks ||lambda_n T^n x|| <= |lambda_{n_o}| (1+||T||)^{n_o} (||T||/(1+||T||))^n ||x|| on [n_o, N].
DecayReport superratio_decay_check(const ScalingSeq& lam, const ShiftOp& T, const CoefVec& x, std::int64_t N);

}  // namespace opdyn
