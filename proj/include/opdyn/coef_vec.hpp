#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "opdyn/log_scalar.hpp"

namespace opdyn {

/// Index set of a coefficient vector: l2(N) with e_1 first, l2(Z), or Hardy
/// coefficients starting at 0.
enum class Side { Unilateral, Bilateral, HardyCoef };

std::string to_string(Side s);
std::int64_t min_index(Side s);

/// Finitely supported vector. Entries are kept sorted by index and no stored
/// entry is zero.
class CoefVec {
 public:
  using Entry = std::pair<std::int64_t, LogScalar>;

  explicit CoefVec(Side side = Side::Unilateral) : side_(side) {}

  static CoefVec basis(Side side, std::int64_t k);
  /// Builds from (index, value) pairs in any order; duplicate indices are summed.
  static CoefVec from_entries(Side side, std::vector<Entry> entries);
  static CoefVec from_complex(Side side, const std::vector<std::pair<std::int64_t, std::complex<double>>>& entries);

  Side side() const { return side_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  std::span<const Entry> entries() const { return entries_; }

  /// Smallest / largest stored index; the vector must be non-empty.
  std::int64_t min_support() const { return entries_.front().first; }
  std::int64_t max_support() const { return entries_.back().first; }

  LogScalar at(std::int64_t index) const;
  /// Sets one coefficient; a zero value removes the entry.
  void set(std::int64_t index, const LogScalar& value);
  /// Appends an entry with an index larger than every stored one.
  void push_back(std::int64_t index, const LogScalar& value);

  /// Every entry multiplied by s.
  CoefVec scaled(const LogScalar& s) const;

  friend bool operator==(const CoefVec&, const CoefVec&) = default;

 private:
  void check_index(std::int64_t index) const;

  Side side_;
  std::vector<Entry> entries_;
};

/// Open ball B(center, radius) = { y : ||y - center|| < radius }.
class Ball {
 public:
  Ball(CoefVec center, double radius);
  const CoefVec& center() const { return center_; }
  double radius() const { return radius_; }

 private:
  CoefVec center_;
  double radius_;
};

/// Largest log-magnitude norm/dist accept before refusing to materialize floats.
inline constexpr log_real kMaxFloatLogMag = 350.0L;

double norm(const CoefVec& x);
/// ln ||x|| for any magnitudes (-inf for the zero vector).
log_real log_norm(const CoefVec& x);
double dist(const CoefVec& x, const CoefVec& y);
bool in_ball(const CoefVec& x, const Ball& b);
/// a*x + y; entries cancelling below relative 1e-15 are dropped.
CoefVec axpy(const LogScalar& a, const CoefVec& x, const CoefVec& y);

/// Parses "e(3)", "2*e(1) + e(2)", "(0.5,1)*e(4)" into a vector.
CoefVec parse_vector_literal(Side side, const std::string& text);
/// Inverse of parse_vector_literal for float-range vectors.
std::string to_literal(const CoefVec& x);
/// Short description: the literal for small float-range vectors, else nnz and support.
std::string summarize(const CoefVec& x);
/// Writes "index,re,im" rows with a header line.
void write_csv(std::ostream& os, const CoefVec& x);

}  // namespace opdyn
