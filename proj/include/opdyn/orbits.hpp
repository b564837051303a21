#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "opdyn/bitset.hpp"
#include "opdyn/coef_vec.hpp"
#include "opdyn/sequences.hpp"
#include "opdyn/shift.hpp"
#include "opdyn/symbol.hpp"

namespace opdyn {

/// Where a hitting set came from; free-form identifiers echoed into reports.
struct Provenance {
  std::string vector_id;
  std::string sequence_id;
  std::string operator_id;
  std::string ball;
};

/// Subset of [1, N_max] stored as a bitset indexed by n.
class HittingSet {
 public:
  HittingSet() = default;
  explicit HittingSet(std::int64_t n_max, Provenance prov = {});

  static HittingSet from_indices(std::int64_t n_max, const std::vector<std::int64_t>& indices);
  static HittingSet from_predicate(std::int64_t n_max, const std::function<bool(std::int64_t)>& pred);

  std::int64_t n_max() const { return n_max_; }
  const Provenance& provenance() const { return prov_; }
  void set_provenance(Provenance p) { prov_ = std::move(p); }

  bool contains(std::int64_t n) const { return bits_.test(n); }
  void insert(std::int64_t n);
  std::int64_t count() const { return bits_.count(); }
  std::vector<std::int64_t> members() const;
  /// Bit n set iff n is a member; bit 0 is never set.
  const Bitset& bits() const { return bits_; }

  friend bool operator==(const HittingSet& a, const HittingSet& b) {
    return a.n_max_ == b.n_max_ && a.bits_ == b.bits_;
  }

 private:
  std::int64_t n_max_ = 0;
  Bitset bits_;
  Provenance prov_;
};

/// Tests lambda_n T^n x against a fixed ball, materializing only the
/// coefficients needed to decide. Thread-safe after construction.
class OrbitProbe {
 public:
  /// Prepares products for every n in [1, N].
  OrbitProbe(const CoefVec& x, const ScalingSeq& lam, const ShiftOp& T, const Ball& b, std::int64_t N);

  /// in_ball(scaled_orbit_point(lam, T, n, x), b), deciding early from partial sums and tail bounds.
  bool hit(std::int64_t n) const;
  /// Upper bound for dist(lambda_n T^n x, center) within relative 1e-3 of the true value (+inf when huge).
  double distance_upper(std::int64_t n) const;

 private:
  std::size_t first_entry(std::int64_t n) const;

  CoefVec xv_;
  std::span<const CoefVec::Entry> x_;
  ScalingSeq lam_;
  ShiftOp T_;
  ProductTable pt_;
  std::vector<std::pair<std::int64_t, std::complex<double>>> y_;
  double eps2_ = 0.0;
  double y_norm2_ = 0.0;
  log_real log_thresh_ = 0.0L;
  log_real log_sup_ = 0.0L;
  // suffix_[t] = ln sum_{s >= t} |x_s|^2
  std::vector<log_real> suffix_;
};

/// {n in [1, N] : lambda_n T^n x in B}. workers = 0 uses every hardware thread.
HittingSet hitting_set(const CoefVec& x, const ScalingSeq& lam, const ShiftOp& T, const Ball& b,
                       std::int64_t N, int workers = 0);

struct DensitySample {
  std::int64_t N = 0;
  std::int64_t count = 0;
  double density = 0.0;
};

/// Windowed density estimates: min / max of c(N)/N over every N in [N_0, N_max].
/// These are finite-window estimates; they can refute but never certify a positive lower density.
struct DensityStats {
  std::int64_t window_begin = 0;
  std::int64_t n_max = 0;
  double lower_est = 0.0;
  double upper_est = 0.0;
  /// c(N) on a geometric grid from N_0 to N_max, for plotting.
  std::vector<DensitySample> samples;
};

/// Default window start ceil(sqrt(N_max)), raised to 10.
std::int64_t default_window_start(std::int64_t n_max);
DensityStats density_stats(const HittingSet& H, std::int64_t n0);
DensityStats density_stats(const HittingSet& H);

/// The progression a, a + tau k, ..., a + m tau k.
struct APWitness {
  std::int64_t a = 0;
  std::int64_t k = 0;
  std::int64_t m = 0;
  std::int64_t tau = 1;

  std::int64_t member(std::int64_t j) const { return a + j * tau * k; }
  friend bool operator==(const APWitness&, const APWitness&) = default;
};

/// Default k range N_max / (4 m tau), at least 1.
std::int64_t default_max_k(std::int64_t n_max, std::int64_t m, std::int64_t tau);

/// Smallest k in [1, K], then smallest a, with the full progression inside H.
std::optional<APWitness> find_ap(const HittingSet& H, std::int64_t m, std::int64_t tau, std::int64_t K,
                                 int workers = 0);
/// Every start a with a, a + tau k, ..., a + m tau k in H.
std::vector<std::int64_t> ap_k_members(const HittingSet& H, std::int64_t k, std::int64_t m, std::int64_t tau);
bool verify_ap(const HittingSet& H, const APWitness& w);

/// Integer-valued polynomial p(k) = sum_{j>=1} c_j C(k, j) in the binomial basis.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  /// Coefficients c_1, c_2, ... of C(k,1), C(k,2), ...
  explicit IntPolynomial(std::vector<std::int64_t> binomial_coeffs);
  /// From ordinary integer coefficients a_1 k + a_2 k^2 + ... (no constant term).
  static IntPolynomial from_power_coeffs(const std::vector<std::int64_t>& power_coeffs);

  const std::vector<std::int64_t>& binomial_coeffs() const { return c_; }
  /// p(k); throws OverflowError if the value leaves int64.
  std::int64_t operator()(std::int64_t k) const;
  std::string describe() const;

 private:
  std::vector<std::int64_t> c_;
};

struct PolyPatternWitness {
  std::int64_t a = 0;
  std::int64_t k = 0;
};

/// Smallest k in [1, K] with every p_j(k) nonzero, then smallest a, such that
/// a, a + p_1(k), ..., a + p_m(k) all lie in H. Requires p_j(k) >= 0 on the scan range.
std::optional<PolyPatternWitness> find_poly_pattern(const HittingSet& H, const std::vector<IntPolynomial>& polys,
                                                    std::int64_t K);

struct MRWitness {
  CoefVec u;
  std::int64_t ell = 1;
  std::int64_t m = 0;
  CoefVec y;
  double eps = 0.0;
  /// The progression the witness was read off.
  std::int64_t a = 0;
  std::int64_t k = 0;
  std::int64_t tau = 1;
  /// dist(T^{j ell} u, y) for j = 0..m.
  std::vector<double> distances;
};

struct MRSearchResult {
  std::optional<MRWitness> witness;
  /// Longest order m' <= m with a progression in the half-radius hitting set.
  std::int64_t longest_ap_order = -1;
  std::optional<APWitness> longest_ap;
  /// Smallest max_j |lambda_a / lambda_{a+j tau k} - 1| ||u_j|| over examined starts.
  double best_defect = 0.0;
  std::int64_t starts_examined = 0;
  std::int64_t hits = 0;
  std::vector<std::string> warnings;
};

/// Multiple-recurrence witness from a frequently universal vector: hit the
/// half-radius ball along an AP, then correct by the scaling ratios.
/// Throws PreconditionError when the tau-ratio classifier reports lambda Bad.
MRSearchResult mr_witness_search(const CoefVec& x, const ScalingSeq& lam, const ShiftOp& T, const CoefVec& y,
                                 double eps, std::int64_t m, std::int64_t tau, std::int64_t N, std::int64_t K,
                                 int workers = 0);
/// Recomputes every distance from raw power_apply.
bool verify_mr_witness(const ShiftOp& T, const MRWitness& w);

/// All n in [1, N] with dist(T^n x, x) < eps.
std::vector<std::int64_t> recurrence_scan(const ShiftOp& T, const CoefVec& x, double eps, std::int64_t N);
/// Same for the adjoint multiplier M_phi^* on Hardy coefficients truncated at trunc.
std::vector<std::int64_t> recurrence_scan(const PolySymbol& phi, const CoefVec& x, double eps, std::int64_t N,
                                          std::int64_t trunc);

/// "n" rows.
void write_csv(std::ostream& os, const HittingSet& H);
/// "N,count,density" rows.
void write_csv(std::ostream& os, const DensityStats& d);

}  // namespace opdyn
