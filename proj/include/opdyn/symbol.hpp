#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "opdyn/coef_vec.hpp"

namespace opdyn {

/// Polynomial symbol phi(z) = sum_j c_j z^j, coefficients low-degree-first.
/// Trailing zero coefficients are trimmed; degree 0 means constant.
class PolySymbol {
 public:
  explicit PolySymbol(std::vector<std::complex<double>> coeffs);

  const std::vector<std::complex<double>>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_constant() const { return degree() == 0; }

  std::complex<double> operator()(std::complex<double> z) const;
  /// sum_j j |c_j|: bounds |phi'| on the closed disk, hence the arc-length
  /// Lipschitz constant of theta -> phi(e^{i theta}).
  double derivative_bound() const;
  /// sum_j |c_j|: bounds |phi| on the closed disk.
  double coefficient_sum() const;
  double max_coefficient() const;
  /// phi / s
  PolySymbol divided_by(std::complex<double> s) const;
  std::string describe() const;

 private:
  std::vector<std::complex<double>> coeffs_;
};

/// (M_phi^* f)_n = sum_j conj(c_j) f_{n+j} on Hardy coefficients supported in [0, trunc].
CoefVec apply_adjoint(const PolySymbol& phi, const CoefVec& x, std::int64_t trunc);

struct KernelVector {
  CoefVec k;
  /// Upper bound for the squared norm of the discarded tail, |z|^{2(N+1)}/(1-|z|^2).
  double tail_norm2_bound = 0.0;
};

/// Truncated reproducing kernel (conj(z)^n)_{n=0..N}.
KernelVector kernel_vector(std::complex<double> z, std::int64_t N);

struct EigenResidual {
  /// ||M_phi^* k - conj(phi(z)) k|| / ||k|| for the truncated kernel k.
  double residual = 0.0;
  /// (d+1) max|c_j| (1+|phi(z)|) sqrt(tail bound).
  double bound = 0.0;
  /// log10 of both, valid below the double range.
  double log10_residual = 0.0;
  double log10_bound = 0.0;
  bool within_bound = false;
  /// Working precision in bits.
  long precision_bits = 0;
};

/// Eigen-identity check for the truncated kernel. Evaluated in multiprecision
/// arithmetic with enough bits that rounding stays far below the analytic bound.
EigenResidual eigen_check(const PolySymbol& phi, std::complex<double> z, std::int64_t N);

struct RangeCertificate {
  enum class Verdict { Intersects, DisjointInside, DisjointOutside, Uncertain };
  Verdict verdict = Verdict::Uncertain;
  /// Interior point with ||phi(z)| - 1| <= tol (Intersects).
  std::complex<double> witness{0.0, 0.0};
  double witness_modulus = 0.0;
  /// Certified bounds of |phi| on the unit circle.
  double boundary_max_upper = 0.0;
  double boundary_min_lower = 0.0;
  /// Winding number of phi(e^{i theta}) about 0 (valid when boundary_min_lower > 0).
  int winding = 0;
  bool winding_certified = false;
  /// Arcs within touch tolerance of the unit circle (tangential contact).
  int contact_arcs = 0;
  double lipschitz = 0.0;
  int grid = 0;
  std::int64_t arcs_examined = 0;
  /// For Uncertain: distance of the best bound from deciding.
  double margin = 0.0;
};

inline constexpr double kDefaultWitnessTol = 1e-9;
inline constexpr int kDefaultBoundaryGrid = 1 << 12;

std::string to_string(RangeCertificate::Verdict v);

/// Decides whether phi(D) meets the unit circle, returning checkable evidence.
RangeCertificate range_circle_test(const PolySymbol& phi, int grid = kDefaultBoundaryGrid,
                                   double tol = kDefaultWitnessTol);
/// Re-checks a certificate from raw evaluations of phi.
bool verify_certificate(const PolySymbol& phi, const RangeCertificate& cert, double tol = kDefaultWitnessTol);

/// Argument accumulation of phi(e^{i theta}) over `samples` equally spaced points.
int winding_number(const PolySymbol& phi, int samples);

enum class AdjointClass {
  FrequentlyHypercyclicMultiplyRecurrent,
  NotRecurrent,
  ConstantRecurrent,
  ConstantNotRecurrent,
  Uncertain,
};

std::string to_string(AdjointClass c);

/// Dynamics of M_phi^* on H^2 read off from phi(D) against the unit circle.
AdjointClass classify_adjoint(const PolySymbol& phi);

}  // namespace opdyn
