#include "opdyn/symbol.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>

#include "opdyn/errors.hpp"
#include "opdyn/format.hpp"

namespace opdyn {

using cd = std::complex<double>;

PolySymbol::PolySymbol(std::vector<cd> coeffs) : coeffs_(std::move(coeffs)) {
  while (coeffs_.size() > 1 && coeffs_.back() == cd{0.0, 0.0}) coeffs_.pop_back();
  if (coeffs_.empty()) coeffs_.push_back({0.0, 0.0});
}

cd PolySymbol::operator()(cd z) const {
  cd acc{0.0, 0.0};
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double PolySymbol::derivative_bound() const {
  double s = 0.0;
  for (std::size_t j = 1; j < coeffs_.size(); ++j) s += static_cast<double>(j) * std::abs(coeffs_[j]);
  return s;
}

double PolySymbol::coefficient_sum() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::abs(c);
  return s;
}

double PolySymbol::max_coefficient() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

PolySymbol PolySymbol::divided_by(cd s) const {
  std::vector<cd> c = coeffs_;
  for (auto& v : c) v /= s;
  return PolySymbol(std::move(c));
}

std::string PolySymbol::describe() const {
  std::string s = "[";
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (i) s += ",";
    s += "[" + fmt_num(coeffs_[i].real()) + "," + fmt_num(coeffs_[i].imag()) + "]";
  }
  return s + "]";
}

CoefVec apply_adjoint(const PolySymbol& phi, const CoefVec& x, std::int64_t trunc) {
  if (x.side() != Side::HardyCoef) throw SideMismatch("apply_adjoint expects Hardy coefficients");
  if (!x.empty() && (x.min_support() < 0 || x.max_support() > trunc)) {
    throw std::invalid_argument("apply_adjoint: support exceeds [0, trunc]");
  }
  const auto& c = phi.coeffs();
  std::map<std::int64_t, cd> acc;
  for (const auto& [i, v] : x.entries()) {
    const cd f = v.to_complex();
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(c.size()) && j <= i; ++j) {
      acc[i - j] += std::conj(c[static_cast<std::size_t>(j)]) * f;
    }
  }
  CoefVec out(Side::HardyCoef);
  for (const auto& [n, v] : acc) {
    if (v != cd{0.0, 0.0}) out.push_back(n, LogScalar::from_complex(v));
  }
  return out;
}

KernelVector kernel_vector(cd z, std::int64_t N) {
  const double r = std::abs(z);
  if (r >= 1.0) throw DomainError("reproducing kernel needs |z| < 1");
  if (r > 0.95) throw PreconditionError("kernel_vector: |z| must be <= 0.95 for a useful tail bound");
  if (N < 0) throw std::invalid_argument("kernel_vector: N must be >= 0");
  KernelVector kv{CoefVec(Side::HardyCoef), 0.0};
  if (r == 0.0) {
    kv.k.push_back(0, LogScalar::one());
    return kv;
  }
  const long double lr = std::log(static_cast<long double>(r));
  const long double arg = std::arg(z);
  for (std::int64_t n = 0; n <= N; ++n) {
    kv.k.push_back(n, LogScalar::from_log(lr * n, -arg * n));
  }
  kv.tail_norm2_bound = static_cast<double>(std::exp(2.0L * (N + 1) * lr) / (1.0L - r * r));
  return kv;
}

namespace {

// Minimal RAII wrapper over an MPFR value at a fixed precision.
class Mp {
 public:
  explicit Mp(mpfr_prec_t prec, double v = 0.0) {
    mpfr_init2(v_, prec);
    mpfr_set_d(v_, v, MPFR_RNDN);
  }
  Mp(const Mp& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  Mp& operator=(const Mp& o) {
    if (this != &o) mpfr_set(v_, o.v_, MPFR_RNDN);
    return *this;
  }
  ~Mp() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

 private:
  mpfr_t v_;
};

struct MpC {
  Mp re;
  Mp im;
  MpC(mpfr_prec_t p, cd z = {0.0, 0.0}) : re(p, z.real()), im(p, z.imag()) {}
};

// out = a * b (complex)
void mul(MpC& out, const MpC& a, const MpC& b, Mp& t1, Mp& t2) {
  mpfr_mul(t1.get(), a.re.get(), b.re.get(), MPFR_RNDN);
  mpfr_mul(t2.get(), a.im.get(), b.im.get(), MPFR_RNDN);
  Mp re(out.re.prec());
  mpfr_sub(re.get(), t1.get(), t2.get(), MPFR_RNDN);
  mpfr_mul(t1.get(), a.re.get(), b.im.get(), MPFR_RNDN);
  mpfr_mul(t2.get(), a.im.get(), b.re.get(), MPFR_RNDN);
  mpfr_add(out.im.get(), t1.get(), t2.get(), MPFR_RNDN);
  mpfr_set(out.re.get(), re.get(), MPFR_RNDN);
}

void add_to(MpC& acc, const MpC& v) {
  mpfr_add(acc.re.get(), acc.re.get(), v.re.get(), MPFR_RNDN);
  mpfr_add(acc.im.get(), acc.im.get(), v.im.get(), MPFR_RNDN);
}

void add_abs2(Mp& acc, const MpC& v, Mp& t) {
  mpfr_sqr(t.get(), v.re.get(), MPFR_RNDN);
  mpfr_add(acc.get(), acc.get(), t.get(), MPFR_RNDN);
  mpfr_sqr(t.get(), v.im.get(), MPFR_RNDN);
  mpfr_add(acc.get(), acc.get(), t.get(), MPFR_RNDN);
}

}  // namespace

EigenResidual eigen_check(const PolySymbol& phi, cd z, std::int64_t N) {
  const KernelVector kv = kernel_vector(z, N);  // validates z and N
  const auto& c = phi.coeffs();
  const int d = phi.degree();
  const cd phiz = phi(z);

  EigenResidual out;
  const double C = (d + 1) * phi.max_coefficient() * (1.0 + std::abs(phiz));
  const double r = std::abs(z);
  // log10 of C * sqrt(tail), computed without underflow
  double log10_bound = -std::numeric_limits<double>::infinity();
  if (r > 0.0 && C > 0.0) {
    log10_bound = std::log10(C) + 0.5 * (2.0 * (N + 1) * std::log10(r) - std::log10(1.0 - r * r));
  }
  out.log10_bound = log10_bound;
  out.bound = std::isfinite(log10_bound) ? std::pow(10.0, log10_bound) : 0.0;

  // rounding must sit well below the bound: bits ~ -log2(bound) + margin
  long bits = 128;
  if (std::isfinite(log10_bound)) {
    bits = std::max<long>(bits, static_cast<long>(std::ceil(-log10_bound * 3.3219280948873623)) + 128);
  }
  out.precision_bits = bits;
  const mpfr_prec_t prec = bits;

  Mp t1(prec), t2(prec), t3(prec);
  const MpC zbar(prec, std::conj(z));

  // conj(phi(z)) by Horner in multiprecision
  MpC zc(prec, z);
  MpC phi_mp(prec);
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    MpC tmp(prec);
    mul(tmp, phi_mp, zc, t1, t2);
    MpC cj(prec, *it);
    add_to(tmp, cj);
    phi_mp = tmp;
  }
  MpC cphi(prec);
  mpfr_set(cphi.re.get(), phi_mp.re.get(), MPFR_RNDN);
  mpfr_neg(cphi.im.get(), phi_mp.im.get(), MPFR_RNDN);

  // kernel coefficients conj(z)^n
  std::vector<MpC> p;
  p.reserve(static_cast<std::size_t>(N + 1));
  p.emplace_back(prec, cd{1.0, 0.0});
  for (std::int64_t n = 1; n <= N; ++n) {
    MpC next(prec);
    mul(next, p.back(), zbar, t1, t2);
    p.push_back(next);
  }
  std::vector<MpC> cbar;
  for (const auto& cj : c) cbar.emplace_back(prec, std::conj(cj));

  Mp res2(prec), k2(prec);
  for (std::int64_t n = 0; n <= N; ++n) {
    MpC rn(prec);
    for (int j = 0; j <= d && n + j <= N; ++j) {
      MpC term(prec);
      mul(term, cbar[static_cast<std::size_t>(j)], p[static_cast<std::size_t>(n + j)], t1, t2);
      add_to(rn, term);
    }
    MpC ev(prec);
    mul(ev, cphi, p[static_cast<std::size_t>(n)], t1, t2);
    mpfr_sub(rn.re.get(), rn.re.get(), ev.re.get(), MPFR_RNDN);
    mpfr_sub(rn.im.get(), rn.im.get(), ev.im.get(), MPFR_RNDN);
    add_abs2(res2, rn, t3);
    add_abs2(k2, p[static_cast<std::size_t>(n)], t3);
  }
  Mp ratio(prec);
  mpfr_div(ratio.get(), res2.get(), k2.get(), MPFR_RNDN);
  mpfr_sqrt(ratio.get(), ratio.get(), MPFR_RNDN);
  out.residual = mpfr_get_d(ratio.get(), MPFR_RNDN);
  if (mpfr_zero_p(ratio.get())) {
    out.log10_residual = -std::numeric_limits<double>::infinity();
  } else {
    Mp l(prec);
    mpfr_log10(l.get(), ratio.get(), MPFR_RNDN);
    out.log10_residual = mpfr_get_d(l.get(), MPFR_RNDN);
  }
  out.within_bound = out.log10_residual <= out.log10_bound;
  return out;
}

std::string to_string(RangeCertificate::Verdict v) {
  switch (v) {
    case RangeCertificate::Verdict::Intersects: return "Intersects";
    case RangeCertificate::Verdict::DisjointInside: return "DisjointInside";
    case RangeCertificate::Verdict::DisjointOutside: return "DisjointOutside";
    case RangeCertificate::Verdict::Uncertain: return "Uncertain";
  }
  return "?";
}

std::string to_string(AdjointClass c) {
  switch (c) {
    case AdjointClass::FrequentlyHypercyclicMultiplyRecurrent:
      return "FrequentlyHypercyclic-and-MultiplyRecurrent";
    case AdjointClass::NotRecurrent: return "NotRecurrent";
    case AdjointClass::ConstantRecurrent: return "ConstantRecurrent";
    case AdjointClass::ConstantNotRecurrent: return "ConstantNotRecurrent";
    case AdjointClass::Uncertain: return "Uncertain";
  }
  return "?";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Boundary values within this distance of |w| = 1 count as tangential contact.
constexpr double kTouchTol = 1e-12;
constexpr double kMinArcHalfWidth = 1e-9;
constexpr std::int64_t kArcBudget = std::int64_t{1} << 22;

double modulus_gap(const PolySymbol& phi, cd z) { return std::abs(phi(z)) - 1.0; }

// Bisection on the segment [a, b] where modulus_gap changes sign.
std::optional<cd> bisect(const PolySymbol& phi, cd a, double fa, cd b, double tol) {
  for (int it = 0; it < 400; ++it) {
    const cd m = 0.5 * (a + b);
    const double fm = modulus_gap(phi, m);
    if (std::abs(fm) <= 0.5 * tol) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
    if (std::abs(b - a) < 1e-17) break;
  }
  const cd m = 0.5 * (a + b);
  if (std::abs(modulus_gap(phi, m)) <= tol) return m;
  return std::nullopt;
}

std::optional<cd> interior_search(const PolySymbol& phi, int grid, double tol) {
  const double f0 = modulus_gap(phi, 0.0);
  if (std::abs(f0) <= tol) return cd{0.0, 0.0};
  const double L = phi.derivative_bound();

  // rays towards boundary points on the other side of the circle
  for (int k = 0; k < grid; ++k) {
    const double th = kTwoPi * k / grid;
    const cd u = std::polar(1.0, th);
    const double b = modulus_gap(phi, u);
    if ((b < 0) == (f0 < 0) || std::abs(b) <= 2.0 * tol) continue;
    const double r_end = 1.0 - std::abs(b) / (2.0 * L);
    const cd end = r_end * u;
    const double fe = modulus_gap(phi, end);
    if (fe == 0.0) return end;
    if ((fe < 0) == (f0 < 0)) continue;
    if (auto w = bisect(phi, 0.0, f0, end, tol)) return w;
  }

  // polar interior grid
  const int angles = std::max(16, grid / 16);
  constexpr int kRadii = 32;
  const double r_max = 1.0 - 1.0 / 1024.0;
  for (int a = 0; a < angles; ++a) {
    const cd u = std::polar(1.0, kTwoPi * a / angles);
    for (int i = 1; i <= kRadii; ++i) {
      const cd z = (r_max * i / kRadii) * u;
      const double f = modulus_gap(phi, z);
      if (std::abs(f) <= tol) return z;
      if ((f < 0) != (f0 < 0)) {
        if (auto w = bisect(phi, 0.0, f0, z, tol)) return w;
      }
    }
  }
  return std::nullopt;
}

// g(theta) = |phi(e^{i theta})|^2 with derivative and a bound on |g''|.
struct BoundaryModel {
  const PolySymbol& phi;
  double L;   // arc-length Lipschitz constant of phi on the circle
  double K2;  // sup |g''|

  explicit BoundaryModel(const PolySymbol& p) : phi(p), L(p.derivative_bound()), K2(0.0) {
    const auto& c = p.coeffs();
    for (std::size_t j = 0; j < c.size(); ++j) {
      for (std::size_t l = 0; l < c.size(); ++l) {
        const double dj = static_cast<double>(j) - static_cast<double>(l);
        K2 += dj * dj * std::abs(c[j]) * std::abs(c[l]);
      }
    }
  }

  struct Sample {
    double mod;  // |phi|
    double g;    // |phi|^2
    double dg;   // g'
  };

  Sample at(double th) const {
    const cd u = std::polar(1.0, th);
    const auto& c = phi.coeffs();
    cd v{0.0, 0.0};
    cd dv{0.0, 0.0};
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
      dv = dv * u + v;
      v = v * u + *it;
    }
    // d/dtheta phi(e^{i theta}) = phi'(u) i u
    const cd dphi = dv * cd{0.0, 1.0} * u;
    return {std::abs(v), std::norm(v), 2.0 * (std::conj(v) * dphi).real()};
  }

  // bounds of |phi| on the arc [th - h, th + h]
  std::pair<double, double> arc_bounds(const Sample& s, double h) const {
    const double first_lo = std::max(0.0, s.mod - L * h);
    const double first_hi = s.mod + L * h;
    const double g_lo = s.g - std::abs(s.dg) * h - 0.5 * K2 * h * h;
    const double g_hi = s.g + std::abs(s.dg) * h + 0.5 * K2 * h * h;
    const double lo = std::max(first_lo, g_lo > 0 ? std::sqrt(g_lo) : 0.0);
    const double hi = std::min(first_hi, std::sqrt(std::max(0.0, g_hi)));
    return {lo, hi};
  }
};

struct SweepResult {
  bool certified = false;
  double bound = 0.0;  // max upper (inside) or min lower (outside)
  int contact_arcs = 0;
  std::int64_t arcs = 0;
};

// inside: certify |phi| < 1 on the circle (up to contact); otherwise |phi| > 1.
SweepResult boundary_sweep(const BoundaryModel& model, int grid, bool inside) {
  SweepResult out;
  out.bound = inside ? 0.0 : std::numeric_limits<double>::infinity();
  struct Arc {
    double th;
    double h;
  };
  std::vector<Arc> stack;
  stack.reserve(static_cast<std::size_t>(grid));
  for (int k = grid - 1; k >= 0; --k) stack.push_back({kTwoPi * k / grid, std::numbers::pi / grid});
  while (!stack.empty()) {
    const Arc arc = stack.back();
    stack.pop_back();
    if (++out.arcs > kArcBudget) return out;
    const auto s = model.at(arc.th);
    const auto [lo, hi] = model.arc_bounds(s, arc.h);
    if (inside) {
      if (s.mod > 1.0 + kTouchTol) {
        out.bound = std::max(out.bound, hi);
        return out;
      }
      if (hi < 1.0) {
        out.bound = std::max(out.bound, hi);
        continue;
      }
      if (arc.h <= kMinArcHalfWidth) {
        if (hi > 1.0 + kTouchTol) return out;
        ++out.contact_arcs;
        out.bound = std::max(out.bound, hi);
        continue;
      }
    } else {
      if (s.mod < 1.0 - kTouchTol) {
        out.bound = std::min(out.bound, lo);
        return out;
      }
      if (lo > 1.0) {
        out.bound = std::min(out.bound, lo);
        continue;
      }
      if (arc.h <= kMinArcHalfWidth) {
        if (lo < 1.0 - kTouchTol) return out;
        ++out.contact_arcs;
        out.bound = std::min(out.bound, lo);
        continue;
      }
    }
    stack.push_back({arc.th + 0.5 * arc.h, 0.5 * arc.h});
    stack.push_back({arc.th - 0.5 * arc.h, 0.5 * arc.h});
  }
  out.certified = true;
  return out;
}

// Winding number from samples fine enough that no step can pass around 0.
std::pair<int, bool> certified_winding(const PolySymbol& phi, double min_modulus, int grid) {
  const double L = phi.derivative_bound();
  if (!(min_modulus > 0.0)) return {0, false};
  std::int64_t samples = grid;
  while (L * kTwoPi / static_cast<double>(samples) >= 0.5 * min_modulus) {
    samples *= 2;
    if (samples > kArcBudget) return {0, false};
  }
  return {winding_number(phi, static_cast<int>(samples)), true};
}

}  // namespace

int winding_number(const PolySymbol& phi, int samples) {
  double total = 0.0;
  cd prev = phi(1.0);
  for (int k = 1; k <= samples; ++k) {
    const cd cur = phi(std::polar(1.0, kTwoPi * k / samples));
    total += std::arg(cur / prev);
    prev = cur;
  }
  return static_cast<int>(std::lround(total / kTwoPi));
}

RangeCertificate range_circle_test(const PolySymbol& phi, int grid, double tol) {
  if (grid < 256) throw PreconditionError("range_circle_test: grid must be >= 256");
  if (!(tol > 0.0)) throw PreconditionError("range_circle_test: tol must be > 0");
  RangeCertificate cert;
  cert.grid = grid;
  cert.lipschitz = phi.derivative_bound();

  if (phi.is_constant()) {
    const double a = std::abs(phi.coeffs()[0]);
    cert.boundary_max_upper = a;
    cert.boundary_min_lower = a;
    cert.winding = 0;
    cert.winding_certified = a > 0.0;
    if (std::abs(a - 1.0) <= tol) {
      cert.verdict = RangeCertificate::Verdict::Intersects;
      cert.witness_modulus = a;
    } else {
      cert.verdict = a < 1.0 ? RangeCertificate::Verdict::DisjointInside
                             : RangeCertificate::Verdict::DisjointOutside;
    }
    return cert;
  }

  if (auto w = interior_search(phi, grid, tol)) {
    cert.verdict = RangeCertificate::Verdict::Intersects;
    cert.witness = *w;
    cert.witness_modulus = std::abs(phi(*w));
    return cert;
  }

  const BoundaryModel model(phi);
  // |phi(z)| <= sum |c_j| on the closed disk
  const double coef_sum = phi.coefficient_sum();
  SweepResult in;
  if (coef_sum <= 1.0) {
    in.certified = true;
    in.bound = coef_sum;
  } else {
    in = boundary_sweep(model, grid, true);
  }
  cert.arcs_examined += in.arcs;
  if (in.certified) {
    cert.verdict = RangeCertificate::Verdict::DisjointInside;
    cert.boundary_max_upper = in.bound;
    cert.contact_arcs = in.contact_arcs;
    return cert;
  }

  const SweepResult out = boundary_sweep(model, grid, false);
  cert.arcs_examined += out.arcs;
  cert.boundary_max_upper = in.bound;
  cert.boundary_min_lower = std::isfinite(out.bound) ? out.bound : 0.0;
  if (out.certified) {
    const auto [wind, ok] = certified_winding(phi, std::min(out.bound, 1.0), grid);
    cert.winding = wind;
    cert.winding_certified = ok;
    if (ok && wind == 0) {
      cert.verdict = RangeCertificate::Verdict::DisjointOutside;
      cert.contact_arcs = out.contact_arcs;
      return cert;
    }
  }
  cert.verdict = RangeCertificate::Verdict::Uncertain;
  cert.margin = std::min(std::abs(in.bound - 1.0), std::abs(1.0 - cert.boundary_min_lower));
  return cert;
}

bool verify_certificate(const PolySymbol& phi, const RangeCertificate& cert, double tol) {
  using V = RangeCertificate::Verdict;
  switch (cert.verdict) {
    case V::Intersects:
      if (phi.is_constant()) return std::abs(std::abs(phi.coeffs()[0]) - 1.0) <= tol;
      return std::abs(cert.witness) < 1.0 && std::abs(std::abs(phi(cert.witness)) - 1.0) <= tol;
    case V::DisjointInside:
    case V::DisjointOutside: {
      const RangeCertificate again = range_circle_test(phi, cert.grid, tol);
      return again.verdict == cert.verdict && again.boundary_max_upper == cert.boundary_max_upper &&
             again.boundary_min_lower == cert.boundary_min_lower && again.winding == cert.winding;
    }
    case V::Uncertain: return true;
  }
  return false;
}

AdjointClass classify_adjoint(const PolySymbol& phi) {
  if (phi.is_constant()) {
    return std::abs(std::abs(phi.coeffs()[0]) - 1.0) <= 1e-12 ? AdjointClass::ConstantRecurrent
                                                             : AdjointClass::ConstantNotRecurrent;
  }
  const RangeCertificate cert = range_circle_test(phi);
  switch (cert.verdict) {
    case RangeCertificate::Verdict::Intersects:
      return AdjointClass::FrequentlyHypercyclicMultiplyRecurrent;
    case RangeCertificate::Verdict::DisjointInside:
    case RangeCertificate::Verdict::DisjointOutside: return AdjointClass::NotRecurrent;
    case RangeCertificate::Verdict::Uncertain: return AdjointClass::Uncertain;
  }
  return AdjointClass::Uncertain;
}

}  // namespace opdyn
