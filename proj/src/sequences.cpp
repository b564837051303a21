#include "opdyn/sequences.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>

#include "opdyn/errors.hpp"
#include "opdyn/format.hpp"

namespace opdyn {

namespace {

constexpr log_real kLn2 = std::numbers::ln2_v<log_real>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

std::complex<long double> horner(const std::vector<cplx>& coeffs, long double x) {
  std::complex<long double> acc{0.0L, 0.0L};
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc = acc * x + std::complex<long double>(it->real(), it->imag());
  }
  return acc;
}

LogScalar from_long_complex(std::complex<long double> z) {
  if (z == std::complex<long double>{0.0L, 0.0L}) return LogScalar::zero();
  return LogScalar::from_log(std::log(std::abs(z)), std::arg(z));
}

std::string poly_text(const std::vector<cplx>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += fmt_cplx(c[i]);
  }
  return s;
}

LogScalar eval_family(const SeqFamily& fam, std::int64_t n) {
  const long double x = static_cast<long double>(n);
  return std::visit(
      overloaded{
          [](const family::Constant& f) { return LogScalar::from_complex(f.c); },
          [&](const family::LogPow& f) {
            if (n == 1) {
              if (f.k > 0) return LogScalar::zero();
              if (f.k == 0) return LogScalar::one();
              throw DomainError("log_pow with k < 0 is undefined at n = 1");
            }
            return LogScalar::from_log(static_cast<long double>(f.k) * std::log(std::log(x)));
          },
          [&](const family::LogLog&) {
            if (n < 3) throw DomainError("loglog is defined for n >= 3");
            return LogScalar::from_log(std::log(std::log(std::log(x))));
          },
          [&](const family::RationalPoly& f) {
            const auto q = horner(f.q, x);
            if (q == std::complex<long double>{0.0L, 0.0L}) {
              throw DomainError("rational sequence: Q vanishes at n = " + std::to_string(n));
            }
            return from_long_complex(horner(f.p, x) / q);
          },
          [&](const family::ExpPow& f) {
            return LogScalar::from_log(std::pow(x, static_cast<long double>(f.a)));
          },
          [&](const family::ExpOverLog&) {
            if (n < 2) throw DomainError("exp_over_log is defined for n >= 2");
            return LogScalar::from_log(x / std::log(x));
          },
          [&](const family::ExpOverLogLog&) {
            if (n < 3) throw DomainError("exp_over_loglog is defined for n >= 3");
            return LogScalar::from_log(x / std::log(std::log(x)));
          },
          [&](const family::Factorial&) { return LogScalar::from_log(std::lgamma(x + 1.0L)); },
          [&](const family::GeomEvenOdd&) {
            return LogScalar::from_log(static_cast<log_real>(n / 2) * kLn2);
          },
          [&](const family::DyadicTower&) {
            // n in [2^{k-1}, 2^k)  <=>  k = bit_width(n)
            const int k = std::bit_width(static_cast<std::uint64_t>(n));
            return LogScalar::from_log(std::ldexp(1.0L, k) * kLn2);
          },
          [&](const family::PowerOfW& f) { return LogScalar::from_complex(f.w).pow(2 * n); },
          [&](const family::GeomInverse& f) {
            if (f.a == cplx{0.0, 0.0}) throw DomainError("geom_inverse needs a != 0");
            return LogScalar::from_complex(f.a).pow(-n);
          },
          [&](const family::Table& f) {
            if (static_cast<std::size_t>(n) > f.values.size()) {
              throw DomainError("table sequence has no entry at n = " + std::to_string(n));
            }
            return f.values[static_cast<std::size_t>(n - 1)];
          },
      },
      fam);
}

}  // namespace

long double PhaseGen::at(std::int64_t n) const {
  if (!table.empty()) {
    if (n < 1 || static_cast<std::size_t>(n) > table.size()) {
      throw DomainError("phase table has no entry at n = " + std::to_string(n));
    }
    return table[static_cast<std::size_t>(n - 1)];
  }
  return static_cast<long double>(slope) * n + offset;
}

std::int64_t ScalingSeq::min_index() const {
  return std::visit(overloaded{
                        [](const family::LogPow& f) -> std::int64_t { return f.k < 0 ? 2 : 1; },
                        [](const family::LogLog&) -> std::int64_t { return 3; },
                        [](const family::ExpOverLog&) -> std::int64_t { return 2; },
                        [](const family::ExpOverLogLog&) -> std::int64_t { return 3; },
                        [](const auto&) -> std::int64_t { return 1; },
                    },
                    family);
}

std::string ScalingSeq::describe() const {
  std::string s = std::visit(
      overloaded{
          [](const family::Constant& f) { return "constant c=" + fmt_cplx(f.c); },
          [](const family::LogPow& f) { return "log_pow k=" + fmt_num(f.k); },
          [](const family::LogLog&) { return std::string("loglog"); },
          [](const family::RationalPoly& f) {
            return "rational P=" + poly_text(f.p) + " Q=" + poly_text(f.q);
          },
          [](const family::ExpPow& f) { return "exp_pow a=" + fmt_num(f.a); },
          [](const family::ExpOverLog&) { return std::string("exp_over_log"); },
          [](const family::ExpOverLogLog&) { return std::string("exp_over_loglog"); },
          [](const family::Factorial&) { return std::string("factorial"); },
          [](const family::GeomEvenOdd&) { return std::string("geom_even_odd"); },
          [](const family::DyadicTower&) { return std::string("dyadic_tower"); },
          [](const family::PowerOfW& f) { return "power_of_w w=" + fmt_cplx(f.w); },
          [](const family::GeomInverse& f) { return "geom_inverse a=" + fmt_cplx(f.a); },
          [](const family::Table& f) {
            return "table len=" + std::to_string(f.values.size());
          },
      },
      family);
  if (reciprocal) s += " reciprocal=1";
  for (const auto& r : rotations) {
    if (r.table.empty()) {
      s += " rotate=" + fmt_num(r.slope) + "n+" + fmt_num(r.offset);
    } else {
      s += " rotate=table" + std::to_string(r.table.size());
    }
  }
  return s;
}

LogScalar eval_log(const ScalingSeq& seq, std::int64_t n) {
  if (n < seq.min_index()) {
    throw DomainError(seq.describe() + " is not defined at n = " + std::to_string(n));
  }
  LogScalar v = eval_family(seq.family, n);
  if (seq.reciprocal) v = v.inverse();
  for (const auto& r : seq.rotations) v = v.rotated(r.at(n));
  return v;
}

ScalingSeq rotate_seq(const ScalingSeq& seq, const PhaseGen& theta) {
  ScalingSeq out = seq;
  if (theta.table.empty() && theta.slope == 0.0 && theta.offset == 0.0) return out;
  out.rotations.push_back(theta);
  return out;
}

std::string to_string(RatioVerdict::Kind k) {
  switch (k) {
    case RatioVerdict::Kind::Good: return "Good";
    case RatioVerdict::Kind::Bad: return "Bad";
    case RatioVerdict::Kind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

RatioVerdict ratio_classify(const ScalingSeq& seq, std::int64_t tau, std::int64_t horizon,
                            double tol, IndexFilter filter) {
  if (tau < 1) throw PreconditionError("ratio_classify: tau must be >= 1");
  if (horizon < 100 * tau) throw PreconditionError("ratio_classify: need N >= 100*tau");
  if (!(tol > 0.0)) throw PreconditionError("ratio_classify: tol must be > 0");
  if (filter.modulus < 1) throw PreconditionError("ratio_classify: filter modulus must be >= 1");

  RatioVerdict v;
  v.tau = tau;
  v.horizon = horizon;
  v.window_begin = std::max<std::int64_t>((horizon + 1) / 2, seq.min_index());

  const std::int64_t lo = v.window_begin;
  const std::int64_t count = horizon + tau - lo + 1;
  std::vector<LogScalar> vals;
  vals.reserve(static_cast<std::size_t>(count));
  for (std::int64_t n = lo; n <= horizon + tau; ++n) vals.push_back(eval_log(seq, n));

  constexpr double kInf = std::numeric_limits<double>::infinity();
  double rmin = kInf;
  double rmax = -kInf;
  double defect = 0.0;
  bool undefined = false;
  bool all_small = true;
  bool all_large = true;
  std::int64_t seen = 0;
  std::vector<double> tail;

  const std::int64_t residue = ((filter.residue % filter.modulus) + filter.modulus) % filter.modulus;
  for (std::int64_t n = lo; n <= horizon; ++n) {
    if (n % filter.modulus != residue) continue;
    const LogScalar& a = vals[static_cast<std::size_t>(n - lo)];
    const LogScalar& b = vals[static_cast<std::size_t>(n + tau - lo)];
    double r;
    if (b.is_zero()) {
      if (a.is_zero()) {
        undefined = true;
        continue;
      }
      r = kInf;
    } else if (a.is_zero()) {
      r = 0.0;
    } else {
      r = static_cast<double>(std::exp(a.log_mag() - b.log_mag()));
    }
    ++seen;
    rmin = std::min(rmin, r);
    rmax = std::max(rmax, r);
    defect = std::max(defect, std::abs(r - 1.0));
    all_small = all_small && r <= tol;
    all_large = all_large && r >= 1.0 / tol;
    tail.push_back(r);
    if (tail.size() > 8) tail.erase(tail.begin());
  }

  v.min_ratio = rmin;
  v.max_ratio = rmax;
  v.max_defect = defect;
  v.evidence = std::move(tail);
  if (undefined || seen == 0) return v;

  if (defect <= tol) {
    v.kind = RatioVerdict::Kind::Good;
    v.limit = 1.0;
  } else if (all_small) {
    v.kind = RatioVerdict::Kind::Bad;
    v.limit = 0.0;
  } else if (all_large) {
    v.kind = RatioVerdict::Kind::Bad;
    v.limit = kInf;
  } else if (rmax - rmin <= 2.0 * tol) {
    const double mid = 0.5 * (rmin + rmax);
    if (std::abs(mid - 1.0) > 2.0 * tol) {
      v.kind = RatioVerdict::Kind::Bad;
      v.limit = mid;
    }
  }
  return v;
}

}  // namespace opdyn
