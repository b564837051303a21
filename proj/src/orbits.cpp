#include "opdyn/orbits.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "opdyn/errors.hpp"
#include "opdyn/format.hpp"
#include "opdyn/parallel.hpp"

namespace opdyn {

HittingSet::HittingSet(std::int64_t n_max, Provenance prov)
    : n_max_(n_max), bits_(n_max + 1), prov_(std::move(prov)) {
  if (n_max < 1) throw std::invalid_argument("HittingSet: N_max must be >= 1");
}

HittingSet HittingSet::from_indices(std::int64_t n_max, const std::vector<std::int64_t>& indices) {
  HittingSet h(n_max);
  for (auto n : indices) h.insert(n);
  return h;
}

HittingSet HittingSet::from_predicate(std::int64_t n_max, const std::function<bool(std::int64_t)>& pred) {
  HittingSet h(n_max);
  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (pred(n)) h.insert(n);
  }
  return h;
}

void HittingSet::insert(std::int64_t n) {
  if (n < 1 || n > n_max_) throw RangeError("HittingSet: index outside [1, N_max]");
  bits_.set(n);
}

std::vector<std::int64_t> HittingSet::members() const {
  std::vector<std::int64_t> out;
  for (std::int64_t n = bits_.next(1); n >= 0; n = bits_.next(n + 1)) out.push_back(n);
  return out;
}

OrbitProbe::OrbitProbe(const CoefVec& x, const ScalingSeq& lam, const ShiftOp& T, const Ball& b, std::int64_t N)
  : xv_(x), x_(xv_.entries()), lam_(lam), T_(T), pt_(T.side, T.weights) {
  if (x.side() != T.side || b.center().side() != T.side) {
    throw SideMismatch("hitting_set: vector, ball and operator sides differ");
  }
  for (const auto& [j, v] : b.center().entries()) y_.push_back({j, v.to_complex()});
  eps2_ = b.radius() * b.radius();
  y_norm2_ = 0.0;
  for (const auto& [j, v] : y_) y_norm2_ += std::norm(v);
  log_thresh_ = std::log(std::sqrt(y_norm2_) + b.radius());
  log_sup_ = std::log(static_cast<long double>(T.weights.sup_bound()));

  suffix_.assign(x_.size() + 1, -std::numeric_limits<log_real>::infinity());
  for (std::size_t t = x_.size(); t-- > 0;) suffix_[t] = log_sum_exp(suffix_[t + 1], 2.0L * x_[t].second.log_mag());

  if (!x_.empty()) {
    if (T.side == Side::Unilateral) {
      pt_.ensure(0, x_.back().first);
    } else {
      pt_.ensure(x_.front().first - N - 1, x_.back().first);
    }
  }
}

std::size_t OrbitProbe::first_entry(std::int64_t n) const {
  if (T_.side != Side::Unilateral) return 0;
  // entries at indices <= n are annihilated by T^n
  return static_cast<std::size_t>(std::upper_bound(x_.begin(), x_.end(), n,
                                                   [](std::int64_t v, const CoefVec::Entry& e) { return v < e.first; }) -
                                  x_.begin());
}

bool OrbitProbe::hit(std::int64_t n) const {
  const LogScalar lam_n = eval_log(lam_, n);
  if (lam_n.is_zero() || T_.premult.is_zero() || x_.empty()) return y_norm2_ < eps2_;
  const LogScalar coef = lam_n * T_.premult.pow(n);

  std::size_t t = first_entry(n);
  const log_real tail_base = coef.log_mag() + static_cast<log_real>(n) * log_sup_;

  double acc = 0.0;
  std::size_t yi = 0;
  for (; t < x_.size(); ++t) {
    const std::int64_t i = x_[t].first;
    const std::int64_t j = i - n;
    while (yi < y_.size() && y_[yi].first < j) acc += std::norm(y_[yi++].second);
    if (acc >= eps2_) return false;
    if (yi == y_.size()) {
      const log_real tail = tail_base + 0.5L * suffix_[t];
      if (acc + static_cast<double>(std::exp(2.0L * tail)) < eps2_) return true;
    }
    const LogScalar v = coef * LogScalar::from_log(pt_.prefix(i) - pt_.prefix(j)) * x_[t].second;
    if (v.log_mag() > log_thresh_) return false;
    const std::complex<double> vc = v.log_mag() < -745.0L ? std::complex<double>{} : v.to_complex();
    if (yi < y_.size() && y_[yi].first == j) {
      acc += std::norm(vc - y_[yi++].second);
    } else {
      acc += std::norm(vc);
    }
  }
  while (yi < y_.size()) acc += std::norm(y_[yi++].second);
  return acc < eps2_;
}

double OrbitProbe::distance_upper(std::int64_t n) const {
  const LogScalar lam_n = eval_log(lam_, n);
  if (lam_n.is_zero() || T_.premult.is_zero() || x_.empty()) return std::sqrt(y_norm2_);
  const LogScalar coef = lam_n * T_.premult.pow(n);
  const log_real tail_base = coef.log_mag() + static_cast<log_real>(n) * log_sup_;
  double acc = 0.0;
  std::size_t yi = 0;
  for (std::size_t t = first_entry(n); t < x_.size(); ++t) {
    const std::int64_t i = x_[t].first;
    const std::int64_t j = i - n;
    while (yi < y_.size() && y_[yi].first < j) acc += std::norm(y_[yi++].second);
    if (yi == y_.size()) {
      const double tail2 = static_cast<double>(std::exp(2.0L * (tail_base + 0.5L * suffix_[t])));
      if (tail2 <= 1e-3 * acc || tail2 < 1e-300) return std::sqrt(acc + tail2);
    }
    const LogScalar v = coef * LogScalar::from_log(pt_.prefix(i) - pt_.prefix(j)) * x_[t].second;
    if (v.log_mag() > 700.0L) return std::numeric_limits<double>::infinity();
    const std::complex<double> vc = v.log_mag() < -745.0L ? std::complex<double>{} : v.to_complex();
    if (yi < y_.size() && y_[yi].first == j) {
      acc += std::norm(vc - y_[yi++].second);
    } else {
      acc += std::norm(vc);
    }
  }
  while (yi < y_.size()) acc += std::norm(y_[yi++].second);
  return std::sqrt(acc);
}

HittingSet hitting_set(const CoefVec& x, const ScalingSeq& lam, const ShiftOp& T, const Ball& b, std::int64_t N,
                       int workers) {
  if (N < 1) throw PreconditionError("hitting_set: N must be >= 1");
  const OrbitProbe tester(x, lam, T, b, N);
  HittingSet H(N, Provenance{summarize(x), lam.describe(), T.describe(),
                             "B(" + summarize(b.center()) + ", " + fmt_num(b.radius()) + ")"});
  const int w = resolve_workers(workers);
  std::vector<std::vector<std::int64_t>> found(static_cast<std::size_t>(w));
  for_chunks(1, N + 1, w, [&](int c, std::int64_t lo, std::int64_t hi) {
    auto& out = found[static_cast<std::size_t>(c)];
    for (std::int64_t n = lo; n < hi; ++n) {
      if (tester.hit(n)) out.push_back(n);
    }
  });
  for (const auto& part : found) {
    for (auto n : part) H.insert(n);
  }
  return H;
}

std::int64_t default_window_start(std::int64_t n_max) {
  const auto r = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(n_max))));
  return std::max<std::int64_t>(10, r);
}

DensityStats density_stats(const HittingSet& H, std::int64_t n0) {
  const std::int64_t nmax = H.n_max();
  if (n0 < 10 || n0 > nmax / 10) throw PreconditionError("density_stats: need 10 <= N_0 <= N_max/10");
  DensityStats d;
  d.window_begin = n0;
  d.n_max = nmax;
  d.lower_est = std::numeric_limits<double>::infinity();
  d.upper_est = 0.0;
  std::int64_t next_sample = n0;
  std::int64_t count = 0;
  for (std::int64_t n = 1; n <= nmax; ++n) {
    if (H.contains(n)) ++count;
    if (n < n0) continue;
    const double dens = static_cast<double>(count) / static_cast<double>(n);
    d.lower_est = std::min(d.lower_est, dens);
    d.upper_est = std::max(d.upper_est, dens);
    if (n == next_sample || n == nmax) {
      d.samples.push_back({n, count, dens});
      next_sample = std::max(n + 1, static_cast<std::int64_t>(std::ceil(static_cast<double>(n) * 1.0905077326652577)));
    }
  }
  return d;
}

DensityStats density_stats(const HittingSet& H) { return density_stats(H, default_window_start(H.n_max())); }

std::int64_t default_max_k(std::int64_t n_max, std::int64_t m, std::int64_t tau) {
  return std::max<std::int64_t>(1, n_max / (4 * std::max<std::int64_t>(m, 1) * tau));
}

namespace {

// Bit a set iff a, a + step, ..., a + m*step all lie in H; false as soon as nothing survives.
bool progression_starts(const Bitset& base, std::int64_t m, std::int64_t step, Bitset& out) {
  out = base;
  for (std::int64_t j = 1; j <= m; ++j) {
    out.and_shifted(base, j * step);
    if (!out.any()) return false;
  }
  return out.any();
}

}  // namespace

std::optional<APWitness> find_ap(const HittingSet& H, std::int64_t m, std::int64_t tau, std::int64_t K,
                                 int workers) {
  if (m < 1 || K < 1 || tau < 1) throw PreconditionError("find_ap: need m >= 1, K >= 1, tau >= 1");
  const Bitset& base = H.bits();
  std::atomic<std::int64_t> best{K + 1};
  const int w = resolve_workers(workers);
  std::vector<std::optional<APWitness>> per_chunk(static_cast<std::size_t>(w));
  for_chunks(1, K + 1, w, [&](int c, std::int64_t lo, std::int64_t hi) {
    Bitset r;
    for (std::int64_t k = lo; k < hi; ++k) {
      if (k >= best.load()) return;
      if (!progression_starts(base, m, tau * k, r)) continue;
      const std::int64_t a = r.next(1);
      if (a < 0) continue;
      per_chunk[static_cast<std::size_t>(c)] = APWitness{a, k, m, tau};
      std::int64_t cur = best.load();
      while (k < cur && !best.compare_exchange_weak(cur, k)) {
      }
      return;
    }
  });
  std::optional<APWitness> out;
  for (const auto& r : per_chunk) {
    if (r && (!out || r->k < out->k)) out = r;
  }
  return out;
}

std::vector<std::int64_t> ap_k_members(const HittingSet& H, std::int64_t k, std::int64_t m, std::int64_t tau) {
  if (k < 1 || m < 0 || tau < 1) throw PreconditionError("ap_k_members: need k >= 1, m >= 0, tau >= 1");
  std::vector<std::int64_t> out;
  Bitset r;
  if (m == 0) {
    r = H.bits();
  } else if (!progression_starts(H.bits(), m, tau * k, r)) {
    return out;
  }
  for (std::int64_t a = r.next(1); a >= 0; a = r.next(a + 1)) out.push_back(a);
  return out;
}

bool verify_ap(const HittingSet& H, const APWitness& w) {
  if (w.k < 1 || w.m < 0 || w.tau < 1 || w.a < 1) return false;
  for (std::int64_t j = 0; j <= w.m; ++j) {
    if (!H.contains(w.member(j))) return false;
  }
  return true;
}

namespace {

std::int64_t checked(__int128 v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw OverflowError("IntPolynomial: value leaves int64");
  }
  return static_cast<std::int64_t>(v);
}

}  // namespace

IntPolynomial::IntPolynomial(std::vector<std::int64_t> binomial_coeffs) : c_(std::move(binomial_coeffs)) {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

IntPolynomial IntPolynomial::from_power_coeffs(const std::vector<std::int64_t>& a) {
  // k^d = sum_j S(d, j) j! C(k, j), S = Stirling numbers of the second kind
  const std::size_t D = a.size();
  std::vector<__int128> out(D + 1, 0);
  std::vector<std::vector<__int128>> S(D + 1, std::vector<__int128>(D + 1, 0));
  S[0][0] = 1;
  for (std::size_t d = 1; d <= D; ++d) {
    for (std::size_t j = 1; j <= d; ++j) S[d][j] = static_cast<__int128>(j) * S[d - 1][j] + S[d - 1][j - 1];
  }
  for (std::size_t d = 1; d <= D; ++d) {
    __int128 fact = 1;
    for (std::size_t j = 1; j <= d; ++j) {
      fact *= static_cast<__int128>(j);
      out[j] += static_cast<__int128>(a[d - 1]) * S[d][j] * fact;
    }
  }
  std::vector<std::int64_t> c;
  for (std::size_t j = 1; j <= D; ++j) c.push_back(checked(out[j]));
  return IntPolynomial(std::move(c));
}

std::int64_t IntPolynomial::operator()(std::int64_t k) const {
  __int128 total = 0;
  __int128 binom = 1;  // C(k, 0)
  for (std::size_t j = 1; j <= c_.size(); ++j) {
    binom = binom * (static_cast<__int128>(k) - static_cast<__int128>(j) + 1) / static_cast<__int128>(j);
    checked(binom);
    total += static_cast<__int128>(c_[j - 1]) * binom;
    checked(total);
  }
  return checked(total);
}

std::string IntPolynomial::describe() const {
  std::string s;
  for (std::size_t j = 0; j < c_.size(); ++j) {
    if (c_[j] == 0) continue;
    if (!s.empty()) s += " + ";
    s += std::to_string(c_[j]) + "*C(k," + std::to_string(j + 1) + ")";
  }
  return s.empty() ? "0" : s;
}

std::optional<PolyPatternWitness> find_poly_pattern(const HittingSet& H, const std::vector<IntPolynomial>& polys,
                                                    std::int64_t K) {
  if (K < 1) throw PreconditionError("find_poly_pattern: K must be >= 1");
  const Bitset& base = H.bits();
  Bitset r;
  std::vector<std::int64_t> vals(polys.size());
  for (std::int64_t k = 1; k <= K; ++k) {
    bool usable = true;
    for (std::size_t j = 0; j < polys.size(); ++j) {
      vals[j] = polys[j](k);
      if (vals[j] < 0) throw PreconditionError("find_poly_pattern: p_j(k) must be >= 0 on the scan range");
      if (vals[j] == 0 || vals[j] >= H.n_max()) usable = false;
    }
    if (!usable) continue;
    r = base;
    bool alive = true;
    for (auto v : vals) {
      r.and_shifted(base, v);
      if (!r.any()) {
        alive = false;
        break;
      }
    }
    if (!alive) continue;
    const std::int64_t a = r.next(1);
    if (a >= 0) return PolyPatternWitness{a, k};
  }
  return std::nullopt;
}

MRSearchResult mr_witness_search(const CoefVec& x, const ScalingSeq& lam, const ShiftOp& T, const CoefVec& y,
                                 double eps, std::int64_t m, std::int64_t tau, std::int64_t N, std::int64_t K,
                                 int workers) {
  if (!(eps > 0.0) || m < 0 || tau < 1 || N < 1 || K < 1) {
    throw PreconditionError("mr_witness_search: need eps > 0, m >= 0, tau >= 1, N >= 1, K >= 1");
  }
  MRSearchResult res;
  res.best_defect = std::numeric_limits<double>::infinity();
  const RatioVerdict rv = ratio_classify(lam, tau, std::max<std::int64_t>(N, 100 * tau));
  if (rv.kind == RatioVerdict::Kind::Bad) {
    throw PreconditionError("mr_witness_search: scaling sequence is bad for tau = " + std::to_string(tau));
  }
  if (rv.kind == RatioVerdict::Kind::Inconclusive) {
    res.warnings.push_back("ratio test inconclusive for tau = " + std::to_string(tau) +
                           " (max defect " + fmt_num(rv.max_defect) + ")");
  }

  const HittingSet H = hitting_set(x, lam, T, Ball(y, eps / 2.0), N, workers);
  res.hits = H.count();

  auto finish = [&](std::int64_t a, std::int64_t k) -> bool {
    MRWitness w;
    w.u = scaled_orbit_point(lam, T, a, x);
    w.ell = m == 0 ? 1 : tau * k;
    w.m = m;
    w.y = y;
    w.eps = eps;
    w.a = a;
    w.k = k;
    w.tau = tau;
    for (std::int64_t j = 0; j <= m; ++j) {
      const CoefVec p = power_apply(T, j * w.ell, w.u);
      if (log_norm(p) > kMaxFloatLogMag) return false;
      const double d = dist(p, y);
      if (!(d < eps)) return false;
      w.distances.push_back(d);
    }
    res.witness = std::move(w);
    return true;
  };

  if (m == 0) {
    const auto mem = H.members();
    if (!mem.empty()) {
      res.longest_ap_order = 0;
      res.longest_ap = APWitness{mem.front(), 1, 0, tau};
      res.starts_examined = 1;
      res.best_defect = 0.0;
      finish(mem.front(), 1);
    }
    return res;
  }

  for (std::int64_t k = 1; k <= K; ++k) {
    const auto members = ap_k_members(H, k, m, tau);
    if (members.empty()) continue;
    if (res.longest_ap_order < m) {
      res.longest_ap_order = m;
      res.longest_ap = APWitness{members.front(), k, m, tau};
    }
    if (members.size() < 2) continue;
    for (const auto a : members) {
      ++res.starts_examined;
      const LogScalar lam_a = eval_log(lam, a);
      double defect = 0.0;
      for (std::int64_t j = 1; j <= m && defect < eps / 2.0; ++j) {
        const std::int64_t nj = a + j * tau * k;
        const LogScalar ratio = lam_a / eval_log(lam, nj);
        if (ratio.log_mag() > 700.0L) {
          defect = std::numeric_limits<double>::infinity();
          break;
        }
        const CoefVec uj = scaled_orbit_point(lam, T, nj, x);
        defect = std::max(defect, std::abs(ratio.to_complex() - 1.0) * norm(uj));
      }
      res.best_defect = std::min(res.best_defect, defect);
      if (defect < eps / 2.0 && finish(a, k)) return res;
    }
  }

  if (res.longest_ap_order < m) {
    for (std::int64_t mm = m - 1; mm >= 1; --mm) {
      if (auto ap = find_ap(H, mm, tau, K, workers)) {
        res.longest_ap_order = mm;
        res.longest_ap = ap;
        break;
      }
    }
  }
  return res;
}

bool verify_mr_witness(const ShiftOp& T, const MRWitness& w) {
  if (w.ell < 1 || w.m < 0) return false;
  for (std::int64_t j = 0; j <= w.m; ++j) {
    const CoefVec p = power_apply(T, j * w.ell, w.u);
    if (log_norm(p) > kMaxFloatLogMag) return false;
    if (!(dist(p, w.y) < w.eps)) return false;
  }
  return true;
}

namespace {

// Returns true when dist(v, x) < eps, refusing to materialize vectors far outside the ball.
bool close_to(const CoefVec& v, const CoefVec& x, double x_norm, double eps) {
  if (log_norm(v) > std::log(x_norm + eps)) return false;
  return dist(v, x) < eps;
}

}  // namespace

std::vector<std::int64_t> recurrence_scan(const ShiftOp& T, const CoefVec& x, double eps, std::int64_t N) {
  std::vector<std::int64_t> out;
  const double xn = norm(x);
  if (x.empty()) {
    if (eps > 0.0) {
      for (std::int64_t n = 1; n <= N; ++n) out.push_back(n);
    }
    return out;
  }
  ProductTable pt(T.side, T.weights);
  if (T.side == Side::Unilateral) {
    pt.ensure(0, x.max_support());
  } else {
    pt.ensure(x.min_support() - N - 1, x.max_support());
  }
  for (std::int64_t n = 1; n <= N; ++n) {
    if (T.side == Side::Unilateral && n >= x.max_support()) {
      // the orbit has died: T^n x = 0 from here on
      if (xn < eps) {
        for (std::int64_t r = n; r <= N; ++r) out.push_back(r);
      }
      break;
    }
    if (close_to(power_apply(T, n, x, pt), x, xn, eps)) out.push_back(n);
  }
  return out;
}

std::vector<std::int64_t> recurrence_scan(const PolySymbol& phi, const CoefVec& x, double eps, std::int64_t N,
                                          std::int64_t trunc) {
  std::vector<std::int64_t> out;
  const double xn = norm(x);
  CoefVec cur = x;
  for (std::int64_t n = 1; n <= N; ++n) {
    cur = apply_adjoint(phi, cur, trunc);
    if (close_to(cur, x, xn, eps)) out.push_back(n);
  }
  return out;
}

void write_csv(std::ostream& os, const HittingSet& H) {
  os << "n\n";
  for (auto n : H.members()) os << n << '\n';
}

void write_csv(std::ostream& os, const DensityStats& d) {
  os << "N,count,density\n";
  for (const auto& s : d.samples) os << s.N << ',' << s.count << ',' << fmt_num(s.density) << '\n';
}

}  // namespace opdyn
