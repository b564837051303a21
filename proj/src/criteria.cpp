#include "opdyn/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opdyn/errors.hpp"

namespace opdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ShiftCheckResult shift_search(const WeightSeq& w, std::int64_t m, std::int64_t q, double eps, std::int64_t n_max) {
  if (!(eps > 0.0 && eps < 1.0)) throw PreconditionError("shift criterion: eps must lie in (0, 1)");
  if (m < 1 || q < 0 || n_max < 1) throw PreconditionError("shift criterion: need m >= 1, q >= 0, N_max >= 1");
  ProductTable pt(Side::Bilateral, w);
  pt.ensure(-q - m * n_max - 1, q + m * n_max);
  const log_real big = -std::log(static_cast<log_real>(eps));  // ln(1/eps)

  ShiftCheckResult res;
  res.n_max = n_max;
  double best = -kInf;
  for (std::int64_t n = 2 * q + 1; n <= n_max; ++n) {
    double fwd_margin = kInf;
    double bwd_margin = kInf;
    for (std::int64_t l = 1; l <= m; ++l) {
      for (std::int64_t j = -q; j <= q; ++j) {
        fwd_margin = std::min(fwd_margin, static_cast<double>(pt.forward(j, l * n) - big));
        bwd_margin = std::min(bwd_margin, static_cast<double>(-big - pt.backward(j, l * n)));
      }
    }
    const double score = std::min(fwd_margin, bwd_margin);
    if (score > best) {
      best = score;
      res.best_n = n;
      res.best_forward_margin = fwd_margin;
      res.best_backward_margin = bwd_margin;
    }
    if (score > 0.0) break;
  }

  std::vector<ProductRecord> recs;
  bool ok = res.best_n > 0;
  for (std::int64_t l = 1; l <= m && res.best_n > 0; ++l) {
    for (std::int64_t j = -q; j <= q; ++j) {
      const ProductRecord r{j, l, static_cast<double>(pt.forward(j, l * res.best_n)),
                            static_cast<double>(pt.backward(j, l * res.best_n))};
      const bool good = r.log_forward > big && r.log_backward < -big;
      if (!good) {
        ok = false;
        res.failing.push_back(r);
      }
      recs.push_back(r);
    }
  }
  if (ok) res.certificate = ShiftCertificate{res.best_n, m, q, eps, std::move(recs)};
  return res;
}

}  // namespace

ShiftCheckResult salas_check(const WeightSeq& w, double eps, std::int64_t q, std::int64_t n_max) {
  return shift_search(w, 1, q, eps, n_max);
}

ShiftCheckResult mr_shift_check(const WeightSeq& w, std::int64_t m, std::int64_t q, double eps, std::int64_t n_max) {
  return shift_search(w, m, q, eps, n_max);
}

bool verify_shift_certificate(const WeightSeq& w, const ShiftCertificate& c, double log_tol) {
  if (c.n <= 2 * c.q || !(c.eps > 0.0 && c.eps < 1.0)) return false;
  if (c.products.size() != static_cast<std::size_t>(c.m * (2 * c.q + 1))) return false;
  ProductTable pt(Side::Bilateral, w);
  pt.ensure(-c.q - c.m * c.n - 1, c.q + c.m * c.n);
  const double big = -std::log(c.eps);
  std::size_t idx = 0;
  for (std::int64_t l = 1; l <= c.m; ++l) {
    for (std::int64_t j = -c.q; j <= c.q; ++j) {
      const ProductRecord& r = c.products[idx++];
      if (r.j != j || r.l != l) return false;
      const double f = static_cast<double>(product_query(pt, ProductQuery::forward(j, l * c.n)).log_mag());
      const double b = static_cast<double>(product_query(pt, ProductQuery::backward(j, l * c.n)).log_mag());
      if (std::abs(f - r.log_forward) > log_tol || std::abs(b - r.log_backward) > log_tol) return false;
      if (!(f > big) || !(b < -big)) return false;
    }
  }
  return true;
}

InvertibleCheckResult mr_invertible_check(const WeightSeq& w, std::int64_t m, std::int64_t n_max, double G) {
  if (!(w.inf_bound() > 0.0)) throw PreconditionError("mr_invertible_check: needs inf w_n > 0");
  if (m < 1 || n_max < 1 || !(G > 0.0)) throw PreconditionError("mr_invertible_check: need m >= 1, N_max >= 1, G > 0");
  ProductTable pt(Side::Bilateral, w);
  pt.ensure(-m * n_max - 1, m * n_max);
  const log_real lg = std::log(static_cast<log_real>(G));
  InvertibleCheckResult res{m, G, n_max, {}};
  for (std::int64_t n = 1; n <= n_max; ++n) {
    bool ok = true;
    for (std::int64_t l = 1; l <= m && ok; ++l) {
      // prod_{i=1..ln} w_i and prod_{i=0..ln} 1/w_{-i}
      ok = pt.forward(0, l * n) > lg && -pt.backward(0, l * n + 1) > lg;
    }
    if (ok) res.ns.push_back(n);
  }
  return res;
}

std::string to_string(SeriesVerdict::Kind k) {
  switch (k) {
    case SeriesVerdict::Kind::ConvergesCertified: return "ConvergesCertified";
    case SeriesVerdict::Kind::DivergesObserved: return "DivergesObserved";
    case SeriesVerdict::Kind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

SeriesVerdict fhc_series_check(const WeightSeq& w, std::int64_t n_max, double cap) {
  if (n_max < 10) throw PreconditionError("fhc_series_check: N_max must be >= 10");
  SeriesVerdict v;
  v.cap = cap;
  n_max = std::min(n_max, w.domain_hi());
  ProductTable pt(Side::Unilateral, w);

  // log terms ln t_n = -2 S(n), kept for the decade tests
  std::vector<log_real> lt(1, 0.0L);
  long double sum = 0.0L;
  long double comp = 0.0L;
  std::int64_t next_grid = 1;
  std::int64_t next_test = 50;

  auto record = [&](std::int64_t n) {
    v.partial_sum = static_cast<double>(sum);
    v.n_used = n;
  };

  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (n > pt.hi()) pt.ensure(0, std::min(n_max, 2 * n));
    lt.push_back(-2.0L * pt.prefix(n));
    const long double t = std::exp(lt.back());
    const long double y = t - comp;
    const long double s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    if (n == next_grid) {
      v.partial_sums.emplace_back(n, static_cast<double>(sum));
      next_grid *= 2;
    }
    if (static_cast<double>(sum) > cap) {
      record(n);
      if (v.partial_sums.empty() || v.partial_sums.back().first != n) v.partial_sums.emplace_back(n, static_cast<double>(sum));
      v.kind = SeriesVerdict::Kind::DivergesObserved;
      return v;
    }
    if (n != next_test && n != n_max) continue;
    next_test *= 2;

    // last decade [n/10, n]
    const std::int64_t lo = std::max<std::int64_t>(1, n / 10);
    log_real max_log_ratio = -std::numeric_limits<log_real>::infinity();
    long double min_exponent = std::numeric_limits<long double>::infinity();
    for (std::int64_t i = lo; i < n; ++i) {
      const log_real d = lt[static_cast<std::size_t>(i + 1)] - lt[static_cast<std::size_t>(i)];
      max_log_ratio = std::max(max_log_ratio, d);
      min_exponent = std::min(min_exponent, -d / std::log1p(1.0L / static_cast<long double>(i)));
    }
    const long double tn = std::exp(lt.back());
    long double tail = std::numeric_limits<long double>::infinity();
    const long double rho = std::exp(max_log_ratio);
    if (rho <= kGeometricRatioMax) {
      tail = tn * rho / (1.0L - rho);
      v.method = "geometric";
      v.rate = static_cast<double>(rho);
    } else if (min_exponent >= kPowerExponentMin) {
      // t_i <= t_n (n/i)^p for i > n, summed against the integral
      tail = tn * static_cast<long double>(n) / (min_exponent - 1.0L);
      v.method = "power";
      v.rate = static_cast<double>(min_exponent);
    }
    if (std::isfinite(static_cast<double>(tail)) && (tail <= 1e-15L * sum || n == n_max)) {
      record(n);
      v.tail_bound = static_cast<double>(tail);
      if (v.partial_sums.empty() || v.partial_sums.back().first != n) v.partial_sums.emplace_back(n, static_cast<double>(sum));
      v.kind = SeriesVerdict::Kind::ConvergesCertified;
      return v;
    }
    v.method.clear();
    v.rate = 0.0;
  }
  record(n_max);
  if (v.partial_sums.empty() || v.partial_sums.back().first != n_max) v.partial_sums.emplace_back(n_max, static_cast<double>(sum));
  v.kind = SeriesVerdict::Kind::Inconclusive;
  return v;
}

namespace {

void fold_ratio(DecayReport& r, log_real log_lhs, log_real log_rhs, std::int64_t n) {
  if (std::isinf(static_cast<double>(log_lhs))) return;  // vanished orbit
  const double ratio = static_cast<double>(std::exp(log_lhs - log_rhs));
  if (ratio > r.max_ratio) {
    r.max_ratio = ratio;
    r.worst_n = n;
  }
  r.min_ratio = std::min(r.min_ratio, ratio);
}

}  // namespace

DecayReport norm_decay_check(const ShiftOp& T, const CoefVec& x, std::int64_t N) {
  const double rho = T.norm_bound();
  if (!(rho < 1.0)) throw PreconditionError("norm_decay_check: norm bound " + std::to_string(rho) + " is not < 1");
  if (N < 1) throw PreconditionError("norm_decay_check: N must be >= 1");
  DecayReport r;
  r.rate = rho;
  r.n_to = N;
  r.min_ratio = kInf;
  const log_real lx = log_norm(x);
  const log_real lr = std::log(static_cast<log_real>(rho));
  ProductTable pt(T.side, T.weights);
  if (!x.empty()) ensure_for_power(pt, T, N, x);
  r.final_log_norm = static_cast<double>(lx);
  for (std::int64_t n = 1; n <= N && !x.empty(); ++n) {
    const log_real ln = log_norm(power_apply(T, n, x, pt));
    fold_ratio(r, ln, lx + lr * n, n);
    r.final_log_norm = static_cast<double>(ln);
  }
  if (x.empty()) r.final_log_norm = -kInf;
  if (r.min_ratio == kInf) r.min_ratio = 0.0;
  r.bound_holds = r.max_ratio <= 1.0 + 1e-9;
  r.conclusion = r.bound_holds ? "NotRecurrent-for-x" : "bound violated";
  return r;
}

DecayReport superratio_decay_check(const ScalingSeq& lam, const ShiftOp& T, const CoefVec& x, std::int64_t N) {
  if (N < 2) throw PreconditionError("superratio_decay_check: N must be >= 2");
  const RatioVerdict rv = ratio_classify(lam, 1, std::max<std::int64_t>(N, kDefaultRatioHorizon));
  if (rv.kind != RatioVerdict::Kind::Bad || !std::isinf(rv.limit)) {
    throw PreconditionError("superratio_decay_check: ratios |lambda_n|/|lambda_{n+1}| do not tend to infinity");
  }
  const double tn = T.norm_bound();
  const log_real l1t = std::log1p(static_cast<log_real>(tn));

  // smallest n_o with every ratio on [n_o, N] above 1 + ||T||
  const std::int64_t n_start = lam.min_index();
  std::int64_t n_o = N + 1;
  LogScalar next = eval_log(lam, N + 1);
  for (std::int64_t n = N; n >= n_start; --n) {
    const LogScalar cur = eval_log(lam, n);
    if (!(cur.log_mag() - next.log_mag() > l1t)) break;
    n_o = n;
    next = cur;
  }
  if (n_o > N / 2) throw PreconditionError("superratio_decay_check: no n_o <= N/2 found");

  DecayReport r;
  r.n_o = n_o;
  r.n_from = n_o;
  r.n_to = N;
  r.rate = tn / (1.0 + tn);
  r.min_ratio = kInf;
  const log_real lx = log_norm(x);
  const log_real lt = std::log(static_cast<log_real>(tn));
  const log_real base = eval_log(lam, n_o).log_mag() + l1t * n_o + lx;
  ProductTable pt(T.side, T.weights);
  if (!x.empty()) ensure_for_power(pt, T, N, x);
  r.final_log_norm = -kInf;
  for (std::int64_t n = n_o; n <= N && !x.empty(); ++n) {
    const log_real ln = eval_log(lam, n).log_mag() + log_norm(power_apply(T, n, x, pt));
    fold_ratio(r, ln, base + (lt - l1t) * n, n);
    r.final_log_norm = static_cast<double>(ln);
  }
  if (r.min_ratio == kInf) r.min_ratio = 0.0;
  r.bound_holds = r.max_ratio <= 1.0 + 1e-9;
  r.conclusion = r.bound_holds ? "norms tend to 0" : "bound violated";
  return r;
}

}  // namespace opdyn
