#include "opdyn/coef_vec.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <ostream>

#include "opdyn/errors.hpp"
#include "opdyn/format.hpp"

namespace opdyn {

std::string to_string(Side s) {
  switch (s) {
    case Side::Unilateral: return "unilateral";
    case Side::Bilateral: return "bilateral";
    case Side::HardyCoef: return "hardy";
  }
  return "?";
}

std::int64_t min_index(Side s) {
  switch (s) {
    case Side::Unilateral: return 1;
    case Side::HardyCoef: return 0;
    case Side::Bilateral: return std::numeric_limits<std::int64_t>::min();
  }
  return 0;
}

void CoefVec::check_index(std::int64_t index) const {
  if (index < min_index(side_)) {
    throw DomainError("index " + std::to_string(index) + " is outside the " + to_string(side_) +
                      " index set");
  }
}

CoefVec CoefVec::basis(Side side, std::int64_t k) {
  CoefVec v(side);
  v.set(k, LogScalar::one());
  return v;
}

CoefVec CoefVec::from_entries(Side side, std::vector<Entry> entries) {
  std::stable_sort(entries.begin(), entries.end(),
                   [](const Entry& a, const Entry& b) { return a.first < b.first; });
  CoefVec v(side);
  for (std::size_t i = 0; i < entries.size();) {
    LogScalar acc = entries[i].second;
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].first == entries[i].first) {
      acc = acc + entries[j].second;
      ++j;
    }
    v.check_index(entries[i].first);
    if (!acc.is_zero()) v.entries_.emplace_back(entries[i].first, acc);
    i = j;
  }
  return v;
}

CoefVec CoefVec::from_complex(Side side,
                              const std::vector<std::pair<std::int64_t, std::complex<double>>>& entries) {
  std::vector<Entry> e;
  e.reserve(entries.size());
  for (const auto& [i, z] : entries) e.emplace_back(i, LogScalar::from_complex(z));
  return from_entries(side, std::move(e));
}

LogScalar CoefVec::at(std::int64_t index) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, std::int64_t i) { return e.first < i; });
  if (it == entries_.end() || it->first != index) return LogScalar::zero();
  return it->second;
}

void CoefVec::set(std::int64_t index, const LogScalar& value) {
  check_index(index);
  auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                             [](const Entry& e, std::int64_t i) { return e.first < i; });
  const bool present = it != entries_.end() && it->first == index;
  if (value.is_zero()) {
    if (present) entries_.erase(it);
  } else if (present) {
    it->second = value;
  } else {
    entries_.insert(it, {index, value});
  }
}

void CoefVec::push_back(std::int64_t index, const LogScalar& value) {
  check_index(index);
  if (!entries_.empty() && entries_.back().first >= index) {
    throw std::invalid_argument("CoefVec::push_back: indices must increase");
  }
  if (!value.is_zero()) entries_.emplace_back(index, value);
}

CoefVec CoefVec::scaled(const LogScalar& s) const {
  CoefVec out(side_);
  if (s.is_zero()) return out;
  out.entries_.reserve(entries_.size());
  for (const auto& [i, v] : entries_) out.entries_.emplace_back(i, v * s);
  return out;
}

Ball::Ball(CoefVec center, double radius) : center_(std::move(center)), radius_(radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("Ball radius must be > 0");
}

namespace {

void require_float_range(const LogScalar& v) {
  if (!v.is_zero() && v.log_mag() > kMaxFloatLogMag) {
    throw OverflowError("coefficient magnitude e^" + fmt_num(static_cast<double>(v.log_mag())) +
                        " is outside the verification float range");
  }
}

// Neumaier-compensated sum of squares, largest first.
double sum_squares(std::vector<double>& mags) {
  std::sort(mags.begin(), mags.end(), std::greater<>());
  long double sum = 0.0L;
  long double comp = 0.0L;
  for (double m : mags) {
    const long double term = static_cast<long double>(m) * m;
    const long double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
  }
  return static_cast<double>(sum + comp);
}

}  // namespace

double norm(const CoefVec& x) {
  std::vector<double> mags;
  mags.reserve(x.size());
  for (const auto& [i, v] : x.entries()) {
    require_float_range(v);
    mags.push_back(v.magnitude());
  }
  return std::sqrt(sum_squares(mags));
}

log_real log_norm(const CoefVec& x) {
  log_real acc = -std::numeric_limits<log_real>::infinity();
  for (const auto& [i, v] : x.entries()) acc = log_sum_exp(acc, 2.0L * v.log_mag());
  return acc / 2.0L;
}

double dist(const CoefVec& x, const CoefVec& y) {
  if (x.side() != y.side()) throw SideMismatch("dist: vectors live on different index sets");
  auto xs = x.entries();
  auto ys = y.entries();
  std::vector<double> mags;
  mags.reserve(xs.size() + ys.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < xs.size() || j < ys.size()) {
    if (j == ys.size() || (i < xs.size() && xs[i].first < ys[j].first)) {
      require_float_range(xs[i].second);
      mags.push_back(xs[i].second.magnitude());
      ++i;
    } else if (i == xs.size() || ys[j].first < xs[i].first) {
      require_float_range(ys[j].second);
      mags.push_back(ys[j].second.magnitude());
      ++j;
    } else {
      require_float_range(xs[i].second);
      require_float_range(ys[j].second);
      mags.push_back(std::abs(xs[i].second.to_complex() - ys[j].second.to_complex()));
      ++i;
      ++j;
    }
  }
  return std::sqrt(sum_squares(mags));
}

bool in_ball(const CoefVec& x, const Ball& b) { return dist(x, b.center()) < b.radius(); }

CoefVec axpy(const LogScalar& a, const CoefVec& x, const CoefVec& y) {
  if (x.side() != y.side()) throw SideMismatch("axpy: vectors live on different index sets");
  std::vector<CoefVec::Entry> out;
  auto xs = x.entries();
  auto ys = y.entries();
  out.reserve(xs.size() + ys.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < xs.size() || j < ys.size()) {
    if (j == ys.size() || (i < xs.size() && xs[i].first < ys[j].first)) {
      LogScalar v = a * xs[i].second;
      if (!v.is_zero()) out.emplace_back(xs[i].first, v);
      ++i;
    } else if (i == xs.size() || ys[j].first < xs[i].first) {
      out.push_back(ys[j]);
      ++j;
    } else {
      const LogScalar ax = a * xs[i].second;
      const LogScalar sum = ax + ys[j].second;
      const log_real scale =
          ax.is_zero() ? ys[j].second.log_mag() : std::max(ax.log_mag(), ys[j].second.log_mag());
      // relative cancellation threshold ln(1e-15)
      if (!sum.is_zero() && sum.log_mag() - scale > -34.538776394910684L) {
        out.emplace_back(xs[i].first, sum);
      }
      ++i;
      ++j;
    }
  }
  CoefVec v(x.side());
  for (const auto& [idx, val] : out) v.push_back(idx, val);
  return v;
}

namespace {

struct LiteralParser {
  const std::string& s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("vector literal '" + s + "': " + what + " at offset " +
                                std::to_string(pos));
  }
  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  double number() {
    skip_ws();
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s.substr(pos), &used);
    } catch (const std::exception&) {
      fail("expected a number");
    }
    pos += used;
    return v;
  }
  std::complex<double> coefficient() {
    if (eat('(')) {
      const double re = number();
      if (!eat(',')) fail("expected ','");
      const double im = number();
      if (!eat(')')) fail("expected ')'");
      return {re, im};
    }
    return {number(), 0.0};
  }
  std::pair<std::int64_t, std::complex<double>> term() {
    skip_ws();
    std::complex<double> c{1.0, 0.0};
    if (pos < s.size() && s[pos] != 'e') {
      c = coefficient();
      if (!eat('*')) fail("expected '*'");
    }
    if (!eat('e')) fail("expected 'e(k)'");
    if (!eat('(')) fail("expected '('");
    skip_ws();
    std::size_t used = 0;
    long long k = 0;
    try {
      k = std::stoll(s.substr(pos), &used);
    } catch (const std::exception&) {
      fail("expected an integer index");
    }
    pos += used;
    if (!eat(')')) fail("expected ')'");
    return {k, c};
  }
};

}  // namespace

CoefVec parse_vector_literal(Side side, const std::string& text) {
  LiteralParser p{text};
  std::vector<std::pair<std::int64_t, std::complex<double>>> terms;
  p.skip_ws();
  if (p.pos == text.size() || text.substr(p.pos) == "0") return CoefVec(side);
  terms.push_back(p.term());
  for (;;) {
    if (p.eat('+')) {
      terms.push_back(p.term());
    } else if (p.eat('-')) {
      auto t = p.term();
      terms.emplace_back(t.first, -t.second);
    } else {
      break;
    }
  }
  p.skip_ws();
  if (p.pos != text.size()) p.fail("trailing characters");
  return CoefVec::from_complex(side, terms);
}

std::string to_literal(const CoefVec& x) {
  if (x.empty()) return "0";
  std::string s;
  for (const auto& [i, v] : x.entries()) {
    if (!s.empty()) s += " + ";
    const auto z = v.to_complex();
    if (z != std::complex<double>{1.0, 0.0}) {
      s += (z.imag() == 0.0 ? fmt_num(z.real()) : "(" + fmt_num(z.real()) + "," + fmt_num(z.imag()) + ")");
      s += "*";
    }
    s += "e(" + std::to_string(i) + ")";
  }
  return s;
}

std::string summarize(const CoefVec& x) {
  bool small = x.size() <= 8;
  for (const auto& [i, v] : x.entries()) small = small && std::abs(v.log_mag()) < 700.0L;
  if (small) return to_literal(x);
  return "sparse(nnz=" + std::to_string(x.size()) + ", support=" + std::to_string(x.min_support()) + ".." +
         std::to_string(x.max_support()) + ")";
}

void write_csv(std::ostream& os, const CoefVec& x) {
  os << "index,re,im\n";
  for (const auto& [i, v] : x.entries()) {
    const auto z = v.to_complex();
    os << i << ',' << fmt_num(z.real()) << ',' << fmt_num(z.imag()) << '\n';
  }
}

}  // namespace opdyn
