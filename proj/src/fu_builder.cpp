#include "opdyn/fu_builder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "opdyn/errors.hpp"
#include "opdyn/format.hpp"
#include "opdyn/parallel.hpp"

namespace opdyn {

std::int64_t BlockPlan::q(std::size_t i) const { return targets.at(i).y.empty() ? 0 : targets[i].y.max_support(); }

std::int64_t BlockPlan::max_q() const {
  std::int64_t m = 0;
  for (std::size_t i = 0; i < targets.size(); ++i) m = std::max(m, q(i));
  return m;
}

bool BlockPlan::in_class(std::size_t i, std::int64_t n) const {
  const std::int64_t P = period();
  if (P == 0 || n < n_min) return false;
  return n % P == (static_cast<std::int64_t>(i + 1) * g) % P;
}

std::vector<std::int64_t> BlockPlan::class_members(std::size_t i, std::int64_t upto) const {
  std::vector<std::int64_t> out;
  const std::int64_t P = period();
  if (P == 0) return out;
  std::int64_t n = static_cast<std::int64_t>(i + 1) * g;
  while (n < n_min) n += P;
  for (; n <= upto; n += P) out.push_back(n);
  return out;
}

BlockPlan make_plan(std::vector<FUTarget> targets, std::optional<std::int64_t> g) {
  BlockPlan plan;
  plan.targets = std::move(targets);
  for (const auto& t : plan.targets) {
    if (t.y.side() != Side::Unilateral) throw PreconditionError("fhbuilder: targets must live in l2(N)");
    if (!(t.eps > 0.0)) throw PreconditionError("fhbuilder: target radii must be > 0");
  }
  const std::int64_t mq = plan.max_q();
  plan.g = g.value_or(2 * mq + 8);
  if (plan.g <= mq) {
    throw PreconditionError("fhbuilder: gap g = " + std::to_string(plan.g) + " must exceed max support " +
                            std::to_string(mq));
  }
  plan.n_min = plan.g;
  return plan;
}

bool VerificationReport::clean() const {
  return std::all_of(per_target.begin(), per_target.end(), [](const TargetReport& t) { return t.misses == 0; });
}

FUVector build_fu(const ScalingSeq& lam, const ShiftOp& T, std::vector<FUTarget> targets, std::int64_t N,
                  std::optional<std::int64_t> g, int workers) {
  if (T.side != Side::Unilateral) throw PreconditionError("fhbuilder: needs a unilateral backward shift");
  if (N < 1) throw PreconditionError("fhbuilder: N must be >= 1");
  FUVector v;
  v.plan_ = make_plan(std::move(targets), g);
  v.horizon_ = N;
  v.lam_ = lam;
  v.op_ = T;
  v.x_ = CoefVec(Side::Unilateral);
  v.report_.horizon = N;
  const BlockPlan& plan = v.plan_;
  if (plan.targets.empty()) return v;

  ProductTable pt(Side::Unilateral, T.weights);
  pt.ensure(0, N + plan.max_q());

  // blocks in increasing n; gaps g > max q keep indices increasing
  std::vector<log_real> block_peak;
  for (std::int64_t n = plan.g; n <= N; n += plan.g) {
    const auto i = static_cast<std::size_t>((n / plan.g - 1) % plan.r());
    const LogScalar lam_n = eval_log(lam, n);
    if (lam_n.is_zero() || T.premult.is_zero()) throw DomainError("fhbuilder: lambda_n T^n vanishes at n = " + std::to_string(n));
    const LogScalar scale = lam_n * T.premult.pow(n);
    log_real peak = -std::numeric_limits<log_real>::infinity();
    for (const auto& [j, c] : plan.targets[i].y.entries()) {
      const LogScalar val = c / (scale * LogScalar::from_log(pt.forward(j, n)));
      peak = std::max(peak, val.log_mag());
      v.x_.push_back(j + n, val);
    }
    if (!plan.targets[i].y.empty()) block_peak.push_back(peak);
  }

  if (block_peak.size() >= 2) {
    const std::size_t half = block_peak.size() / 2;
    const log_real early = *std::max_element(block_peak.begin(), block_peak.begin() + static_cast<std::ptrdiff_t>(half));
    const log_real late = *std::max_element(block_peak.begin() + static_cast<std::ptrdiff_t>(half), block_peak.end());
    if (late >= early) {
      throw InfeasibleDecay("fhbuilder: placed coefficients do not decay (ln peak " + fmt_num(static_cast<double>(early)) +
                            " early vs " + fmt_num(static_cast<double>(late)) + " late)");
    }
  }

  for (std::size_t i = 0; i < plan.targets.size(); ++i) {
    const auto& tgt = plan.targets[i];
    const auto planned = plan.class_members(i, N - plan.q(i));
    const OrbitProbe probe(v.x_, lam, T, Ball(tgt.y, tgt.eps), N);
    const int w = resolve_workers(workers);
    std::vector<TargetReport> parts(static_cast<std::size_t>(w));
    for_chunks(0, static_cast<std::int64_t>(planned.size()), w, [&](int c, std::int64_t lo, std::int64_t hi) {
      auto& rep = parts[static_cast<std::size_t>(c)];
      for (std::int64_t t = lo; t < hi; ++t) {
        const std::int64_t n = planned[static_cast<std::size_t>(t)];
        const double d = probe.distance_upper(n);
        rep.worst_distance = std::max(rep.worst_distance, d);
        ++rep.planned;
        if (d < tgt.eps || probe.hit(n)) {
          ++rep.hits;
        } else {
          ++rep.misses;
        }
      }
    });
    TargetReport rep;
    for (const auto& p : parts) {
      rep.planned += p.planned;
      rep.hits += p.hits;
      rep.misses += p.misses;
      rep.worst_distance = std::max(rep.worst_distance, p.worst_distance);
    }
    v.report_.per_target.push_back(rep);
  }
  if (!v.report_.clean()) {
    std::string msg = "fhbuilder: planned visits missed their balls (";
    for (std::size_t i = 0; i < v.report_.per_target.size(); ++i) {
      if (i) msg += ", ";
      msg += "target " + std::to_string(i) + ": " + std::to_string(v.report_.per_target[i].misses) + " misses";
    }
    throw VerificationFailed(msg + "); try a larger gap than g = " + std::to_string(plan.g));
  }
  return v;
}

std::int64_t fu_window_start(std::int64_t N) { return std::max(default_window_start(N), N / 100); }

std::vector<TargetVerification> verify_fu(const FUVector& v, const std::vector<double>& eps_overrides, int workers) {
  std::vector<TargetVerification> out;
  const BlockPlan& plan = v.plan();
  const std::int64_t N = v.horizon();
  for (std::size_t i = 0; i < plan.targets.size(); ++i) {
    const double eps = i < eps_overrides.size() ? eps_overrides[i] : plan.targets[i].eps;
    TargetVerification tv;
    tv.hits = hitting_set(v.x(), v.lam(), v.op(), Ball(plan.targets[i].y, eps), N, workers);
    for (auto n : plan.class_members(i, N - plan.q(i))) {
      if (!tv.hits.contains(n)) ++tv.missing;
    }
    if (tv.missing > 0 && eps_overrides.empty()) {
      throw std::logic_error("verify_fu: recomputed hitting set misses " + std::to_string(tv.missing) +
                             " planned indices of target " + std::to_string(i));
    }
    tv.density = density_stats(tv.hits, fu_window_start(N));
    out.push_back(std::move(tv));
  }
  return out;
}

}  // namespace opdyn
