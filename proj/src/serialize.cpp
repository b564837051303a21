#include "opdyn/serialize.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "opdyn/format.hpp"

namespace opdyn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ParseError("expected a number, got '" + text + "'");
  }
  if (used != t.size()) throw ParseError("expected a number, got '" + text + "'");
  return v;
}

std::int64_t parse_int(const std::string& text) {
  const std::string t = trim(text);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(t, &used);
  } catch (const std::exception&) {
    throw ParseError("expected an integer, got '" + text + "'");
  }
  if (used != t.size()) throw ParseError("expected an integer, got '" + text + "'");
  return v;
}

// Splits on commas outside parentheses.
std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
  return out;
}

std::vector<std::complex<double>> parse_complex_list(const std::string& text) {
  std::vector<std::complex<double>> out;
  for (const auto& item : split_list(text)) out.push_back(parse_complex(item));
  return out;
}

struct Spec {
  std::string tag;
  std::map<std::string, std::string> kv;

  const std::string* find(const std::string& key) const {
    auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  }
  const std::string& need(const std::string& key) const {
    if (auto* v = find(key)) return *v;
    throw ParseError("'" + tag + "' needs " + key + "=...");
  }
  void allow_only(std::initializer_list<const char*> keys) const {
    for (const auto& [k, v] : kv) {
      bool ok = false;
      for (const char* a : keys) ok = ok || k == a;
      if (!ok) throw ParseError("'" + tag + "' does not take " + k + "=");
    }
  }
};

Spec split_spec(const std::string& text) {
  std::istringstream is(text);
  Spec s;
  if (!(is >> s.tag)) throw ParseError("empty spec");
  std::string tok;
  while (is >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw ParseError("expected key=value, got '" + tok + "'");
    s.kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return s;
}

std::string list_text(const std::vector<std::complex<double>>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) s += ",";
    s += fmt_cplx(c[i]);
  }
  return s;
}

}  // namespace

std::complex<double> parse_complex(const std::string& text) {
  const std::string t = trim(text);
  if (!t.empty() && t.front() == '(') {
    if (t.back() != ')') throw ParseError("unbalanced complex literal '" + text + "'");
    const auto parts = split_list(t.substr(1, t.size() - 2));
    if (parts.size() != 2) throw ParseError("complex literal needs (re,im): '" + text + "'");
    return {parse_double(parts[0]), parse_double(parts[1])};
  }
  return {parse_double(t), 0.0};
}

Side parse_side(const std::string& text) {
  const std::string t = trim(text);
  if (t == "unilateral") return Side::Unilateral;
  if (t == "bilateral") return Side::Bilateral;
  if (t == "hardy") return Side::HardyCoef;
  throw ParseError("unknown side '" + text + "' (unilateral, bilateral, hardy)");
}

ScalingSeq parse_sequence(const std::string& text) {
  const Spec s = split_spec(text);
  ScalingSeq out;
  const std::string& t = s.tag;
  if (t == "constant") {
    out.family = family::Constant{s.find("c") ? parse_complex(*s.find("c")) : cplx{1.0, 0.0}};
    s.allow_only({"c", "reciprocal", "rotate"});
  } else if (t == "log" || t == "log_pow") {
    out.family = family::LogPow{s.find("k") ? parse_double(*s.find("k")) : 1.0};
    s.allow_only({"k", "reciprocal", "rotate"});
  } else if (t == "loglog") {
    out.family = family::LogLog{};
    s.allow_only({"reciprocal", "rotate"});
  } else if (t == "rational") {
    out.family = family::RationalPoly{parse_complex_list(s.need("P")), parse_complex_list(s.need("Q"))};
    s.allow_only({"P", "Q", "reciprocal", "rotate"});
  } else if (t == "exp_pow") {
    out.family = family::ExpPow{parse_double(s.need("a"))};
    s.allow_only({"a", "reciprocal", "rotate"});
  } else if (t == "exp_over_log") {
    out.family = family::ExpOverLog{};
    s.allow_only({"reciprocal", "rotate"});
  } else if (t == "exp_over_loglog") {
    out.family = family::ExpOverLogLog{};
    s.allow_only({"reciprocal", "rotate"});
  } else if (t == "factorial") {
    out.family = family::Factorial{};
    s.allow_only({"reciprocal", "rotate"});
  } else if (t == "geom_even_odd") {
    out.family = family::GeomEvenOdd{};
    s.allow_only({"reciprocal", "rotate"});
  } else if (t == "dyadic_tower") {
    out.family = family::DyadicTower{};
    s.allow_only({"reciprocal", "rotate"});
  } else if (t == "power_of_w") {
    out.family = family::PowerOfW{parse_complex(s.need("w"))};
    s.allow_only({"w", "reciprocal", "rotate"});
  } else if (t == "geom_inverse") {
    out.family = family::GeomInverse{parse_complex(s.need("a"))};
    s.allow_only({"a", "reciprocal", "rotate"});
  } else if (t == "table") {
    family::Table tab;
    for (const auto& z : parse_complex_list(s.need("values"))) tab.values.push_back(LogScalar::from_complex(z));
    if (tab.values.empty()) throw ParseError("table needs at least one value");
    out.family = std::move(tab);
    s.allow_only({"values", "reciprocal", "rotate"});
  } else {
    throw ParseError("unknown sequence family '" + t + "'");
  }
  if (auto* r = s.find("reciprocal")) out.reciprocal = parse_int(*r) != 0;
  if (auto* r = s.find("rotate")) {
    // "<slope>n+<offset>" or a single constant angle
    const auto npos = r->find('n');
    if (npos == std::string::npos) {
      out = rotate_seq(out, PhaseGen::constant(parse_double(*r)));
    } else {
      const double slope = parse_double(r->substr(0, npos));
      const std::string rest = r->substr(npos + 1);
      const double offset = rest.empty() ? 0.0 : parse_double(rest);
      out = rotate_seq(out, PhaseGen::linear(slope, offset));
    }
  }
  return out;
}

std::string sequence_spec(const ScalingSeq& s) {
  const std::string d = s.describe();
  const auto* tab = std::get_if<family::Table>(&s.family);
  if (!tab) return d;
  std::vector<std::complex<double>> vals;
  for (const auto& v : tab->values) vals.push_back(v.to_complex());
  // describe() gives "table len=N" followed by any reciprocal/rotate options
  const auto opts = d.find(' ', std::string("table ").size());
  return "table values=" + list_text(vals) + (opts == std::string::npos ? "" : d.substr(opts));
}

WeightSeq parse_weights(const std::string& text) {
  const Spec s = split_spec(text);
  const std::string& t = s.tag;
  try {
    if (t == "constant") {
      s.allow_only({"c"});
      return WeightSeq(weights::ConstantW{s.find("c") ? parse_double(*s.find("c")) : 1.0});
    }
    if (t == "sqrt_ratio") {
      s.allow_only({});
      return WeightSeq(weights::SqrtRatio{});
    }
    if (t == "step_bilateral" || t == "step") {
      s.allow_only({});
      return WeightSeq(weights::StepBilateral{});
    }
    if (t == "inverse_step_bilateral" || t == "inverse_step") {
      s.allow_only({});
      return WeightSeq(weights::InverseStepBilateral{});
    }
    if (t == "table") {
      s.allow_only({"first", "values"});
      weights::TableW w;
      w.first = s.find("first") ? parse_int(*s.find("first")) : 1;
      for (const auto& item : split_list(s.need("values"))) w.values.push_back(parse_double(item));
      return WeightSeq(std::move(w));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  throw ParseError("unknown weight family '" + t + "'");
}

std::string weights_spec(const WeightSeq& w) {
  if (const auto* tab = std::get_if<weights::TableW>(&w.family)) {
    std::string s = "table first=" + std::to_string(tab->first) + " values=";
    for (std::size_t i = 0; i < tab->values.size(); ++i) {
      if (i) s += ",";
      s += fmt_num(tab->values[i]);
    }
    return s;
  }
  return w.describe();
}

PolySymbol parse_symbol(const std::string& text) {
  auto c = parse_complex_list(text);
  if (c.empty()) throw ParseError("symbol needs at least one coefficient");
  return PolySymbol(std::move(c));
}

std::string symbol_spec(const PolySymbol& phi) { return list_text(phi.coeffs()); }

json num(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    return parse_double(s);
  }
  throw ParseError("expected a number in JSON, got " + j.dump());
}

json to_json(const LogScalar& s) {
  if (s.is_zero()) return "zero";
  return json::array({num(static_cast<double>(s.log_mag())), num(s.phase())});
}

LogScalar log_scalar_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "zero") return LogScalar::zero();
  if (!j.is_array() || j.size() != 2) throw ParseError("log scalar must be [log_mag, phase]");
  return LogScalar::from_log(get_num(j[0]), get_num(j[1]));
}

json to_json(const CoefVec& x) {
  json entries = json::array();
  for (const auto& [i, v] : x.entries()) {
    entries.push_back(json::array({i, num(static_cast<double>(v.log_mag())), num(v.phase())}));
  }
  return {{"side", to_string(x.side())}, {"entries", entries}};
}

CoefVec coef_vec_from_json(const json& j) {
  const Side side = parse_side(j.at("side").get<std::string>());
  std::vector<CoefVec::Entry> entries;
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 3) throw ParseError("vector entry must be [index, log_mag, phase]");
    entries.emplace_back(e[0].get<std::int64_t>(), LogScalar::from_log(get_num(e[1]), get_num(e[2])));
  }
  return CoefVec::from_entries(side, std::move(entries));
}

json to_json(const ShiftOp& T) {
  return {{"side", to_string(T.side)}, {"weights", weights_spec(T.weights)}, {"premult", to_json(T.premult)}};
}

ShiftOp shift_op_from_json(const json& j) {
  return ShiftOp(parse_side(j.at("side").get<std::string>()), parse_weights(j.at("weights").get<std::string>()),
                 log_scalar_from_json(j.at("premult")));
}

json to_json(const RatioVerdict& v) {
  json ev = json::array();
  for (double r : v.evidence) ev.push_back(num(r));
  return {{"verdict", to_string(v.kind)},
          {"limit", num(v.limit)},
          {"tau", v.tau},
          {"horizon", v.horizon},
          {"window_begin", v.window_begin},
          {"min_ratio", num(v.min_ratio)},
          {"max_ratio", num(v.max_ratio)},
          {"max_defect", num(v.max_defect)},
          {"evidence", ev}};
}

json to_json(const DensityStats& d, bool with_samples) {
  json j = {{"window_begin", d.window_begin},
            {"n_max", d.n_max},
            {"lower_est", num(d.lower_est)},
            {"upper_est", num(d.upper_est)},
            {"kind", "windowed estimate"}};
  if (with_samples) {
    json rows = json::array();
    for (const auto& s : d.samples) rows.push_back(json::array({s.N, s.count, num(s.density)}));
    j["samples"] = rows;
  }
  return j;
}

json to_json(const APWitness& w) { return {{"a", w.a}, {"k", w.k}, {"m", w.m}, {"tau", w.tau}}; }

APWitness ap_witness_from_json(const json& j) {
  return {j.at("a").get<std::int64_t>(), j.at("k").get<std::int64_t>(), j.at("m").get<std::int64_t>(),
          j.at("tau").get<std::int64_t>()};
}

json to_json(const MRWitness& w) {
  json d = json::array();
  for (double x : w.distances) d.push_back(num(x));
  return {{"u", to_json(w.u)}, {"ell", w.ell}, {"m", w.m},   {"y", to_json(w.y)}, {"eps", num(w.eps)},
          {"a", w.a},          {"k", w.k},     {"tau", w.tau}, {"distances", d}};
}

MRWitness mr_witness_from_json(const json& j) {
  MRWitness w;
  w.u = coef_vec_from_json(j.at("u"));
  w.ell = j.at("ell").get<std::int64_t>();
  w.m = j.at("m").get<std::int64_t>();
  w.y = coef_vec_from_json(j.at("y"));
  w.eps = get_num(j.at("eps"));
  w.a = j.at("a").get<std::int64_t>();
  w.k = j.at("k").get<std::int64_t>();
  w.tau = j.at("tau").get<std::int64_t>();
  for (const auto& d : j.at("distances")) w.distances.push_back(get_num(d));
  return w;
}

json to_json(const MRSearchResult& r) {
  json j = {{"found", r.witness.has_value()},
            {"longest_ap_order", r.longest_ap_order},
            {"best_defect", num(r.best_defect)},
            {"starts_examined", r.starts_examined},
            {"hits", r.hits},
            {"warnings", r.warnings}};
  if (r.longest_ap) j["longest_ap"] = to_json(*r.longest_ap);
  if (r.witness) j["witness"] = to_json(*r.witness);
  return j;
}

namespace {

json records_json(const std::vector<ProductRecord>& recs) {
  json arr = json::array();
  for (const auto& r : recs) arr.push_back(json::array({r.j, r.l, num(r.log_forward), num(r.log_backward)}));
  return arr;
}

}  // namespace

json to_json(const ShiftCertificate& c) {
  return {{"n", c.n}, {"m", c.m}, {"q", c.q}, {"eps", num(c.eps)}, {"products", records_json(c.products)}};
}

ShiftCertificate shift_certificate_from_json(const json& j) {
  ShiftCertificate c;
  c.n = j.at("n").get<std::int64_t>();
  c.m = j.at("m").get<std::int64_t>();
  c.q = j.at("q").get<std::int64_t>();
  c.eps = get_num(j.at("eps"));
  for (const auto& r : j.at("products")) {
    c.products.push_back({r.at(0).get<std::int64_t>(), r.at(1).get<std::int64_t>(), get_num(r.at(2)), get_num(r.at(3))});
  }
  return c;
}

json to_json(const ShiftCheckResult& r) {
  json j = {{"found", r.certificate.has_value()},
            {"n_max", r.n_max},
            {"best_n", r.best_n},
            {"best_forward_margin", num(r.best_forward_margin)},
            {"best_backward_margin", num(r.best_backward_margin)},
            {"failing", records_json(r.failing)}};
  if (r.certificate) j["certificate"] = to_json(*r.certificate);
  return j;
}

json to_json(const InvertibleCheckResult& r) {
  return {{"m", r.m}, {"G", num(r.G)}, {"n_max", r.n_max}, {"ns", r.ns}};
}

json to_json(const SeriesVerdict& v) {
  json ps = json::array();
  for (const auto& [n, s] : v.partial_sums) ps.push_back(json::array({n, num(s)}));
  return {{"verdict", to_string(v.kind)}, {"partial_sum", num(v.partial_sum)}, {"n_used", v.n_used},
          {"tail_bound", num(v.tail_bound)}, {"method", v.method},           {"rate", num(v.rate)},
          {"cap", num(v.cap)},               {"partial_sums", ps}};
}

json to_json(const DecayReport& r) {
  return {{"rate", num(r.rate)},         {"n_from", r.n_from},         {"n_to", r.n_to},
          {"bound_holds", r.bound_holds}, {"max_ratio", num(r.max_ratio)}, {"min_ratio", num(r.min_ratio)},
          {"worst_n", r.worst_n},         {"final_log_norm", num(r.final_log_norm)},
          {"n_o", r.n_o},                 {"conclusion", r.conclusion}};
}

json to_json(const RangeCertificate& c) {
  return {{"verdict", to_string(c.verdict)},
          {"witness", json::array({num(c.witness.real()), num(c.witness.imag())})},
          {"witness_modulus", num(c.witness_modulus)},
          {"boundary_max_upper", num(c.boundary_max_upper)},
          {"boundary_min_lower", num(c.boundary_min_lower)},
          {"winding", c.winding},
          {"winding_certified", c.winding_certified},
          {"contact_arcs", c.contact_arcs},
          {"lipschitz", num(c.lipschitz)},
          {"grid", c.grid},
          {"arcs_examined", c.arcs_examined},
          {"margin", num(c.margin)}};
}

RangeCertificate range_certificate_from_json(const json& j) {
  RangeCertificate c;
  const auto v = j.at("verdict").get<std::string>();
  using V = RangeCertificate::Verdict;
  if (v == "Intersects") {
    c.verdict = V::Intersects;
  } else if (v == "DisjointInside") {
    c.verdict = V::DisjointInside;
  } else if (v == "DisjointOutside") {
    c.verdict = V::DisjointOutside;
  } else if (v == "Uncertain") {
    c.verdict = V::Uncertain;
  } else {
    throw ParseError("unknown range verdict '" + v + "'");
  }
  c.witness = {get_num(j.at("witness").at(0)), get_num(j.at("witness").at(1))};
  c.witness_modulus = get_num(j.at("witness_modulus"));
  c.boundary_max_upper = get_num(j.at("boundary_max_upper"));
  c.boundary_min_lower = get_num(j.at("boundary_min_lower"));
  c.winding = j.at("winding").get<int>();
  c.winding_certified = j.at("winding_certified").get<bool>();
  c.contact_arcs = j.at("contact_arcs").get<int>();
  c.lipschitz = get_num(j.at("lipschitz"));
  c.grid = j.at("grid").get<int>();
  c.arcs_examined = j.at("arcs_examined").get<std::int64_t>();
  c.margin = get_num(j.at("margin"));
  return c;
}

json to_json(const EigenResidual& e) {
  return {{"residual", num(e.residual)},         {"bound", num(e.bound)},
          {"log10_residual", num(e.log10_residual)}, {"log10_bound", num(e.log10_bound)},
          {"within_bound", e.within_bound},      {"precision_bits", e.precision_bits}};
}

json to_json(const BlockPlan& p) {
  json t = json::array();
  for (const auto& tg : p.targets) t.push_back({{"y", to_json(tg.y)}, {"literal", to_literal(tg.y)}, {"eps", num(tg.eps)}});
  return {{"targets", t}, {"g", p.g}, {"period", p.period()}, {"n_min", p.n_min}};
}

std::vector<FUTarget> targets_from_json(const json& j) {
  std::vector<FUTarget> out;
  for (const auto& t : j) out.push_back({coef_vec_from_json(t.at("y")), get_num(t.at("eps"))});
  return out;
}

json to_json(const VerificationReport& r) {
  json per = json::array();
  for (const auto& t : r.per_target) {
    per.push_back({{"planned", t.planned}, {"hits", t.hits}, {"misses", t.misses}, {"worst_distance", num(t.worst_distance)}});
  }
  return {{"horizon", r.horizon}, {"clean", r.clean()}, {"per_target", per}};
}

json to_json(const FUVector& v) {
  return {{"plan", to_json(v.plan())},
          {"horizon", v.horizon()},
          {"sequence", sequence_spec(v.lam())},
          {"operator", to_json(v.op())},
          {"report", to_json(v.report())},
          {"x", to_json(v.x())}};
}

}  // namespace opdyn
