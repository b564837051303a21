// opdyn: command-line front end for the scenario runner and the individual checks.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "opdyn/criteria.hpp"
#include "opdyn/errors.hpp"
#include "opdyn/experiment.hpp"
#include "opdyn/format.hpp"
#include "opdyn/fu_builder.hpp"
#include "opdyn/orbits.hpp"
#include "opdyn/serialize.hpp"
#include "opdyn/symbol.hpp"

using namespace opdyn;

namespace {

enum Exit { kOk = 0, kFailure = 1, kSchema = 2, kAssertion = 3, kCap = 4 };

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("not valid JSON: ") + e.what());
  }
}

// "e(1) + e(2):1e-3" -> target with eps; eps falls back to dflt.
FUTarget parse_target(const std::string& text, double dflt) {
  const auto colon = text.rfind(':');
  const std::string vec = colon == std::string::npos ? text : text.substr(0, colon);
  const double eps = colon == std::string::npos ? dflt : std::stod(text.substr(colon + 1));
  return {parse_vector_literal(Side::Unilateral, vec), eps};
}

HittingSet read_hits_csv(const std::string& path, std::int64_t n_max) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  std::string line;
  std::vector<std::int64_t> idx;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line != "n") throw SchemaError("hitting-set CSV must have the single column 'n'");
      continue;
    }
    idx.push_back(std::stoll(line));
  }
  std::int64_t top = n_max;
  for (auto n : idx) top = std::max(top, n);
  return HittingSet::from_indices(top, idx);
}

struct OpFlags {
  std::string side = "unilateral";
  std::string weights = "constant c=1";
  std::string premult = "1";

  void add(CLI::App* app) {
    app->add_option("--side", side, "unilateral or bilateral")->capture_default_str();
    app->add_option("--weights", weights, "weight family spec")->capture_default_str();
    app->add_option("--premult", premult, "scalar multiple c in cB_w, e.g. 2 or (0,1)")->capture_default_str();
  }
  ShiftOp build() const {
    return ShiftOp(parse_side(side), parse_weights(weights), LogScalar::from_complex(parse_complex(premult)));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamics of scaled weighted shifts: scenarios, criteria and certificates"};
  app.require_subcommand(1);
  int workers = 0;
  app.add_option("-j,--workers", workers, "worker threads (0 = all cores)")->capture_default_str();

  // run
  auto* run = app.add_subcommand("run", "run a scenario config (E1..E7)");
  std::string cfg_path, report_path, csv_dir;
  bool quiet = false;
  run->add_option("config", cfg_path, "scenario config (JSON)")->required();
  run->add_option("--report", report_path, "report path, unless the config sets output.report");
  run->add_option("--csv-dir", csv_dir, "CSV directory, unless the config sets output.csv_dir");
  run->add_flag("-q,--quiet", quiet, "only print failures");

  // classify-seq
  auto* cseq = app.add_subcommand("classify-seq", "ratio classification of a scaling sequence");
  std::string seq_spec;
  std::int64_t tau = 1, horizon = kDefaultRatioHorizon, fmod = 1, fres = 0;
  double tol = kDefaultRatioTol;
  bool as_json = false;
  cseq->add_option("sequence", seq_spec, "sequence spec, e.g. 'exp_pow a=0.5'")->required();
  cseq->add_option("--tau", tau)->capture_default_str();
  cseq->add_option("-N,--horizon", horizon)->capture_default_str();
  cseq->add_option("--tol", tol)->capture_default_str();
  cseq->add_option("--modulus", fmod, "restrict the window to n = residue mod modulus")->capture_default_str();
  cseq->add_option("--residue", fres)->capture_default_str();
  cseq->add_flag("--json", as_json);

  // check-salas
  auto* salas = app.add_subcommand("check-salas", "search for a Salas certificate (m = 1)");
  std::string w_spec;
  double eps = 0.5;
  std::int64_t q = 0, n_max = 10'000, m = 3;
  salas->add_option("--weights", w_spec)->required();
  salas->add_option("--eps", eps)->capture_default_str();
  salas->add_option("-q", q)->capture_default_str();
  salas->add_option("--n-max", n_max)->capture_default_str();
  salas->add_flag("--json", as_json);

  // check-mr
  auto* cmr = app.add_subcommand("check-mr", "multiple-recurrence shift criterion");
  double G = 1e3;
  bool invertible = false;
  cmr->add_option("--weights", w_spec)->required();
  cmr->add_option("-m", m)->capture_default_str();
  cmr->add_option("-q", q)->capture_default_str();
  cmr->add_option("--eps", eps)->capture_default_str();
  cmr->add_option("--n-max", n_max)->capture_default_str();
  cmr->add_flag("--invertible", invertible, "use the invertible-shift growth test with bound G");
  cmr->add_option("-G", G)->capture_default_str();
  cmr->add_flag("--json", as_json);

  // check-series
  auto* cser = app.add_subcommand("check-series", "sum of 1/prod w^2 for frequent hypercyclicity");
  double cap = kDefaultSeriesCap;
  std::int64_t series_n = 1'000'000;
  cser->add_option("--weights", w_spec)->required();
  cser->add_option("--n-max", series_n)->capture_default_str();
  cser->add_option("--cap", cap)->capture_default_str();
  cser->add_flag("--json", as_json);

  // ap-find
  auto* apf = app.add_subcommand("ap-find", "find an arithmetic progression in a hitting set");
  std::string hits_path;
  std::int64_t K = 0, hits_n = 0;
  apf->add_option("hits", hits_path, "CSV with column 'n'")->required();
  apf->add_option("--n-max", hits_n, "horizon of the set (default: largest member)");
  apf->add_option("-m", m)->capture_default_str();
  apf->add_option("--tau", tau)->capture_default_str();
  apf->add_option("-K", K, "largest step k (default N/(4 m tau))");
  apf->add_flag("--json", as_json);

  // build-fu
  auto* bfu = app.add_subcommand("build-fu", "build and verify a frequently universal vector");
  OpFlags op;
  std::string lam_spec = "constant c=1", out_path, csv_path;
  std::vector<std::string> targets;
  std::int64_t N = 100'000, gap = 0;
  double target_eps = 1e-3;
  op.add(bfu);
  bfu->add_option("--sequence", lam_spec)->capture_default_str();
  bfu->add_option("--target", targets, "target vector with optional ':eps', repeatable")->required();
  bfu->add_option("--eps", target_eps, "default target radius")->capture_default_str();
  bfu->add_option("-N", N)->capture_default_str();
  bfu->add_option("-g,--gap", gap, "block gap (default 2 max q + 8)");
  bfu->add_option("-o,--out", out_path, "write the vector and plan as JSON");
  bfu->add_option("--hits-csv", csv_path, "write the first target's hitting set as CSV");

  // mr-witness
  auto* mrw = app.add_subcommand("mr-witness", "multiple-recurrence witness search");
  OpFlags op2;
  std::string y_spec = "e(1)";
  op2.add(mrw);
  mrw->add_option("--sequence", lam_spec)->capture_default_str();
  mrw->add_option("-y,--target", y_spec)->capture_default_str();
  mrw->add_option("--eps", eps)->capture_default_str();
  mrw->add_option("-m", m)->capture_default_str();
  mrw->add_option("--tau", tau)->capture_default_str();
  mrw->add_option("-N", N)->capture_default_str();
  mrw->add_option("-K", K, "largest step k (default N/(4 m tau))");
  mrw->add_option("-g,--gap", gap);

  // classify-symbol
  auto* csym = app.add_subcommand("classify-symbol", "classify M_phi^* for a polynomial symbol");
  std::string sym_spec;
  csym->add_option("symbol", sym_spec, "coefficients c0,c1,..., e.g. '0.8,1' or '(0,1)'")->required();
  csym->add_flag("--json", as_json);

  // verify
  auto* ver = app.add_subcommand("verify", "re-verify every certificate embedded in a report");
  std::string ver_path;
  ver->add_option("report", ver_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      ExperimentConfig cfg = load_config(cfg_path);
      if (cfg.report_path.empty()) cfg.report_path = report_path;
      if (cfg.csv_dir.empty()) cfg.csv_dir = csv_dir;
      const Report r = run_scenario(cfg, workers);
      write_outputs(r, cfg);
      if (cfg.report_path.empty()) std::cout << r.render();
      for (const auto& a : r.assertions) {
        if (!quiet || !a.passed) {
          std::cerr << (a.passed ? "PASS " : "FAIL ") << a.name << (a.detail.empty() ? "" : "  " + a.detail) << '\n';
        }
      }
      if (!r.passed()) {
        std::cerr << "scenario " << cfg.scenario << " failed:";
        for (const auto& n : r.failed()) std::cerr << ' ' << n;
        std::cerr << '\n';
        return kAssertion;
      }
      return kOk;
    }
    if (*cseq) {
      const ScalingSeq s = parse_sequence(seq_spec);
      const RatioVerdict v = ratio_classify(s, tau, horizon, tol, {fmod, fres});
      if (as_json) {
        print_json(to_json(v));
        return kOk;
      }
      std::cout << "sequence  " << sequence_spec(s) << '\n'
                << "verdict   " << to_string(v.kind);
      if (v.kind == RatioVerdict::Kind::Bad) std::cout << " (limit " << fmt_num(v.limit) << ")";
      std::cout << "\nwindow    [" << v.window_begin << ", " << v.horizon << "], tau = " << v.tau << '\n'
                << "ratios    min " << fmt_num(v.min_ratio) << ", max " << fmt_num(v.max_ratio) << ", max |r-1| "
                << fmt_num(v.max_defect) << '\n'
                << "evidence ";
      for (double r : v.evidence) std::cout << ' ' << fmt_num(r);
      std::cout << '\n';
      return kOk;
    }
    if (*salas || *cmr) {
      const WeightSeq w = parse_weights(w_spec);
      if (*cmr && invertible) {
        const auto r = mr_invertible_check(w, m, n_max, G);
        if (as_json) {
          print_json(to_json(r));
        } else {
          std::cout << "n satisfying the growth test (m = " << m << ", G = " << fmt_num(G) << "):";
          for (auto n : r.ns) std::cout << ' ' << n;
          std::cout << '\n';
        }
        return kOk;
      }
      const ShiftCheckResult r = *salas ? salas_check(w, eps, q, n_max) : mr_shift_check(w, m, q, eps, n_max);
      const std::string label = *salas ? "Salas" : "MR(m=" + std::to_string(m) + ")";
      if (as_json) {
        print_json(to_json(r));
      } else if (r.certificate) {
        std::cout << label << ": certificate at n=" << r.certificate->n << " ("
                  << 2 * r.certificate->products.size() << " product inequalities, re-verified "
                  << (verify_shift_certificate(w, *r.certificate) ? "yes" : "NO") << ")\n";
      } else {
        std::cout << label << ": none found up to N_max=" << n_max << '\n';
      }
      return kOk;
    }
    if (*cser) {
      const SeriesVerdict v = fhc_series_check(parse_weights(w_spec), series_n, cap);
      if (as_json) {
        print_json(to_json(v));
      } else {
        std::cout << to_string(v.kind) << ": S_N = " << fmt_num(v.partial_sum) << " at N = " << v.n_used;
        if (v.kind == SeriesVerdict::Kind::ConvergesCertified) {
          std::cout << ", tail <= " << fmt_num(v.tail_bound) << " (" << v.method << ")";
        }
        std::cout << '\n';
      }
      return kOk;
    }
    if (*apf) {
      const HittingSet H = read_hits_csv(hits_path, hits_n);
      const std::int64_t k_max = K > 0 ? K : default_max_k(H.n_max(), m, tau);
      const auto w = find_ap(H, m, tau, k_max, workers);
      if (as_json) {
        print_json(w ? to_json(*w) : json(nullptr));
      } else if (w) {
        std::cout << "a = " << w->a << ", k = " << w->k << ", members:";
        for (std::int64_t j = 0; j <= w->m; ++j) std::cout << ' ' << w->member(j);
        std::cout << '\n';
      } else {
        std::cout << "no progression of order " << m << " with k <= " << k_max << '\n';
      }
      return w ? kOk : kAssertion;
    }
    if (*bfu) {
      std::vector<FUTarget> ts;
      for (const auto& t : targets) ts.push_back(parse_target(t, target_eps));
      const FUVector v = build_fu(parse_sequence(lam_spec), op.build(), ts, N,
                                  gap > 0 ? std::optional<std::int64_t>(gap) : std::nullopt, workers);
      const auto checks = verify_fu(v, {}, workers);
      const double P = static_cast<double>(v.plan().period());
      std::cout << "nonzeros " << v.x().size() << ", period " << v.plan().period() << '\n';
      for (std::size_t i = 0; i < checks.size(); ++i) {
        std::cout << "target " << i << ": " << checks[i].hits.count() << " hits, lower density "
                  << fmt_num(checks[i].density.lower_est) << " (1/P = " << fmt_num(1.0 / P) << "), missing "
                  << checks[i].missing << '\n';
      }
      if (!out_path.empty()) std::ofstream(out_path) << to_json(v).dump(2) << '\n';
      if (!csv_path.empty()) {
        std::ofstream os(csv_path);
        write_csv(os, checks.at(0).hits);
      }
      return kOk;
    }
    if (*mrw) {
      const ScalingSeq lam = parse_sequence(lam_spec);
      const ShiftOp T = op2.build();
      const CoefVec y = parse_vector_literal(Side::Unilateral, y_spec);
      const FUVector v = build_fu(lam, T, {{y, eps / 2}}, N,
                                  gap > 0 ? std::optional<std::int64_t>(gap) : std::nullopt, workers);
      const std::int64_t k_max = K > 0 ? K : default_max_k(N, std::max<std::int64_t>(m, 1), tau);
      const MRSearchResult r = mr_witness_search(v.x(), lam, T, y, eps, m, tau, N, k_max, workers);
      json out = to_json(r);
      if (r.witness) out["reverified"] = verify_mr_witness(T, *r.witness);
      print_json(out);
      return r.witness ? kOk : kAssertion;
    }
    if (*csym) {
      const PolySymbol phi = parse_symbol(sym_spec);
      const AdjointClass c = classify_adjoint(phi);
      const RangeCertificate rc = range_circle_test(phi);
      if (as_json) {
        print_json({{"symbol", symbol_spec(phi)}, {"class", to_string(c)}, {"range", to_json(rc)},
                    {"certificate_ok", verify_certificate(phi, rc)}});
      } else {
        std::cout << symbol_spec(phi) << ": " << to_string(c) << "\nrange vs circle: " << to_string(rc.verdict)
                  << ", certificate " << (verify_certificate(phi, rc) ? "verified" : "REJECTED") << '\n';
      }
      return kOk;
    }
    if (*ver) {
      const VerifyOutcome out = verify_report(read_json_file(ver_path), workers);
      for (const auto& c : out.checks) {
        std::cout << (c.passed ? "ok   " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  " + c.detail) << '\n';
      }
      return out.ok() ? kOk : kAssertion;
    }
  } catch (const ResourceCapExceeded& e) {
    std::cerr << "resource cap: " << e.what() << '\n';
    return kCap;
  } catch (const std::logic_error& e) {
    // Schema, parse, domain and precondition errors: bad input.
    std::cerr << "error: " << e.what() << '\n';
    return kSchema;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
