#include <pybind11/pybind11.h>
#include <pybind11/complex.h>
#include <pybind11/stl.h>

#include "opdyn/criteria.hpp"
#include "opdyn/experiment.hpp"
#include "opdyn/fu_builder.hpp"
#include "opdyn/orbits.hpp"
#include "opdyn/serialize.hpp"
#include "opdyn/symbol.hpp"

namespace py = pybind11;
using namespace opdyn;

// Results cross the boundary as JSON text; the Python wrapper decodes them.
namespace {

std::string dump(const json& j) { return j.dump(); }

ShiftOp make_op(const std::string& side, const std::string& w, const std::string& premult) {
  return ShiftOp(parse_side(side), parse_weights(w), LogScalar::from_complex(parse_complex(premult)));
}

std::vector<FUTarget> make_targets(const std::vector<std::pair<std::string, double>>& ts) {
  std::vector<FUTarget> out;
  for (const auto& [lit, eps] : ts) out.push_back({parse_vector_literal(Side::Unilateral, lit), eps});
  return out;
}

std::optional<std::int64_t> opt_gap(std::int64_t g) { return g > 0 ? std::optional<std::int64_t>(g) : std::nullopt; }

}  // namespace

PYBIND11_MODULE(_opdyn, m) {
  m.doc() = "Scaled weighted-shift dynamics: classifiers, constructions and certificates";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ResourceCapExceeded>(m, "ResourceCapExceeded", PyExc_RuntimeError);
  py::register_exception<InfeasibleDecay>(m, "InfeasibleDecay", PyExc_RuntimeError);
  py::register_exception<VerificationFailed>(m, "VerificationFailed", PyExc_RuntimeError);

  m.def(
      "ratio_classify",
      [](const std::string& seq, std::int64_t tau, std::int64_t horizon, double tol, std::int64_t modulus,
         std::int64_t residue) {
        py::gil_scoped_release nogil;
        return dump(to_json(ratio_classify(parse_sequence(seq), tau, horizon, tol, {modulus, residue})));
      },
      py::arg("sequence"), py::arg("tau") = 1, py::arg("horizon") = kDefaultRatioHorizon,
      py::arg("tol") = kDefaultRatioTol, py::arg("modulus") = 1, py::arg("residue") = 0);

  m.def(
      "salas_check",
      [](const std::string& w, double eps, std::int64_t q, std::int64_t n_max) {
        return dump(to_json(salas_check(parse_weights(w), eps, q, n_max)));
      },
      py::arg("weights"), py::arg("eps"), py::arg("q"), py::arg("n_max"));

  m.def(
      "mr_shift_check",
      [](const std::string& w, std::int64_t mm, std::int64_t q, double eps, std::int64_t n_max) {
        return dump(to_json(mr_shift_check(parse_weights(w), mm, q, eps, n_max)));
      },
      py::arg("weights"), py::arg("m"), py::arg("q"), py::arg("eps"), py::arg("n_max"));

  m.def(
      "mr_invertible_check",
      [](const std::string& w, std::int64_t mm, std::int64_t n_max, double G) {
        return dump(to_json(mr_invertible_check(parse_weights(w), mm, n_max, G)));
      },
      py::arg("weights"), py::arg("m"), py::arg("n_max"), py::arg("G"));

  m.def(
      "fhc_series_check",
      [](const std::string& w, std::int64_t n_max, double cap) {
        py::gil_scoped_release nogil;
        return dump(to_json(fhc_series_check(parse_weights(w), n_max, cap)));
      },
      py::arg("weights"), py::arg("n_max") = 1'000'000, py::arg("cap") = kDefaultSeriesCap);

  m.def(
      "hitting_set",
      [](const std::string& x, const std::string& seq, const std::string& side, const std::string& w,
         const std::string& premult, const std::string& center, double radius, std::int64_t N, int workers) {
        const ShiftOp T = make_op(side, w, premult);
        const Side s = T.side;
        const CoefVec xv = parse_vector_literal(s, x);
        const Ball b(parse_vector_literal(s, center), radius);
        py::gil_scoped_release nogil;
        return hitting_set(xv, parse_sequence(seq), T, b, N, workers).members();
      },
      py::arg("x"), py::arg("sequence"), py::arg("side"), py::arg("weights"), py::arg("premult"), py::arg("center"),
      py::arg("radius"), py::arg("N"), py::arg("workers") = 0);

  m.def(
      "find_ap",
      [](const std::vector<std::int64_t>& members, std::int64_t n_max, std::int64_t mm, std::int64_t tau,
         std::int64_t K, int workers) -> std::string {
        const HittingSet H = HittingSet::from_indices(n_max, members);
        py::gil_scoped_release nogil;
        const auto w = find_ap(H, mm, tau, K > 0 ? K : default_max_k(n_max, mm, tau), workers);
        return w ? dump(to_json(*w)) : "null";
      },
      py::arg("members"), py::arg("n_max"), py::arg("m"), py::arg("tau") = 1, py::arg("K") = 0,
      py::arg("workers") = 0);

  m.def(
      "build_fu",
      [](const std::string& seq, const std::string& side, const std::string& w, const std::string& premult,
         const std::vector<std::pair<std::string, double>>& targets, std::int64_t N, std::int64_t g, int workers) {
        const ScalingSeq lam = parse_sequence(seq);
        const ShiftOp T = make_op(side, w, premult);
        auto ts = make_targets(targets);
        py::gil_scoped_release nogil;
        const FUVector v = build_fu(lam, T, std::move(ts), N, opt_gap(g), workers);
        json out = to_json(v);
        json checks = json::array();
        for (const auto& c : verify_fu(v, {}, workers)) {
          checks.push_back({{"hits", c.hits.count()}, {"missing", c.missing}, {"density", to_json(c.density, false)}});
        }
        out["verification"] = checks;
        return dump(out);
      },
      py::arg("sequence"), py::arg("side"), py::arg("weights"), py::arg("premult"), py::arg("targets"), py::arg("N"),
      py::arg("g") = 0, py::arg("workers") = 0);

  m.def(
      "mr_witness",
      [](const std::string& seq, const std::string& side, const std::string& w, const std::string& premult,
         const std::string& y, double eps, std::int64_t mm, std::int64_t tau, std::int64_t N, std::int64_t K,
         std::int64_t g, int workers) {
        const ScalingSeq lam = parse_sequence(seq);
        const ShiftOp T = make_op(side, w, premult);
        const CoefVec yv = parse_vector_literal(Side::Unilateral, y);
        py::gil_scoped_release nogil;
        const FUVector v = build_fu(lam, T, {{yv, eps / 2}}, N, opt_gap(g), workers);
        const auto r = mr_witness_search(v.x(), lam, T, yv, eps, mm, tau, N,
                                         K > 0 ? K : default_max_k(N, std::max<std::int64_t>(mm, 1), tau), workers);
        json out = to_json(r);
        if (r.witness) out["reverified"] = verify_mr_witness(T, *r.witness);
        return dump(out);
      },
      py::arg("sequence"), py::arg("side"), py::arg("weights"), py::arg("premult"), py::arg("y"), py::arg("eps"),
      py::arg("m"), py::arg("tau") = 1, py::arg("N") = 100'000, py::arg("K") = 0, py::arg("g") = 0,
      py::arg("workers") = 0);

  m.def(
      "classify_symbol",
      [](const std::string& spec) {
        const PolySymbol phi = parse_symbol(spec);
        const RangeCertificate rc = range_circle_test(phi);
        return dump({{"symbol", symbol_spec(phi)},
                     {"class", to_string(classify_adjoint(phi))},
                     {"range", to_json(rc)},
                     {"certificate_ok", verify_certificate(phi, rc)}});
      },
      py::arg("symbol"));

  m.def(
      "eigen_check",
      [](const std::string& spec, std::complex<double> z, std::int64_t N) {
        return dump(to_json(eigen_check(parse_symbol(spec), z, N)));
      },
      py::arg("symbol"), py::arg("z"), py::arg("N") = 400);

  m.def(
      "run_scenario",
      [](const std::string& config, int workers) {
        const ExperimentConfig cfg = parse_config(json::parse(config));
        py::gil_scoped_release nogil;
        const Report r = run_scenario(cfg, workers);
        write_outputs(r, cfg);
        return r.render();
      },
      py::arg("config"), py::arg("workers") = 0);

  m.def(
      "verify_report",
      [](const std::string& report, int workers) {
        const json doc = json::parse(report);
        py::gil_scoped_release nogil;
        json out = json::array();
        for (const auto& c : verify_report(doc, workers).checks) {
          out.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
        }
        return dump(out);
      },
      py::arg("report"), py::arg("workers") = 0);
}
