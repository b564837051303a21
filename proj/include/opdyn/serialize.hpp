#pragma once

#include <complex>
#include <string>
#include <vector>

#include <json.hpp>

#include "opdyn/coef_vec.hpp"
#include "opdyn/criteria.hpp"
#include "opdyn/fu_builder.hpp"
#include "opdyn/orbits.hpp"
#include "opdyn/sequences.hpp"
#include "opdyn/shift.hpp"
#include "opdyn/symbol.hpp"

namespace opdyn {

using json = nlohmann::json;

/// Malformed text spec or JSON record.
class ParseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Text specs: a family tag followed by key=value pairs, e.g. "exp_pow a=0.5",
// "constant c=2", "table first=1 values=1,2,1.5". Complex values are "(re,im)".

std::complex<double> parse_complex(const std::string& text);
Side parse_side(const std::string& text);
ScalingSeq parse_sequence(const std::string& text);
WeightSeq parse_weights(const std::string& text);
/// Coefficients c_0, c_1, ... separated by commas, e.g. "0.8,1" or "(0,1)".
PolySymbol parse_symbol(const std::string& text);

/// Parseable inverses of the parsers.
std::string sequence_spec(const ScalingSeq& s);
std::string weights_spec(const WeightSeq& w);
std::string symbol_spec(const PolySymbol& phi);

/// Finite doubles as numbers, the rest as "inf", "-inf", "nan".
json num(double x);
double get_num(const json& j);

json to_json(const LogScalar& s);
LogScalar log_scalar_from_json(const json& j);
json to_json(const CoefVec& x);
CoefVec coef_vec_from_json(const json& j);
json to_json(const ShiftOp& T);
ShiftOp shift_op_from_json(const json& j);

json to_json(const RatioVerdict& v);
json to_json(const DensityStats& d, bool with_samples = true);
json to_json(const APWitness& w);
APWitness ap_witness_from_json(const json& j);
json to_json(const MRWitness& w);
MRWitness mr_witness_from_json(const json& j);
json to_json(const MRSearchResult& r);
json to_json(const ShiftCertificate& c);
ShiftCertificate shift_certificate_from_json(const json& j);
json to_json(const ShiftCheckResult& r);
json to_json(const InvertibleCheckResult& r);
json to_json(const SeriesVerdict& v);
json to_json(const DecayReport& r);
json to_json(const RangeCertificate& c);
RangeCertificate range_certificate_from_json(const json& j);
json to_json(const EigenResidual& e);
json to_json(const BlockPlan& p);
std::vector<FUTarget> targets_from_json(const json& j);
json to_json(const VerificationReport& r);
/// Plan parameters plus the sparse coefficient list in log-magnitude/phase form.
json to_json(const FUVector& v);

}  // namespace opdyn
