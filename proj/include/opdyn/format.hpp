#pragma once

#include <complex>
#include <string>

namespace opdyn {

/// Shortest decimal text that round-trips to the same double.
std::string fmt_num(double x);
/// "(re,im)", or just the real part when im == 0.
std::string fmt_cplx(std::complex<double> z);

}  // namespace opdyn
