#include "opdyn/format.hpp"

#include <charconv>
#include <cmath>

namespace opdyn {

std::string fmt_num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

std::string fmt_cplx(std::complex<double> z) {
  if (z.imag() == 0.0) return fmt_num(z.real());
  return "(" + fmt_num(z.real()) + "," + fmt_num(z.imag()) + ")";
}

}  // namespace opdyn
