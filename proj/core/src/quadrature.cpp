#include "cgap/quadrature.hpp"

#include <sstream>

namespace cgap::quad {

void report_failure(const char* where, const Outcome& o, const Options& opt) {
  std::ostringstream os;
  os.precision(6);
  os << where << ": tolerance not met (value " << o.value << ", error estimate " << o.error
     << ", L1 " << o.l1 << ", rel_tol " << opt.rel_tol << ", abs_tol " << opt.abs_tol << ")";
  throw QuadratureError(os.str());
}

} // namespace cgap::quad
