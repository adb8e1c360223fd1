#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <stdexcept>
#include <string>

namespace curvekit {

// Arbitrary-precision signed integer. Curve weights grow geometrically with
// the twist exponents (hundreds of bits at the default schedule), so every
// quantity derived from weights uses Int rather than a machine word.
using Int = boost::multiprecision::cpp_int;

inline Int floor_div(const Int& a, const Int& b) {
  Int q = a / b, r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) --q;
  return q;
}

inline Int ceil_div(const Int& a, const Int& b) { return -floor_div(-a, b); }

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

inline long long to_ll(const Int& a) { return a.convert_to<long long>(); }

// Internal invariant check; failures indicate a bug, not bad user input.
[[noreturn]] void check_failure(const char* cond, const char* file, int line,
                                const std::string& msg);

#define CK_CHECK(cond, msg)                                      \
  do {                                                           \
    if (!(cond)) ::curvekit::check_failure(#cond, __FILE__, __LINE__, (msg)); \
  } while (0)

}  // namespace curvekit
