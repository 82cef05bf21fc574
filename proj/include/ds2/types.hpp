#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace ds2 {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

// solver failed to converge or hit a singular system
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// caller passed something the solver refuses to handle
struct InputError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

}  // namespace ds2
