#pragma once

#include <cstddef>

#include "ds2/types.hpp"

// Data-parallel hot loops: scalar reference versions plus AVX2+FMA variants,
// picked once at runtime from the CPU feature bits.
namespace ds2::kernels {

enum class Isa { scalar, avx2 };

Isa detected_isa();
Isa active_isa();
// override for tests and benchmarks; returns the previous setting
Isa force_isa(Isa isa);
const char* isa_name(Isa isa);

double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void scal(double alpha, double* x, std::size_t n);
// out = a * b
void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n);
// out = a * conj(b)
void cmul_conj(const cplx* a, const cplx* b, cplx* out, std::size_t n);
// sum_i a_i w_i with real weights
cplx cdot_real(const cplx* a, const double* w, std::size_t n);

#define DS2_KERNEL_DECLS                                                   \
  double dot(const double* a, const double* b, std::size_t n);             \
  void axpy(double alpha, const double* x, double* y, std::size_t n);      \
  void scal(double alpha, double* x, std::size_t n);                       \
  void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n);       \
  void cmul_conj(const cplx* a, const cplx* b, cplx* out, std::size_t n);  \
  cplx cdot_real(const cplx* a, const double* w, std::size_t n);

namespace scalar {
DS2_KERNEL_DECLS
}
namespace avx2 {
DS2_KERNEL_DECLS
}

#undef DS2_KERNEL_DECLS

}  // namespace ds2::kernels
