#include "ds2/kernels.hpp"

#include <atomic>

namespace ds2::kernels {

namespace scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scal(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br - ai * bi, ai * br + ar * bi);
  }
}

void cmul_conj(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double ar = a[i].real(), ai = a[i].imag(), br = b[i].real(), bi = b[i].imag();
    out[i] = cplx(ar * br + ai * bi, ai * br - ar * bi);
  }
}

cplx cdot_real(const cplx* a, const double* w, std::size_t n) {
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    re += a[i].real() * w[i];
    im += a[i].imag() * w[i];
  }
  return {re, im};
}

}  // namespace scalar

namespace {

Isa probe() {
#if defined(__x86_64__) || defined(__i386__)
  __builtin_cpu_init();
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) return Isa::avx2;
#endif
  return Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{probe()};
  return isa;
}

}  // namespace

Isa detected_isa() {
  static const Isa d = probe();
  return d;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

Isa force_isa(Isa isa) {
  if (isa == Isa::avx2 && detected_isa() != Isa::avx2) return active_isa();
  return current().exchange(isa);
}

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

#define DS2_DISPATCH(fn, ...) \
  return active_isa() == Isa::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)

double dot(const double* a, const double* b, std::size_t n) { DS2_DISPATCH(dot, a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) {
  DS2_DISPATCH(axpy, alpha, x, y, n);
}
void scal(double alpha, double* x, std::size_t n) { DS2_DISPATCH(scal, alpha, x, n); }
void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  DS2_DISPATCH(cmul, a, b, out, n);
}
void cmul_conj(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  DS2_DISPATCH(cmul_conj, a, b, out, n);
}
cplx cdot_real(const cplx* a, const double* w, std::size_t n) {
  DS2_DISPATCH(cdot_real, a, w, n);
}

#undef DS2_DISPATCH

}  // namespace ds2::kernels
