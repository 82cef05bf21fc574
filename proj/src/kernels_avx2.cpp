// Compiled with -mavx2 -mfma; only reached when the CPU reports both.
#include "ds2/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#define DS2_HAVE_AVX2 1
#endif

namespace ds2::kernels::avx2 {

#ifdef DS2_HAVE_AVX2

namespace {
inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}
}  // namespace

double dot(const double* a, const double* b, std::size_t n) {
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), s1);
  }
  double s = hsum(_mm256_add_pd(s0, s1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d al = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(al, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scal(double alpha, double* x, std::size_t n) {
  const __m256d al = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(al, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  auto* pa = reinterpret_cast<const double*>(a);
  auto* pb = reinterpret_cast<const double*>(b);
  auto* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    __m256d br = _mm256_movedup_pd(vb);
    __m256d bi = _mm256_permute_pd(vb, 0xF);
    __m256d sw = _mm256_permute_pd(va, 0x5);
    _mm256_storeu_pd(po + 2 * i, _mm256_fmaddsub_pd(va, br, _mm256_mul_pd(sw, bi)));
  }
  if (i < n) scalar::cmul(a + i, b + i, out + i, n - i);
}

void cmul_conj(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  auto* pa = reinterpret_cast<const double*>(a);
  auto* pb = reinterpret_cast<const double*>(b);
  auto* po = reinterpret_cast<double*>(out);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(pa + 2 * i);
    __m256d vb = _mm256_loadu_pd(pb + 2 * i);
    __m256d br = _mm256_movedup_pd(vb);
    __m256d bi = _mm256_permute_pd(vb, 0xF);
    __m256d sw = _mm256_permute_pd(va, 0x5);
    _mm256_storeu_pd(po + 2 * i, _mm256_fmsubadd_pd(va, br, _mm256_mul_pd(sw, bi)));
  }
  if (i < n) scalar::cmul_conj(a + i, b + i, out + i, n - i);
}

cplx cdot_real(const cplx* a, const double* w, std::size_t n) {
  auto* pa = reinterpret_cast<const double*>(a);
  __m256d s0 = _mm256_setzero_pd(), s1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d w0 = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i)), 0x50);
    __m256d w1 = _mm256_permute4x64_pd(_mm256_castpd128_pd256(_mm_loadu_pd(w + i + 2)), 0x50);
    s0 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + 2 * i), w0, s0);
    s1 = _mm256_fmadd_pd(_mm256_loadu_pd(pa + 2 * i + 4), w1, s1);
  }
  __m256d s = _mm256_add_pd(s0, s1);
  __m128d lo = _mm_add_pd(_mm256_castpd256_pd128(s), _mm256_extractf128_pd(s, 1));
  cplx acc(_mm_cvtsd_f64(lo), _mm_cvtsd_f64(_mm_unpackhi_pd(lo, lo)));
  if (i < n) acc += scalar::cdot_real(a + i, w + i, n - i);
  return acc;
}

#else

double dot(const double* a, const double* b, std::size_t n) { return scalar::dot(a, b, n); }
void axpy(double alpha, const double* x, double* y, std::size_t n) { scalar::axpy(alpha, x, y, n); }
void scal(double alpha, double* x, std::size_t n) { scalar::scal(alpha, x, n); }
void cmul(const cplx* a, const cplx* b, cplx* out, std::size_t n) { scalar::cmul(a, b, out, n); }
void cmul_conj(const cplx* a, const cplx* b, cplx* out, std::size_t n) {
  scalar::cmul_conj(a, b, out, n);
}
cplx cdot_real(const cplx* a, const double* w, std::size_t n) { return scalar::cdot_real(a, w, n); }

#endif

}  // namespace ds2::kernels::avx2
