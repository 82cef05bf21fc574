#include <doctest.h>

#include <random>

#include "ds2/kernels.hpp"

using namespace ds2;
namespace K = ds2::kernels;

namespace {

struct Data {
  std::vector<double> a, b;
  cvec ca, cb;
  explicit Data(size_t n) : a(n), b(n), ca(n), cb(n) {
    std::mt19937_64 rng(1234 + n);
    std::uniform_real_distribution<double> u(-1, 1);
    for (size_t i = 0; i < n; ++i) {
      a[i] = u(rng);
      b[i] = u(rng);
      ca[i] = {u(rng), u(rng)};
      cb[i] = {u(rng), u(rng)};
    }
  }
};

}  // namespace

TEST_CASE("dispatch reports an ISA and can be forced") {
  auto prev = K::force_isa(K::Isa::scalar);
  CHECK(K::active_isa() == K::Isa::scalar);
  K::force_isa(prev);
  CHECK(std::string(K::isa_name(K::Isa::scalar)) == "scalar");
  if (K::detected_isa() == K::Isa::scalar) {
    K::force_isa(K::Isa::avx2);
    CHECK(K::active_isa() == K::Isa::scalar);
  }
}

TEST_CASE("avx2 kernels match the scalar reference") {
  if (K::detected_isa() != K::Isa::avx2) return;
  for (size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 17u, 1000u, 1023u}) {
    Data d(n);
    CHECK(K::avx2::dot(d.a.data(), d.b.data(), n) ==
          doctest::Approx(K::scalar::dot(d.a.data(), d.b.data(), n)).epsilon(1e-13));

    auto y1 = d.b, y2 = d.b;
    K::scalar::axpy(0.37, d.a.data(), y1.data(), n);
    K::avx2::axpy(0.37, d.a.data(), y2.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));

    auto s1 = d.a, s2 = d.a;
    K::scalar::scal(-2.5, s1.data(), n);
    K::avx2::scal(-2.5, s2.data(), n);
    CHECK(s1 == s2);

    cvec o1(n), o2(n);
    K::scalar::cmul(d.ca.data(), d.cb.data(), o1.data(), n);
    K::avx2::cmul(d.ca.data(), d.cb.data(), o2.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) < 1e-15);
    K::scalar::cmul_conj(d.ca.data(), d.cb.data(), o1.data(), n);
    K::avx2::cmul_conj(d.ca.data(), d.cb.data(), o2.data(), n);
    for (size_t i = 0; i < n; ++i) CHECK(std::abs(o1[i] - o2[i]) < 1e-15);

    cplx c1 = K::scalar::cdot_real(d.ca.data(), d.a.data(), n);
    cplx c2 = K::avx2::cdot_real(d.ca.data(), d.a.data(), n);
    CHECK(std::abs(c1 - c2) < 1e-12);
  }
}

TEST_CASE("dispatched kernels compute the right thing") {
  Data d(9);
  double ref = 0;
  for (size_t i = 0; i < 9; ++i) ref += d.a[i] * d.b[i];
  CHECK(K::dot(d.a.data(), d.b.data(), 9) == doctest::Approx(ref));
  cvec o(9);
  K::cmul_conj(d.ca.data(), d.cb.data(), o.data(), 9);
  for (size_t i = 0; i < 9; ++i) CHECK(std::abs(o[i] - d.ca[i] * std::conj(d.cb[i])) < 1e-15);
  cplx s = K::cdot_real(d.ca.data(), d.a.data(), 9), sr = 0;
  for (size_t i = 0; i < 9; ++i) sr += d.ca[i] * d.a[i];
  CHECK(std::abs(s - sr) < 1e-14);
}
