#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <algorithm>
#include <cmath>
#include <functional>

#include "ds2/oracles.hpp"

using namespace ds2;

namespace {

double lorentz_amp(cplx z) { return 1.0 / (1.0 + std::norm(z)); }

// Wirtinger derivatives by centered differences
cplx d_fd(const std::function<cplx(cplx)>& f, cplx z, double h = 1e-5) {
  cplx fx = (f(z + h) - f(z - h)) / (2 * h);
  cplx fy = (f(z + cplx(0, h)) - f(z - cplx(0, h))) / (2 * h);
  return 0.5 * (fx - kI * fy);
}
cplx dbar_fd(const std::function<cplx(cplx)>& f, cplx z, double h = 1e-5) {
  cplx fx = (f(z + h) - f(z - h)) / (2 * h);
  cplx fy = (f(z + cplx(0, h)) - f(z - cplx(0, h))) / (2 * h);
  return 0.5 * (fx + kI * fy);
}

}  // namespace

TEST_CASE("catalan numbers") {
  const std::uint64_t ref[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796, 58786};
  for (int n = 0; n < 12; ++n) CHECK(catalan(n) == ref[n]);
  CHECK(catalan(35) == 3116285494907301262ull);
  CHECK(catalan_real(35) == doctest::Approx(3116285494907301262.0).epsilon(1e-14));
  // C_{n+1} = 2(2n+1)/(n+2) C_n holds for the real version far beyond the integer range
  for (int n : {40, 80, 120})
    CHECK(catalan_real(n + 1) == doctest::Approx(2.0 * (2 * n + 1) / (n + 2) * catalan_real(n)).epsilon(1e-12));
}

TEST_CASE("lorentzian exponent solves the eikonal problem") {
  for (cplx k : {cplx(1.0), cplx(0.6), cplx(0.8, 0.3)})
    for (cplx z : {cplx(0.3, 0.1), cplx(-1.2, 0.7), cplx(2.5, -3.0), cplx(0.05, 0.0)}) {
      auto f = [&](cplx w) { return lorentzian_f(w, k); };
      cplx df = lorentzian_df(z, k), dbf = lorentzian_dbarf(z, k);
      CHECK(std::abs(df - d_fd(f, z)) < 1e-8);
      CHECK(std::abs(dbf - dbar_fd(f, z)) < 1e-8);
      // (2 dbar f)(2 d f) = A^2
      CHECK(std::abs(4.0 * df * dbf - lorentz_amp(z) * lorentz_amp(z)) < 1e-12);
    }
  // normalization f - kz -> 0
  CHECK(std::abs(lorentzian_f(cplx(1e6, 2e6), 1.0) - cplx(1e6, 2e6)) < 1e-5);
  CHECK(std::abs(lorentzian_g_of_W(lorentzian_W(cplx(0.4, 0.2), 1.0)) -
                 (lorentzian_f(cplx(0.4, 0.2), 1.0) - cplx(0.4, 0.2))) < 1e-14);
}

TEST_CASE("lorentzian amplitude solves the transport equation") {
  // df dbar(a) + dbarf d(a) + (d dbar g + dbar g d ln A) a = 0
  cplx k = 1.0;
  auto a = [&](cplx w) { return lorentzian_alpha0(w, k); };
  auto g = [&](cplx w) { return lorentzian_f(w, k) - k * w; };
  auto dbg = [&](cplx w) { return lorentzian_dbarf(w, k); };
  for (cplx z : {cplx(0.3, 0.4), cplx(-1.5, 0.2), cplx(2.0, 2.0)}) {
    cplx dlnA = -std::conj(z) / (1.0 + std::norm(z));
    cplx lhs = lorentzian_df(z, k) * dbar_fd(a, z) + lorentzian_dbarf(z, k) * d_fd(a, z) +
               (d_fd(dbg, z) + dbar_fd(g, z) * dlnA) * a(z);
    CHECK(std::abs(lhs) < 1e-7);
  }
  CHECK(std::abs(lorentzian_alpha0(cplx(1e7, 0), k) - 1.0) < 1e-6);
  CHECK(std::abs(lorentzian_alpha0_of_W(lorentzian_W(cplx(0.7, -0.2), k)) - lorentzian_alpha0(cplx(0.7, -0.2), k)) <
        1e-14);
}

TEST_CASE("lorentzian branch points") {
  for (cplx k : {cplx(0.3), cplx(0.2, 0.25), cplx(-0.1, 0.4)}) {
    auto pts = lorentzian_branch_points(k);
    REQUIRE(pts.size() == 4);
    for (cplx z : pts) CHECK(std::abs(std::abs(lorentzian_W(z, k)) - 1.0) < 1e-10);
  }
  CHECK(lorentzian_branch_points(0.5).empty());
  CHECK(lorentzian_branch_points(cplx(0.6, 0.1)).empty());
  // k = 0.3: +-(1/0.6)(1 +- 0.8)
  auto pts = lorentzian_branch_points(0.3);
  std::vector<double> re;
  for (cplx z : pts) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  CHECK(re[0] == doctest::Approx(-3.0));
  CHECK(re[1] == doctest::Approx(-1.0 / 3));
  CHECK(re[2] == doctest::Approx(1.0 / 3));
  CHECK(re[3] == doctest::Approx(3.0));
}

TEST_CASE("lorentzian series coefficients") {
  CHECK(lorentzian_cn(0, 1.0) == doctest::Approx(0.25));
  for (int n : {0, 1, 5, 20})
    for (double r : {0.3, 1.0, 4.0}) {
      double ref = catalan_real(n) * std::pow(r, 2 * n + 1) / (2.0 * (2 * n + 1) * std::pow(1 + r * r, 2 * n + 1));
      CHECK(lorentzian_cn(n, r) == doctest::Approx(ref).epsilon(1e-13));
    }
  // c_0 = r / (2 (1 + r^2)) solves c0' + c0/r = A^2
  double r = 0.7, h = 1e-6;
  double dc = (lorentzian_cn(0, r + h) - lorentzian_cn(0, r - h)) / (2 * h);
  CHECK(dc + lorentzian_cn(0, r) / r == doctest::Approx(1.0 / std::pow(1 + r * r, 2)).epsilon(1e-8));
}

TEST_CASE("disk reflection coefficient at k = 0") {
  for (double eps : {0.2, 0.1, 0.05}) {
    double ref = 2.0 * boost::math::cyl_bessel_i(1, 1 / eps) / boost::math::cyl_bessel_i(0, 1 / eps);
    CHECK(disk_reflection_k0(1.0, 1.0, eps) == doctest::Approx(ref).epsilon(1e-13));
  }
  // large argument stays finite and tends to 1 - 1/(2x)
  double x = 1e5;
  CHECK(bessel_i1_over_i0(x) == doctest::Approx(1 - 1 / (2 * x)).epsilon(1e-9));
  CHECK(bessel_i1_over_i0(1e-8) == doctest::Approx(5e-9).epsilon(1e-6));
}

TEST_CASE("radial k = 0 eikonal") {
  auto F = radial_k0_eikonal(Potential::gaussian(), 1);
  auto Fm = radial_k0_eikonal(Potential::gaussian(), -1);
  for (double m : {0.0, 0.25, 1.0, 4.0}) {
    double ref = 0.5 * std::sqrt(kPi) * boost::math::erfc(std::sqrt(m));
    CHECK(F(m) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(Fm(m) == doctest::Approx(-ref).epsilon(1e-10));
  }
  auto L = radial_k0_eikonal(Potential::lorentzian(), 1);
  // \int_s^\infty 1/(1+t^2) dt = pi/2 - atan(s)
  CHECK(L(2.0) == doctest::Approx(kPi / 2 - std::atan(std::sqrt(2.0))).epsilon(1e-10));
}
