#include <doctest.h>

#include <cmath>

#include "ds2/dirac.hpp"
#include "ds2/riccati.hpp"

using namespace ds2;

TEST_CASE("cauchy inverse of a gaussian") {
  // C(u) = F^{-1}{F{u}/xi}; for u = e^{-|z|^2} it is (i/2)(1 - e^{-|z|^2})/z
  CartesianGrid g(128, 128);
  CauchyInverse C(g, 2);
  auto u = sample(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
  auto w = C.apply(u);
  double e = 0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      cplx z(g.x(i), g.y(j));
      cplx ref = std::abs(z) > 0 ? 0.5 * kI * (1.0 - std::exp(-std::norm(z))) / z : 0.0;
      e = std::max(e, std::abs(w.at(i, j) - ref));
    }
  CHECK(e < 1e-9);
  // in place agrees
  auto v = u;
  C.apply_inplace(v.v.data());
  for (size_t i = 0; i < v.v.size(); i += 97) CHECK(std::abs(v.v[i] - w.v[i]) < 1e-15);
  CHECK_THROWS_AS(CauchyInverse(g, -1), InputError);
}

TEST_CASE("higher regularization orders converge") {
  // periodic wrap error of the 1/z tail drops with each removed moment
  CartesianGrid g(96, 96);
  auto u = sample(g, [](double x, double y) { return std::exp(-(x - 0.5) * (x - 0.5) - 2 * y * y) * cplx(1, x); });
  auto ref = CauchyInverse(g, 5).apply(u);
  double prev = 1e300;
  for (int order = 0; order <= 4; ++order) {
    auto w = CauchyInverse(g, order).apply(u);
    double e = 0;
    for (size_t i = 0; i < w.v.size(); ++i) e = std::max(e, std::abs(w.v[i] - ref.v[i]));
    CHECK(e < prev);
    prev = e;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("shift is undone by the opposite shift") {
  CartesianGrid g(32, 32);
  auto f = sample(g, [](double x, double y) { return cplx(std::cos(x), y); });
  cplx k(0.7, 0.2);
  auto back = apply_shift(apply_shift(f, g, k, 0.5, 1), g, k, 0.5, -1);
  double e = 0;
  for (size_t i = 0; i < f.v.size(); ++i) e = std::max(e, std::abs(back.v[i] - f.v[i]));
  CHECK(e < 1e-13);
  CHECK_THROWS_AS(apply_shift(f, g, k, 0.5, 2), InputError);
}

TEST_CASE("zero potential gives the free solution") {
  DiracProblem pr;
  pr.p = Potential::custom("0");
  pr.k = 0.8;
  pr.eps = 0.3;
  pr.cart = CartesianGrid(64, 64);
  auto s = solve_dirac(pr);
  CHECK(s.R == cplx(0.0));
  for (const auto& v : s.psi1_scaled.v) CHECK(v == cplx(1.0));
  for (const auto& v : s.psi2_scaled.v) CHECK(v == cplx(0.0));
  for (const auto& v : s.plus.m.v) CHECK(v == cplx(0.0));
}

TEST_CASE("k = 0 reflection agrees with the radial integration") {
  auto p = Potential::gaussian();
  for (double eps : {1.0, 0.5}) {
    DiracProblem pr;
    pr.p = p;
    pr.eps = eps;
    pr.k = 0.0;
    pr.cart = CartesianGrid(128, 128);
    auto s = solve_dirac(pr);
    double ref = integrate_riccati(p, eps).R0_integrated;
    CHECK(std::abs(s.R - ref) / ref < 1e-6);
    CHECK(std::abs(reflection_from_solution(s, pr) - s.R) < 1e-14);
  }
}

TEST_CASE("dirac residual is small away from the boundary") {
  DiracProblem pr;
  pr.p = Potential::gaussian();
  pr.eps = 0.5;
  pr.k = 1.0;
  pr.cart = CartesianGrid(256, 256);
  auto s = solve_dirac(pr);
  CHECK(s.plus.rel_residual <= pr.gmres.tol);
  CHECK(dirac_residual(s, pr) < 1e-6);
  CHECK(std::abs(s.R.imag()) < 1e-10);
}

TEST_CASE("resolution check") {
  DiracProblem pr;
  pr.p = Potential::gaussian();
  pr.eps = 1.0 / 16;
  pr.k = 1.0;
  pr.cart = CartesianGrid(64, 64);
  CHECK_THROWS_AS(solve_dirac(pr), InputError);
  int nx = suggest_nx(pr.p, pr.k, pr.eps, pr.cart.lx);
  CHECK(nx > 64);
  CHECK((nx & (nx - 1)) == 0);
  CHECK(default_nx(1.0) == 256);
  CHECK(default_nx(0.25) == 512);
  CHECK(default_nx(1.0 / 16) == 1024);
  CHECK(default_nx(1.0 / 32) == 2048);
  pr.eps = -1;
  CHECK_THROWS_AS(solve_dirac(pr), InputError);
}
