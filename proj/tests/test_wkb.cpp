#include <doctest.h>

#include <cmath>

#include "ds2/oracles.hpp"
#include "ds2/wkb.hpp"

using namespace ds2;

TEST_CASE("alpha0 for the lorentzian") {
  auto p = Potential::lorentzian();
  PolarGrid g(32, 48);
  auto s = solve_newton(p, 1.0, g);
  auto a = solve_alpha0(s, p, 1.0, g);
  CHECK(a.converged);
  double e = 0;
  for (double r : {0.1, 0.5, 1.0, 3.0, 10.0})
    for (int q = 0; q < 12; ++q) {
      cplx z = std::polar(r, 2 * kPi * q / 12);
      e = std::max(e, std::abs(polar_eval(a.coeffs, z.real(), z.imag()) - lorentzian_alpha0(z, 1.0)));
    }
  CHECK(e < 1e-7);
  CHECK(std::abs(polar_eval(a.coeffs, 1e9, 0) - 1.0) < 1e-9);

  auto w = make_wkb(s, std::move(a.coeffs));
  CHECK(singularity_identity_residual(w, p) < 1e-8);
  // dg matches the closed form d f - k
  cplx z(0.4, -0.3);
  CHECK(std::abs(polar_eval(w.dg, z.real(), z.imag()) - (lorentzian_df(z, 1.0) - 1.0)) < 1e-8);
  CHECK(std::abs(polar_eval(w.dbarg, z.real(), z.imag()) - lorentzian_dbarf(z, 1.0)) < 1e-8);
}

TEST_CASE("alpha0 rejects mismatched inputs") {
  auto p = Potential::gaussian();
  PolarGrid g(16, 16), h(12, 16);
  auto s = solve_newton(p, 1.0, g);
  CHECK_THROWS_AS(solve_alpha0(s, p, 1.0, h), InputError);
  CHECK_THROWS_AS(solve_alpha0(s, p, 0.0, g), InputError);
}

TEST_CASE("interpolation to a cartesian grid") {
  PolarGrid g(24, 16);
  PolarTransform t(g);
  auto c = t.forward(make_field(g, [](double r, double ph) { return std::polar(r, -ph) / (1 + r * r); }));
  CartesianGrid cart(16, 16, 3.0, 3.0);
  auto f = interp_polar_to_cartesian(c, cart);
  for (int i = 0; i < 16; i += 3)
    for (int j = 0; j < 16; j += 5) {
      cplx z(cart.x(i), cart.y(j));
      CHECK(std::abs(f.at(i, j) - std::conj(z) / (1 + std::norm(z))) < 1e-10);
    }
}

TEST_CASE("assembled WKB fields and Delta") {
  auto p = Potential::gaussian();
  PolarGrid g(24, 32);
  cplx k = 1.0;
  auto w = make_wkb(solve_newton(p, k, g), p);
  CartesianGrid cart(32, 32);
  auto on = wkb_on_grid(w, p, cart);
  double eps = 0.25;
  auto f = assemble_wkb(on, eps);
  // psi1 e^{-kz/eps} = alpha0 df/k e^{g/eps}; Delta of the WKB term itself vanishes
  auto d = delta_fields(f.psi1, f.psi2, on, eps);
  CHECK(d.sup1 < 1e-12);
  CHECK(d.sup2 < 1e-12);
  // far away psi1 -> e^{g/eps} with g = O(1/|z|), psi2 -> 0
  CHECK(std::abs(f.psi1.at(0, 0) - std::exp(on.g.at(0, 0) / eps)) < 1e-3);
  CHECK(std::abs(on.g.at(0, 0)) < 0.05);
  CHECK(std::abs(f.psi2.at(0, 0)) < 1e-6);
  CHECK_THROWS_AS(assemble_wkb(on, 0.0), InputError);
  CField wrong(8, 8);
  CHECK_THROWS_AS(delta_fields(wrong, wrong, on, eps), InputError);
}
