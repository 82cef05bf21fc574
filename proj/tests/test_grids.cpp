#include <doctest.h>

#include <cmath>

#include "ds2/cartesian.hpp"
#include "ds2/chebyshev.hpp"
#include "ds2/polar.hpp"

using namespace ds2;

namespace {

double max_abs(const cvec& a, const cvec& b) {
  double e = 0;
  for (size_t i = 0; i < a.size(); ++i) e = std::max(e, std::abs(a[i] - b[i]));
  return e;
}

// u = zbar / (1 + |z|^2): dbar u = 1/(1+|z|^2)^2, d u = -zbar^2/(1+|z|^2)^2
cplx test_u(double r, double phi) { return std::polar(r, -phi) / (1 + r * r); }

}  // namespace

TEST_CASE("chebyshev nodes and transforms") {
  auto l = cheb_nodes(4);
  REQUIRE(l.size() == 5);
  for (int j = 0; j <= 4; ++j) CHECK(l[j] == doctest::Approx(std::cos(kPi * j / 4)));

  int nc = 12;
  auto x = cheb_nodes(nc);
  std::vector<double> t3(nc + 1);
  for (int j = 0; j <= nc; ++j) t3[j] = 4 * std::pow(x[j], 3) - 3 * x[j];
  auto b = fct(t3);
  for (int m = 0; m <= nc; ++m) CHECK(b[m] == doctest::Approx(m == 3 ? 1.0 : 0.0).epsilon(1e-14));

  cvec v(nc + 1);
  for (int j = 0; j <= nc; ++j) v[j] = cplx(std::exp(x[j]), std::sin(2 * x[j]));
  CHECK(max_abs(ifct(fct(v)), v) < 1e-14);
  CHECK(cheb_eval(fct(v).data(), nc, 0.3).real() == doctest::Approx(std::exp(0.3)).epsilon(1e-12));
}

TEST_CASE("chebyshev differentiation and multiplication") {
  int nc = 8;
  auto D = cheb_diff_matrix(nc);
  Eigen::VectorXd t2 = Eigen::VectorXd::Zero(nc + 1);
  t2(2) = 1;  // T_2' = 4 T_1
  Eigen::VectorXd d = D * t2;
  for (int m = 0; m <= nc; ++m) CHECK(d(m) == doctest::Approx(m == 1 ? 4.0 : 0.0));

  auto Mp = mult_by_shifted_l_matrix(nc, +1);
  CHECK(Mp.rows() == nc + 2);
  Eigen::VectorXd t0 = Eigen::VectorXd::Zero(nc + 1);
  t0(0) = 1;
  Eigen::VectorXd m = Mp * t0;  // (l + 1) T_0 = T_0 + T_1
  CHECK(m(0) == doctest::Approx(1.0));
  CHECK(m(1) == doctest::Approx(1.0));
  CHECK(m.tail(nc).norm() == 0.0);

  // cheb_deriv agrees with the matrix
  cvec a(nc + 1), out(nc + 1);
  for (int i = 0; i <= nc; ++i) a[i] = cplx(1.0 / (i + 1), 0.5 * i);
  cheb_deriv(a.data(), out.data(), nc);
  Eigen::VectorXd re(nc + 1), im(nc + 1);
  for (int i = 0; i <= nc; ++i) {
    re(i) = a[i].real();
    im(i) = a[i].imag();
  }
  Eigen::VectorXd dre = D * re, dim = D * im;
  for (int i = 0; i <= nc; ++i) CHECK(std::abs(out[i] - cplx(dre(i), dim(i))) < 1e-12);

  // division by (l + 1) inverts multiplication when b(-1) = 0
  cvec b(nc + 1, 0.0), q(nc + 1);
  b[0] = 1;
  b[1] = 1;  // 1 + l
  cplx resid = cheb_div_shifted_l(b.data(), q.data(), nc, +1);
  CHECK(std::abs(resid) < 1e-14);
  CHECK(std::abs(q[0] - 1.0) < 1e-14);
}

TEST_CASE("fourier_diff zeroes the nyquist mode") {
  cvec a = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  auto d = fourier_diff(a);
  CHECK(std::abs(d[0]) == 0.0);
  CHECK(std::abs(d[1] - kI * 2.0) < 1e-15);
  CHECK(std::abs(d[2] - 2.0 * kI * 3.0) < 1e-15);
  CHECK(std::abs(d[3]) == 0.0);
  CHECK(std::abs(d[4] - (-2.0) * kI * 5.0) < 1e-15);
  CHECK(std::abs(d[5] - (-1.0) * kI * 6.0) < 1e-15);
}

TEST_CASE("polar transform round trip and evaluation") {
  PolarGrid g(24, 16);
  PolarTransform t(g);
  PolarField f = make_field(g, test_u);
  auto c = t.forward(f);
  auto back = t.inverse(c);
  CHECK(max_abs(back.v, f.v) < 1e-13);
  for (auto [x, y] : {std::pair{0.3, 0.2}, {-1.7, 0.4}, {5.0, -8.0}}) {
    double r = std::hypot(x, y), ph = std::atan2(y, x);
    CHECK(std::abs(polar_eval(c, x, y) - test_u(r, ph)) < 1e-10);
  }
  CHECK(g.radius(0, g.nc) == 0.0);
  CHECK(std::isinf(g.radius(1, g.nc)));
  CHECK(g.radius(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("polar P and M operators") {
  PolarGrid g(32, 16);
  PolarTransform t(g);
  auto c = t.forward(make_field(g, test_u));
  // P = 2 e^{-i phi} dbar, M = 2 e^{i phi} d
  auto P = apply_pm(t, c, +1), M = apply_pm(t, c, -1);
  auto Pref = make_field(g, [](double r, double ph) { return 2.0 * std::polar(1.0, -ph) / std::pow(1 + r * r, 2); });
  auto Mref = make_field(g, [](double r, double ph) { return -2.0 * r * r * std::polar(1.0, -ph) / std::pow(1 + r * r, 2); });
  double eP = 0, eM = 0;
  for (int d = 0; d < 2; ++d)
    for (int j = 0; j <= g.nc; ++j) {
      if (d == 1 && j == g.nc) continue;
      for (int i = 0; i < g.nphi; ++i) {
        eP = std::max(eP, std::abs(P.at(d, j, i) - Pref.at(d, j, i)));
        eM = std::max(eM, std::abs(M.at(d, j, i) - Mref.at(d, j, i)));
      }
    }
  CHECK(eP < 1e-10);
  CHECK(eM < 1e-10);
}

TEST_CASE("tau solver inverts kappa P on decaying fields") {
  PolarGrid g(28, 16);
  PolarTransform t(g);
  TauSolver tau(g);
  auto u = t.forward(make_field(g, test_u));
  cplx kappa(1.5, 0.5);
  PolarField e = scale(apply_pm(t, u, +1), kappa);
  SpectralCoeffs rows = residual_rows(t, e);
  impose_matching(g, SpectralCoeffs(g), rows);
  auto sol = tau.solve(rows, kappa);
  CHECK(max_abs(sol.a, u.a) < 1e-10);
  CHECK(std::abs(continuity_jump(sol.ring(0, 1), sol.ring(1, 1), g.nc)) < 1e-12);
}

TEST_CASE("polar linear operator with GMRES") {
  PolarGrid g(24, 16);
  PolarTransform t(g);
  TauSolver tau(g);
  cplx k = 1.0;
  // (2k + e^{-i phi} zbar-ish perturbation) P x = rhs
  PolarField cP = make_field(g, [&](double r, double) { return 2.0 * k + 0.3 / (1 + r * r); }, 2.0 * k);
  PolarField cM(g), c0(g);
  PolarLinearOp op(t, cP, cM, c0);
  auto u = t.forward(make_field(g, test_u));
  auto rhs = op.apply(u);
  PolarSolveStats st;
  auto x = solve_polar_linear(op, tau, 2.0 * k, rhs, 1e-13, 100, &st);
  CHECK(st.converged);
  CHECK(max_abs(x.a, u.a) < 1e-9);
}

TEST_CASE("filter_coeffs and max_abs") {
  SpectralCoeffs c(4, 4);
  c.at(0, 1, 2) = 1e-16;
  c.at(1, 0, 0) = 2.0;
  filter_coeffs(c, 1e-14);
  CHECK(c.at(0, 1, 2) == cplx(0.0));
  CHECK(c.max_abs() == 2.0);
}

TEST_CASE("cartesian fft is the unitary continuous transform") {
  CartesianGrid g(64, 64, 4 * kPi, 4 * kPi);
  CartesianFFT fft(g);
  auto u = sample(g, [](double x, double y) { return std::exp(-(x * x + y * y) / 2); });
  auto uh = fft.forward(u);
  double e = 0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double xi2 = std::pow(g.xi_x(i), 2) + std::pow(g.xi_y(j), 2);
      e = std::max(e, std::abs(uh.at(i, j) - std::exp(-xi2 / 2)));
    }
  CHECK(e < 1e-12);
  CHECK(max_abs(fft.inverse(uh).v, u.v) < 1e-14);
  CHECK(g.x(0) == doctest::Approx(-4 * kPi));
  CHECK(g.xi_x(g.nx - 1) == doctest::Approx(-0.25));
}

TEST_CASE("wiener norm estimate") {
  CartesianGrid g(64, 64, 4 * kPi, 4 * kPi);
  auto u = sample(g, [](double x, double y) { return std::exp(-(x * x + y * y) / 2); });
  auto w = wiener_norm_estimate(g, u);
  CHECK(w.decaying);
  CHECK(w.norm > 0);
  auto doubled = wiener_norm_estimate(g, sample(g, [](double x, double y) { return 2 * std::exp(-(x * x + y * y) / 2); }));
  CHECK(doubled.norm == doctest::Approx(2 * w.norm));
  CHECK_FALSE(wiener_norm_estimate(g, sample(g, [](double, double) { return 1.0; })).decaying);
}
