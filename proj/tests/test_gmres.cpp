#include <doctest.h>

#include <Eigen/Dense>

#include "ds2/gmres.hpp"
#include "ds2/types.hpp"

using namespace ds2;

TEST_CASE("gmres solves a nonsymmetric system") {
  const int n = 60;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n) * 4;
  for (int i = 0; i < n; ++i) {
    if (i + 1 < n) A(i, i + 1) = 1.3;
    if (i > 0) A(i, i - 1) = -0.7;
    A(i, (i * 7) % n) += 0.2;
  }
  Eigen::VectorXd xt = Eigen::VectorXd::LinSpaced(n, -1, 2);
  Eigen::VectorXd b = A * xt;
  RealOp op = [&](const std::vector<double>& in, std::vector<double>& out) {
    Eigen::Map<const Eigen::VectorXd> x(in.data(), n);
    out.resize(n);
    Eigen::Map<Eigen::VectorXd>(out.data(), n) = A * x;
  };
  GmresOptions opt;
  opt.tol = 1e-12;
  opt.restart = 10;
  auto r = gmres_real_linear(op, std::vector<double>(b.data(), b.data() + n), opt);
  CHECK(r.converged);
  CHECK(r.rel_residual <= 1e-12);
  CHECK(r.history.size() == size_t(r.iterations));
  for (int i = 0; i < n; ++i) CHECK(r.x[i] == doctest::Approx(xt(i)).epsilon(1e-9));

  // a right preconditioner by the diagonal needs no more iterations
  RealOp pre = [&](const std::vector<double>& in, std::vector<double>& out) {
    out.resize(n);
    for (int i = 0; i < n; ++i) out[i] = in[i] / A(i, i);
  };
  auto rp = gmres_real_linear(op, std::vector<double>(b.data(), b.data() + n), opt, &pre);
  CHECK(rp.converged);
  CHECK(rp.iterations <= r.iterations);
}

TEST_CASE("gmres on an R-linear operator with conjugation") {
  // x -> x + 0.5 conj(c x) over complex entries stored as (re, im)
  const int n = 20;
  cvec c(n);
  for (int i = 0; i < n; ++i) c[i] = std::polar(0.9, 0.3 * i);
  auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
    out.resize(in.size());
    for (int i = 0; i < n; ++i) {
      cplx x(in[2 * i], in[2 * i + 1]);
      cplx y = x + 0.5 * std::conj(c[i] * x);
      out[2 * i] = y.real();
      out[2 * i + 1] = y.imag();
    }
  };
  std::vector<double> xt(2 * n), b;
  for (int i = 0; i < 2 * n; ++i) xt[i] = std::sin(i + 1.0);
  apply(xt, b);
  auto r = gmres_real_linear(apply, b, GmresOptions{1e-13, 50, 100});
  CHECK(r.converged);
  for (int i = 0; i < 2 * n; ++i) CHECK(r.x[i] == doctest::Approx(xt[i]).epsilon(1e-10));
}

TEST_CASE("gmres edge cases") {
  RealOp id = [](const std::vector<double>& in, std::vector<double>& out) { out = in; };
  auto z = gmres_real_linear(id, std::vector<double>(5, 0.0), GmresOptions{});
  CHECK(z.converged);
  CHECK(z.iterations == 0);
  // iteration cap is respected
  RealOp rot = [](const std::vector<double>& in, std::vector<double>& out) {
    size_t n = in.size();
    out.resize(n);
    for (size_t i = 0; i < n; ++i) out[i] = in[(i + 1) % n];
  };
  std::vector<double> b(50, 0.0);
  b[0] = 1;
  auto r = gmres_real_linear(rot, b, GmresOptions{1e-12, 5, 12});
  CHECK_FALSE(r.converged);
  CHECK(r.iterations <= 12);
}
