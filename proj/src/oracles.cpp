#include "ds2/oracles.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace ds2 {

cplx lorentzian_W(cplx z, cplx k) { return std::conj(z) / (k * (1.0 + std::norm(z))); }

cplx lorentzian_g_of_W(cplx W) {
  if (std::abs(W) < 1e-3) {
    // sum 4^{-n} C_{n-1} W^{2n-1}/(2n-1)
    cplx s = 0.0, w = W, w2 = W * W;
    for (int n = 1; n <= 8; ++n) {
      s += std::ldexp(catalan_real(n - 1), -2 * n) / (2 * n - 1) * w;
      w *= w2;
    }
    return s;
  }
  cplx root = std::sqrt(1.0 - W * W);
  return 0.5 * std::asin(W) + (root - 1.0) / (2.0 * W);
}

cplx lorentzian_f(cplx z, cplx k) { return k * z + lorentzian_g_of_W(lorentzian_W(z, k)); }

cplx lorentzian_df(cplx z, cplx k) {
  cplx W = lorentzian_W(z, k);
  return 0.5 * k * (1.0 + std::sqrt(1.0 - W * W));
}

cplx lorentzian_dbarf(cplx z, cplx k) {
  // (k/2)(1 - sqrt(1-W^2)) / zbar^2 with the cancellation removed
  cplx W = lorentzian_W(z, k);
  const double d = 1.0 + std::norm(z);
  return 1.0 / (2.0 * k * d * d * (1.0 + std::sqrt(1.0 - W * W)));
}

cplx lorentzian_alpha0_of_W(cplx W) {
  cplx root = std::sqrt(1.0 - W * W);
  return std::sqrt(2.0) * std::pow(root * (1.0 + root), -0.5);
}

cplx lorentzian_alpha0(cplx z, cplx k) { return lorentzian_alpha0_of_W(lorentzian_W(z, k)); }

std::vector<cplx> lorentzian_branch_points(cplx k) {
  const double ak = std::abs(k);
  if (!(ak < 0.5) || ak == 0.0) return {};
  const double root = std::sqrt(1.0 - 4.0 * ak * ak);
  std::vector<cplx> pts;
  for (int sgn : {1, -1})
    for (int sigma : {1, -1}) pts.push_back(double(sgn) / (2.0 * k) * (1.0 + sigma * root));
  return pts;
}

double lorentzian_cn(int n, double r) {
  const double q = r / (1.0 + r * r);
  return catalan_real(n) * std::pow(q, 2 * n + 1) / (2.0 * (2 * n + 1));
}

std::uint64_t catalan(int n) {
  if (n < 0 || n > 35) throw InputError("catalan: n out of exact range 0..35");
  std::uint64_t c = 1;
  for (int i = 0; i < n; ++i) {
    // C_{i+1} = C_i 2(2i+1)/(i+2), exact in 128 bits
    unsigned __int128 t = (unsigned __int128)c * (2 * (2 * i + 1));
    c = std::uint64_t(t / (i + 2));
  }
  return c;
}

double catalan_real(int n) {
  if (n < 0) throw InputError("catalan: negative index");
  double c = 1.0;
  for (int i = 0; i < n; ++i) c = c * (2.0 * (2 * i + 1)) / (i + 2);
  return c;
}

double bessel_i1_over_i0(double x) {
  if (x < 0.0) return -bessel_i1_over_i0(-x);
  if (x <= 10.0) {
    const double q = 0.25 * x * x;
    double t0 = 1.0, t1 = 1.0, s0 = 1.0, s1 = 1.0;
    for (int k = 1; k < 200; ++k) {
      t0 *= q / (double(k) * k);
      t1 *= q / (double(k) * (k + 1));
      s0 += t0;
      s1 += t1;
      if (t0 < 1e-17 * s0 && t1 < 1e-17 * s1) break;
    }
    return 0.5 * x * s1 / s0;
  }
  // modified Lentz on I1/I0 = 1/(2/x + 1/(4/x + 1/(6/x + ...)))
  const double tiny = 1e-300;
  double f = tiny, C = f, D = 0.0;
  for (int j = 1; j < 10000; ++j) {
    double b = 2.0 * j / x;
    D = b + D;
    if (D == 0.0) D = tiny;
    C = b + 1.0 / C;
    if (C == 0.0) C = tiny;
    D = 1.0 / D;
    double delta = C * D;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return f;
}

double disk_reflection_k0(double rho, double a0, double eps) {
  if (!(rho > 0.0) || !(eps > 0.0)) throw InputError("disk_reflection_k0: rho, eps must be positive");
  return 2.0 * rho * bessel_i1_over_i0(a0 * rho / eps);
}

std::function<double(double)> radial_k0_eikonal(const Potential& p, int sign) {
  auto prof = p.radial_profile();
  if (!prof) throw InputError("radial_k0_eikonal: potential is not radial");
  const double sg = sign >= 0 ? 1.0 : -1.0;
  if (p.tag() == PotentialTag::disk) {
    const double rho = p.rho(), a0 = p.a0();
    return [=](double m) { return sg * a0 * std::max(0.0, rho - std::sqrt(m)); };
  }
  auto a = *prof;
  // tail check: r A(r^2) must decay
  double far = std::abs(a(1e12)) * 1e6;
  if (!(far < 1e-3)) throw InputError("radial_k0_eikonal: amplitude tail is not integrable");
  return [=](double m) {
    double err = 0.0;
    double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double s) { return a(s * s); }, std::sqrt(m), std::numeric_limits<double>::infinity(), 15,
        1e-14, &err);
    return sg * v;
  };
}

}  // namespace ds2
