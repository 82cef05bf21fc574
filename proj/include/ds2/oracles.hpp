#pragma once

#include <cstdint>
#include <functional>

#include "ds2/potential.hpp"
#include "ds2/types.hpp"

namespace ds2 {

// Closed forms for A = 1/(1+|z|^2) with zero phase.
cplx lorentzian_W(cplx z, cplx k);
// exact exponent f (so f - kz -> 0 at infinity)
cplx lorentzian_f(cplx z, cplx k);
// g = f - kz as a function of W
cplx lorentzian_g_of_W(cplx W);
cplx lorentzian_df(cplx z, cplx k);     // \partial f
cplx lorentzian_dbarf(cplx z, cplx k);  // \bar\partial f
cplx lorentzian_alpha0(cplx z, cplx k);
cplx lorentzian_alpha0_of_W(cplx W);
// Points where W = +-1: +-(1/(2k))(1 + sigma sqrt(1-4|k|^2)); empty for |k| >= 1/2.
std::vector<cplx> lorentzian_branch_points(cplx k);
// radial series coefficient c_n(r) = C_n r^{2n+1} / (2(2n+1)(1+r^2)^{2n+1})
double lorentzian_cn(int n, double r);

std::uint64_t catalan(int n);  // exact up to n = 35
double catalan_real(int n);

double bessel_i1_over_i0(double x);
// reflection coefficient at k = 0 for the disk potential
double disk_reflection_k0(double rho, double a0, double eps);

// F(m) = sign * \int_{sqrt m}^\infty a(s^2) ds for a radial potential
std::function<double(double)> radial_k0_eikonal(const Potential& p, int sign);

}  // namespace ds2
