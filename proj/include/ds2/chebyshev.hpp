#pragma once

#include <Eigen/Dense>

#include "ds2/types.hpp"

namespace ds2 {

// Gauss-Lobatto nodes l_j = cos(pi j / nc), j = 0..nc
std::vector<double> cheb_nodes(int nc);

// values at cheb_nodes <-> coefficients of sum_m b_m T_m(l)
cvec fct(const cvec& values);
cvec ifct(const cvec& coeffs);
std::vector<double> fct(const std::vector<double>& values);
std::vector<double> ifct(const std::vector<double>& coeffs);

// d/dl on coefficients, (nc+1)x(nc+1)
Eigen::MatrixXd cheb_diff_matrix(int nc);

// multiplication by (l + sign) mapping degree nc to degree nc+1, (nc+2)x(nc+1)
Eigen::MatrixXd mult_by_shifted_l_matrix(int nc, int sign);

// Single-ring coefficient kernels, all of length nc+1.
void cheb_deriv(const cplx* a, cplx* out, int nc);
// out = (l+1) a' + sigma a; exact on polynomials of degree nc
void cheb_euler(const cplx* a, cplx* out, int nc, double sigma);
// out = b / (l + sign), degree nc-1 result (top coefficient zero); returns the
// unused consistency residual, which vanishes when b(-sign) = 0
cplx cheb_div_shifted_l(const cplx* b, cplx* out, int nc, int sign);
cplx cheb_eval(const cplx* a, int nc, double l);
double cheb_eval(const double* a, int nc, double l);

}  // namespace ds2
