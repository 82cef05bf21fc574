#pragma once

#include <string>

#include "ds2/polar.hpp"
#include "ds2/potential.hpp"

namespace ds2 {

enum class EikonalMethod { fixed_point, newton, series };
const char* method_name(EikonalMethod m);

// g = f - kz on the two-domain polar grid
struct EikonalSolution {
  PolarGrid grid;
  SpectralCoeffs coeffs;
  cplx k = 1.0;
  EikonalMethod method = EikonalMethod::fixed_point;
  int iterations = 0;
  double residual_sup = 0.0;
  bool converged = false;
  std::vector<double> history;  // ||delta a||_inf per iteration
  int linear_iterations = 0;    // inner GMRES iterations (Newton)
  double filter_threshold = 0.0; // coefficients below this were zeroed
};

EikonalSolution solve_fixed_point(const Potential& p, cplx k, const PolarGrid& grid, double tol = 1e-10,
                                  int max_iter = 100);
EikonalSolution solve_newton(const Potential& p, cplx k, const PolarGrid& grid, double tol = 1e-10,
                             int max_iter = 30);

// sup over grid nodes (except r = 0) of |P g M g + 2k e^{i phi} P g - A^2|
double check_residual(const EikonalSolution& sol, const Potential& p, cplx k);
// residual evaluated for arbitrary coefficients
double eikonal_residual(const PolarTransform& t, const SpectralCoeffs& a, const Potential& p, cplx k);

// Coefficient functions c_n(r) of g = sum_n c_n (2k)^{-(2n+1)} e^{-i(2n+1)phi}
// for radial amplitudes; each c_n stored as Chebyshev coefficients on both
// domains ([domain 0 | domain 1], nc+1 each).
struct RadialSeries {
  int nc = 0;
  std::vector<cvec> c;
  std::vector<double> sup_norms;
  bool truncated = false;  // stopped at the floating point floor
  std::string warning;

  double eval(int n, double r) const;
};

RadialSeries solve_radial_series(const Potential& p, int nc, int n_terms);
EikonalSolution series_to_solution(const RadialSeries& s, cplx k, const PolarGrid& grid);

struct ThresholdFit {
  double k_crit = 0.0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  // same regression with log10 norms on the left (ln n kept on the right)
  double alpha10 = 0.0, beta10 = 0.0, gamma10 = 0.0;
  int n_min = 0, n_max = 0;
};
// least squares of ln||c_n|| = -alpha n - beta ln n - gamma over n > n_min
ThresholdFit estimate_threshold(const RadialSeries& s, int n_min = 20);
ThresholdFit estimate_threshold(const std::vector<double>& sup_norms, int n_min = 20);
// slope of ln||c_n|| against ln n over n_min < n
double loglog_slope(const std::vector<double>& sup_norms, int n_min = 20);

// analytic polar field helpers
PolarField amplitude_field(const PolarGrid& g, const Potential& p);
SpectralCoeffs coeffs_of(const PolarTransform& t, const std::function<cplx(double, double)>& fn,
                         cplx at_infinity = 0.0);

}  // namespace ds2
