#include "ds2/chebyshev.hpp"

#include <cmath>

#include "ds2/fftw_util.hpp"

namespace ds2 {

namespace detail {
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

std::vector<double> cheb_nodes(int nc) {
  if (nc < 1) throw InputError("cheb_nodes: nc must be >= 1");
  std::vector<double> l(nc + 1);
  for (int j = 0; j <= nc; ++j) l[j] = std::cos(kPi * j / nc);
  // exact symmetric values
  for (int j = 0; j <= nc; ++j) {
    if (2 * j == nc) l[j] = 0.0;
    if (j > nc - j) l[j] = -l[nc - j];
  }
  return l;
}

namespace {

// DCT-I on a strided real sequence of length n = nc+1
void dct1(double* data, int n, int stride, int count, int dist) {
  fftw_iodim dim{n, stride, stride};
  fftw_iodim hm{count, dist, dist};
  fftw_r2r_kind kind = FFTW_REDFT00;
  detail::Plan plan;
  {
    std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
    plan.reset(fftw_plan_guru_r2r(1, &dim, 1, &hm, data, data, &kind,
                                  FFTW_ESTIMATE | FFTW_UNALIGNED));
  }
  fftw_execute_r2r(plan.get(), data, data);
}

void fct_inplace(double* d, int n, int stride, int count, int dist) {
  const int nc = n - 1;
  dct1(d, n, stride, count, dist);
  for (int c = 0; c < count; ++c) {
    double* p = d + c * dist;
    for (int m = 0; m <= nc; ++m) p[m * stride] /= nc;
    p[0] *= 0.5;
    p[nc * stride] *= 0.5;
  }
}

void ifct_inplace(double* d, int n, int stride, int count, int dist) {
  const int nc = n - 1;
  for (int c = 0; c < count; ++c) {
    double* p = d + c * dist;
    p[0] *= 2.0;
    p[nc * stride] *= 2.0;
  }
  dct1(d, n, stride, count, dist);
  for (int c = 0; c < count; ++c) {
    double* p = d + c * dist;
    for (int m = 0; m <= nc; ++m) p[m * stride] *= 0.5;
  }
}

}  // namespace

cvec fct(const cvec& values) {
  if (values.size() < 2) throw InputError("fct: need at least two nodes");
  cvec out = values;
  fct_inplace(reinterpret_cast<double*>(out.data()), int(out.size()), 2, 2, 1);
  return out;
}

cvec ifct(const cvec& coeffs) {
  if (coeffs.size() < 2) throw InputError("ifct: need at least two coefficients");
  cvec out = coeffs;
  ifct_inplace(reinterpret_cast<double*>(out.data()), int(out.size()), 2, 2, 1);
  return out;
}

std::vector<double> fct(const std::vector<double>& values) {
  if (values.size() < 2) throw InputError("fct: need at least two nodes");
  auto out = values;
  fct_inplace(out.data(), int(out.size()), 1, 1, 0);
  return out;
}

std::vector<double> ifct(const std::vector<double>& coeffs) {
  if (coeffs.size() < 2) throw InputError("ifct: need at least two coefficients");
  auto out = coeffs;
  ifct_inplace(out.data(), int(out.size()), 1, 1, 0);
  return out;
}

Eigen::MatrixXd cheb_diff_matrix(int nc) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nc + 1, nc + 1);
  // column k holds the coefficients of T_k'
  for (int k = 1; k <= nc; ++k) {
    for (int m = k - 1; m >= 0; m -= 2) D(m, k) = (m == 0 ? 1.0 : 2.0) * k;
  }
  return D;
}

Eigen::MatrixXd mult_by_shifted_l_matrix(int nc, int sign) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(nc + 2, nc + 1);
  for (int k = 0; k <= nc; ++k) {
    M(k, k) += sign;
    if (k == 0) {
      M(1, 0) += 1.0;
    } else {
      M(k + 1, k) += 0.5;
      M(k - 1, k) += 0.5;
    }
  }
  return M;
}

void cheb_deriv(const cplx* a, cplx* out, int nc) {
  std::vector<cplx> c(nc + 2, 0.0);
  for (int m = nc; m >= 1; --m) c[m - 1] = c[m + 1] + 2.0 * double(m) * a[m];
  c[0] *= 0.5;
  for (int m = 0; m <= nc; ++m) out[m] = c[m];
}

void cheb_euler(const cplx* a, cplx* out, int nc, double sigma) {
  std::vector<cplx> d(nc + 2, 0.0);
  cheb_deriv(a, d.data(), nc);
  for (int m = 0; m <= nc; ++m) {
    cplx ld;
    if (m == 0)
      ld = 0.5 * d[1];
    else if (m == 1)
      ld = d[0] + 0.5 * d[2];
    else
      ld = 0.5 * (d[m - 1] + d[m + 1]);
    out[m] = d[m] + ld + sigma * a[m];
  }
}

cplx cheb_div_shifted_l(const cplx* b, cplx* out, int nc, int sign) {
  const double s = sign;
  std::vector<cplx> c(nc + 2, 0.0);
  for (int m = nc; m >= 2; --m) c[m - 1] = 2.0 * (b[m] - s * c[m] - 0.5 * c[m + 1]);
  c[0] = b[1] - s * c[1] - 0.5 * c[2];
  cplx resid = b[0] - s * c[0] - 0.5 * c[1];
  for (int m = 0; m <= nc; ++m) out[m] = c[m];
  return resid;
}

cplx cheb_eval(const cplx* a, int nc, double l) {
  cplx b1 = 0.0, b2 = 0.0;
  for (int m = nc; m >= 1; --m) {
    cplx t = 2.0 * l * b1 - b2 + a[m];
    b2 = b1;
    b1 = t;
  }
  return a[0] + l * b1 - b2;
}

double cheb_eval(const double* a, int nc, double l) {
  double b1 = 0.0, b2 = 0.0;
  for (int m = nc; m >= 1; --m) {
    double t = 2.0 * l * b1 - b2 + a[m];
    b2 = b1;
    b1 = t;
  }
  return a[0] + l * b1 - b2;
}

}  // namespace ds2
