#include "ds2/polar.hpp"

#include <cmath>
#include <cstring>
#include <limits>

#include "ds2/gmres.hpp"

namespace ds2 {

PolarGrid::PolarGrid(int nc_, int nphi_) : nc(nc_), nphi(nphi_) {
  if (nc < 2) throw InputError("PolarGrid: nc must be >= 2");
  if (nphi < 2) throw InputError("PolarGrid: nphi must be >= 2");
  l = cheb_nodes(nc);
  x.resize(nc + 1);
  for (int j = 0; j <= nc; ++j) x[j] = 0.5 * (1.0 + l[j]);
  x[nc] = 0.0;
  phi.resize(nphi);
  for (int i = 0; i < nphi; ++i) phi[i] = 2.0 * kPi * i / nphi;
}

double PolarGrid::radius(int d, int j) const {
  if (d == 0) return x[j];
  return x[j] == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / x[j];
}

double SpectralCoeffs::max_abs() const {
  double m = 0.0;
  for (const auto& v : a) m = std::max(m, std::abs(v));
  return m;
}

PolarTransform::PolarTransform(const PolarGrid& g) : g_(g) {
  const int n1 = g.nc + 1, np = g.nphi;
  PolarField f(g);
  SpectralCoeffs c(g);
  auto* fp = reinterpret_cast<fftw_complex*>(f.v.data());
  auto* cp = reinterpret_cast<fftw_complex*>(c.a.data());

  fftw_iodim dim_f{np, 1, n1};
  fftw_iodim hm_f[2] = {{2, n1 * np, np * n1}, {n1, np, 1}};
  fftw_iodim dim_b{np, n1, 1};
  fftw_iodim hm_b[2] = {{2, np * n1, n1 * np}, {n1, 1, np}};

  fftw_iodim dim_c{n1, 2, 2};
  fftw_iodim hm_c[2] = {{2 * np, 2 * n1, 2 * n1}, {2, 1, 1}};
  fftw_r2r_kind kind = FFTW_REDFT00;

  std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  fwd_angle_.reset(fftw_plan_guru_dft(1, &dim_f, 2, hm_f, fp, cp, FFTW_FORWARD, flags));
  inv_angle_.reset(fftw_plan_guru_dft(1, &dim_b, 2, hm_b, cp, fp, FFTW_BACKWARD, flags));
  auto* cd = reinterpret_cast<double*>(c.a.data());
  dct_.reset(fftw_plan_guru_r2r(1, &dim_c, 2, hm_c, cd, cd, &kind, flags));
  if (!fwd_angle_ || !inv_angle_ || !dct_) throw SolverError("PolarTransform: FFTW planning failed");
}

SpectralCoeffs PolarTransform::forward(const PolarField& f) const {
  const int nc = g_.nc, np = g_.nphi;
  SpectralCoeffs c(g_);
  fftw_execute_dft(fwd_angle_.get(),
                   reinterpret_cast<fftw_complex*>(const_cast<cplx*>(f.v.data())),
                   reinterpret_cast<fftw_complex*>(c.a.data()));
  auto* cd = reinterpret_cast<double*>(c.a.data());
  fftw_execute_r2r(dct_.get(), cd, cd);
  const double s = 1.0 / (double(np) * nc);
  for (int d = 0; d < 2; ++d)
    for (int q = 0; q < np; ++q) {
      cplx* r = c.ring(d, q);
      for (int m = 0; m <= nc; ++m) r[m] *= s;
      r[0] *= 0.5;
      r[nc] *= 0.5;
    }
  return c;
}

PolarField PolarTransform::inverse(const SpectralCoeffs& c) const {
  const int nc = g_.nc, np = g_.nphi;
  SpectralCoeffs t = c;
  for (int d = 0; d < 2; ++d)
    for (int q = 0; q < np; ++q) {
      cplx* r = t.ring(d, q);
      r[0] *= 2.0;
      r[nc] *= 2.0;
    }
  auto* td = reinterpret_cast<double*>(t.a.data());
  fftw_execute_r2r(dct_.get(), td, td);
  for (auto& v : t.a) v *= 0.5;
  PolarField f(g_);
  fftw_execute_dft(inv_angle_.get(), reinterpret_cast<fftw_complex*>(t.a.data()),
                   reinterpret_cast<fftw_complex*>(f.v.data()));
  return f;
}

cvec fourier_diff(const cvec& a) {
  const int np = int(a.size());
  cvec out(np);
  for (int q = 0; q < np; ++q) {
    int n = q <= np / 2 ? q : q - np;
    if (np % 2 == 0 && q == np / 2) n = 0;
    out[q] = kI * double(n) * a[q];
  }
  return out;
}

SpectralCoeffs apply_euler(const PolarGrid& g, const SpectralCoeffs& a, int sigma) {
  SpectralCoeffs out(g);
  for (int d = 0; d < 2; ++d)
    for (int q = 0; q < g.nphi; ++q) {
      if (g.nyquist(q)) continue;
      const double c = (d == 0 ? -1.0 : 1.0) * sigma * g.mode(q);
      cheb_euler(a.ring(d, q), out.ring(d, q), g.nc, c);
    }
  return out;
}

PolarField apply_pm(const PolarTransform& t, const SpectralCoeffs& a, int sigma) {
  const PolarGrid& g = t.grid();
  SpectralCoeffs b = apply_euler(g, a, sigma);
  std::vector<cplx> tmp(g.nc + 1);
  for (int q = 0; q < g.nphi; ++q) {
    cplx* r = b.ring(0, q);
    cheb_div_shifted_l(r, tmp.data(), g.nc, +1);
    for (int m = 0; m <= g.nc; ++m) r[m] = 2.0 * tmp[m];
  }
  PolarField f = t.inverse(b);
  for (int j = 0; j <= g.nc; ++j)
    for (int i = 0; i < g.nphi; ++i) f.at(1, j, i) *= -g.x[j];
  return f;
}

PolarField operator*(const PolarField& a, const PolarField& b) {
  PolarField c = a;
  for (size_t i = 0; i < c.v.size(); ++i) c.v[i] *= b.v[i];
  return c;
}

PolarField operator+(const PolarField& a, const PolarField& b) {
  PolarField c = a;
  for (size_t i = 0; i < c.v.size(); ++i) c.v[i] += b.v[i];
  return c;
}

PolarField operator-(const PolarField& a, const PolarField& b) {
  PolarField c = a;
  for (size_t i = 0; i < c.v.size(); ++i) c.v[i] -= b.v[i];
  return c;
}

PolarField scale(const PolarField& a, cplx s) {
  PolarField c = a;
  for (auto& v : c.v) v *= s;
  return c;
}

PolarField rotate(const PolarField& a, int p) {
  PolarField c = a;
  for (int d = 0; d < 2; ++d)
    for (int j = 0; j <= a.nc; ++j)
      for (int i = 0; i < a.nphi; ++i) c.at(d, j, i) *= std::polar(1.0, 2.0 * kPi * p * i / a.nphi);
  return c;
}

PolarField make_field(const PolarGrid& g, const std::function<cplx(double, double)>& fn,
                      cplx at_infinity) {
  PolarField f(g);
  for (int d = 0; d < 2; ++d)
    for (int j = 0; j <= g.nc; ++j)
      for (int i = 0; i < g.nphi; ++i)
        f.at(d, j, i) = (d == 1 && j == g.nc) ? at_infinity : fn(g.radius(d, j), g.phi[i]);
  return f;
}

TauRows tau_rows(int n) {
  if (n > 0) return {0, false};
  if (n < 0) return {1, false};
  return {0, true};
}

ModeTau::ModeTau(int nc, int n) : nc_(nc), n_(n) {
  const int n1 = nc + 1;
  Eigen::MatrixXd E =
      mult_by_shifted_l_matrix(nc, +1).topRows(n1) * cheb_diff_matrix(nc);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * n1, 2 * n1);
  A.block(0, 0, n1, n1) = E - double(n) * Eigen::MatrixXd::Identity(n1, n1);
  A.block(n1, n1, n1, n1) = E + double(n) * Eigen::MatrixXd::Identity(n1, n1);
  TauRows t = tau_rows(n);
  int crow = t.continuity_domain * n1 + nc;
  A.row(crow).setZero();
  for (int m = 0; m < n1; ++m) {
    A(crow, m) = 1.0;
    A(crow, n1 + m) = -1.0;
  }
  if (t.decay_row) {
    int drow = n1 + nc;
    A.row(drow).setZero();
    for (int m = 0; m < n1; ++m) A(drow, n1 + m) = (m % 2 == 0) ? 1.0 : -1.0;
  }
  lu_.compute(A);
}

void ModeTau::solve(const cplx* rhs, cplx* out) const {
  const int sz = 2 * (nc_ + 1);
  Eigen::MatrixXd b(sz, 2);
  for (int i = 0; i < sz; ++i) {
    b(i, 0) = rhs[i].real();
    b(i, 1) = rhs[i].imag();
  }
  Eigen::MatrixXd x = lu_.solve(b);
  for (int i = 0; i < sz; ++i) out[i] = cplx(x(i, 0), x(i, 1));
}

TauSolver::TauSolver(const PolarGrid& g) : g_(g) {
  modes_.resize(g.nphi);
  for (int q = 0; q < g.nphi; ++q)
    if (!g.nyquist(q)) modes_[q] = std::make_unique<ModeTau>(g.nc, g.mode(q));
}

SpectralCoeffs TauSolver::solve(const SpectralCoeffs& rows, cplx kappa) const {
  const int n1 = g_.nc + 1;
  SpectralCoeffs out(g_);
  std::vector<cplx> rhs(2 * n1), x(2 * n1);
  for (int q = 0; q < g_.nphi; ++q) {
    if (g_.nyquist(q)) {
      for (int d = 0; d < 2; ++d)
        std::memcpy(out.ring(d, q), rows.ring(d, q), sizeof(cplx) * n1);
      continue;
    }
    TauRows t = tau_rows(g_.mode(q));
    for (int d = 0; d < 2; ++d)
      for (int m = 0; m < n1; ++m) rhs[d * n1 + m] = rows.at(d, q, m) / kappa;
    rhs[t.continuity_domain * n1 + g_.nc] = rows.at(t.continuity_domain, q, g_.nc);
    if (t.decay_row) rhs[n1 + g_.nc] = rows.at(1, q, g_.nc);
    modes_[q]->solve(rhs.data(), x.data());
    for (int d = 0; d < 2; ++d)
      for (int m = 0; m < n1; ++m) out.at(d, q, m) = x[d * n1 + m];
  }
  return out;
}

cplx continuity_jump(const cplx* r0, const cplx* r1, int nc) {
  cplx s = 0.0;
  for (int m = 0; m <= nc; ++m) s += r0[m] - r1[m];
  return s;
}

cplx value_at_s0(const cplx* r1, int nc) {
  cplx s = 0.0;
  for (int m = 0; m <= nc; ++m) s += (m % 2 == 0) ? r1[m] : -r1[m];
  return s;
}

void impose_matching(const PolarGrid& g, const SpectralCoeffs& a, SpectralCoeffs& rows) {
  for (int q = 0; q < g.nphi; ++q) {
    if (g.nyquist(q)) {
      for (int d = 0; d < 2; ++d)
        std::memcpy(rows.ring(d, q), a.ring(d, q), sizeof(cplx) * (g.nc + 1));
      continue;
    }
    TauRows t = tau_rows(g.mode(q));
    rows.at(t.continuity_domain, q, g.nc) = continuity_jump(a.ring(0, q), a.ring(1, q), g.nc);
    if (t.decay_row) rows.at(1, q, g.nc) = value_at_s0(a.ring(1, q), g.nc);
  }
}

namespace {

PolarField row_scaled(const PolarGrid& g, const PolarField& e, bool extrapolate_s0) {
  PolarField s = e;
  for (int j = 0; j <= g.nc; ++j)
    for (int i = 0; i < g.nphi; ++i) {
      s.at(0, j, i) *= g.x[j];
      s.at(1, j, i) = g.x[j] == 0.0 ? cplx(0.0) : -e.at(1, j, i) / g.x[j];
    }
  if (!extrapolate_s0) return s;
  // -E/s at s = 0 is the limit of the interpolant through the other nodes:
  // with Lobatto barycentric weights w_j = (-1)^j d_j this is
  // sum w_j f_j / sum w_j over j < nc
  double wsum = 0.0;
  std::vector<double> w(g.nc);
  for (int j = 0; j < g.nc; ++j) {
    w[j] = (j % 2 ? -1.0 : 1.0) * (j == 0 ? 0.5 : 1.0);
    wsum += w[j];
  }
  for (int i = 0; i < g.nphi; ++i) {
    cplx acc = 0.0;
    for (int j = 0; j < g.nc; ++j) acc += w[j] * s.at(1, j, i);
    s.at(1, g.nc, i) = acc / wsum;
  }
  return s;
}

}  // namespace

SpectralCoeffs residual_rows(const PolarTransform& t, const PolarField& e, bool extrapolate_s0) {
  return t.forward(row_scaled(t.grid(), e, extrapolate_s0));
}

PolarLinearOp::PolarLinearOp(const PolarTransform& t, PolarField cP, PolarField cM, PolarField c0,
                             bool extrapolate_s0)
    : t_(t), cP_(std::move(cP)), cM_(std::move(cM)) {
  for (const auto& v : c0.v)
    if (v != cplx(0.0)) has_c0_ = true;
  if (has_c0_) c0s_ = row_scaled(t.grid(), c0, extrapolate_s0);
}

SpectralCoeffs PolarLinearOp::apply(const SpectralCoeffs& x) const {
  const PolarGrid& g = t_.grid();
  PolarField w = cP_ * t_.inverse(apply_euler(g, x, +1));
  PolarField m = cM_ * t_.inverse(apply_euler(g, x, -1));
  for (size_t i = 0; i < w.v.size(); ++i) w.v[i] += m.v[i];
  if (has_c0_) {
    PolarField xv = t_.inverse(x);
    for (size_t i = 0; i < w.v.size(); ++i) w.v[i] += c0s_.v[i] * xv.v[i];
  }
  SpectralCoeffs rows = t_.forward(w);
  impose_matching(g, x, rows);
  return rows;
}

SpectralCoeffs solve_polar_linear(const PolarLinearOp& op, const TauSolver& pre, cplx kappa,
                                  const SpectralCoeffs& rhs, double tol, int max_iter,
                                  PolarSolveStats* stats) {
  const int nc = rhs.nc, np = rhs.nphi;
  auto to_coeffs = [&](const std::vector<double>& v) {
    SpectralCoeffs c(nc, np);
    std::memcpy(static_cast<void*>(c.a.data()), v.data(), sizeof(double) * v.size());
    return c;
  };
  auto to_vec = [](const SpectralCoeffs& c, std::vector<double>& v) {
    v.resize(2 * c.a.size());
    std::memcpy(v.data(), c.a.data(), sizeof(double) * v.size());
  };
  RealOp A = [&](const std::vector<double>& in, std::vector<double>& out) {
    to_vec(op.apply(to_coeffs(in)), out);
  };
  RealOp M = [&](const std::vector<double>& in, std::vector<double>& out) {
    to_vec(pre.solve(to_coeffs(in), kappa), out);
  };
  std::vector<double> b;
  to_vec(rhs, b);
  GmresOptions opt;
  opt.tol = tol;
  opt.restart = std::min(max_iter, 60);
  opt.max_iter = max_iter;
  GmresResult r = gmres_real_linear(A, b, opt, &M);
  if (stats) {
    stats->iterations = r.iterations;
    stats->rel_residual = r.rel_residual;
    stats->converged = r.converged;
  }
  return to_coeffs(r.x);
}

cplx polar_eval(const SpectralCoeffs& c, double x, double y) {
  const double r = std::hypot(x, y);
  const double phi = std::atan2(y, x);
  int d = r <= 1.0 ? 0 : 1;
  double l = d == 0 ? 2.0 * r - 1.0 : 2.0 / r - 1.0;
  cplx sum = 0.0;
  for (int q = 0; q < c.nphi; ++q) {
    if (c.nphi % 2 == 0 && q == c.nphi / 2) continue;
    int n = q <= c.nphi / 2 ? q : q - c.nphi;
    sum += cheb_eval(c.ring(d, q), c.nc, l) * std::polar(1.0, n * phi);
  }
  return sum;
}

void filter_coeffs(SpectralCoeffs& c, double tol) {
  for (auto& v : c.a)
    if (std::abs(v) < tol) v = 0.0;
}

}  // namespace ds2
