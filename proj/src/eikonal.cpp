#include "ds2/eikonal.hpp"

#include <cmath>
#include <sstream>

namespace ds2 {

const char* method_name(EikonalMethod m) {
  switch (m) {
    case EikonalMethod::fixed_point: return "fixed_point";
    case EikonalMethod::newton: return "newton";
    case EikonalMethod::series: return "series";
  }
  return "?";
}

PolarField amplitude_field(const PolarGrid& g, const Potential& p) {
  return make_field(g, [&](double r, double phi) {
    return cplx(p.amplitude(r * std::cos(phi), r * std::sin(phi)));
  });
}

SpectralCoeffs coeffs_of(const PolarTransform& t, const std::function<cplx(double, double)>& fn,
                         cplx at_infinity) {
  return t.forward(make_field(t.grid(), fn, at_infinity));
}

namespace {

void check_inputs(const Potential& p, cplx k) {
  if (k == cplx(0.0)) throw InputError("eikonal: k = 0 is not allowed");
  if (!p.smooth()) throw InputError("eikonal: discontinuous potentials are not supported");
}

double max_diff(const SpectralCoeffs& a, const SpectralCoeffs& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.a.size(); ++i) m = std::max(m, std::abs(a.a[i] - b.a[i]));
  return m;
}

bool all_zero(const SpectralCoeffs& a) {
  for (const auto& v : a.a)
    if (v != cplx(0.0)) return false;
  return true;
}

void finish(EikonalSolution& sol, const PolarTransform& t, const Potential& p, double tol) {
  // Zero coefficients below a threshold, starting at tol and lowering it
  // while the filter costs more than 10 tol in residual. Derivatives near
  // r = 0 amplify the top Chebyshev modes by roughly nc^4.
  double base = eikonal_residual(t, sol.coeffs, p, sol.k);
  sol.residual_sup = base;
  sol.filter_threshold = 0.0;
  for (double thr = tol; thr >= tol * 1e-6; thr *= 0.1) {
    SpectralCoeffs c = sol.coeffs;
    filter_coeffs(c, thr);
    double res = eikonal_residual(t, c, p, sol.k);
    if (res <= base + 10.0 * tol) {
      sol.coeffs = std::move(c);
      sol.residual_sup = res;
      sol.filter_threshold = thr;
      return;
    }
  }
}

}  // namespace

double eikonal_residual(const PolarTransform& t, const SpectralCoeffs& a, const Potential& p, cplx k) {
  const PolarGrid& g = t.grid();
  PolarField A = amplitude_field(g, p);
  PolarField P = apply_pm(t, a, +1), M = apply_pm(t, a, -1);
  PolarField eP = rotate(P, +1);
  double res = 0.0;
  for (int d = 0; d < 2; ++d)
    for (int j = 0; j <= g.nc; ++j) {
      if (d == 0 && j == g.nc) continue;
      for (int i = 0; i < g.nphi; ++i) {
        cplx e = P.at(d, j, i) * M.at(d, j, i) + 2.0 * k * eP.at(d, j, i) -
                 A.at(d, j, i) * A.at(d, j, i);
        res = std::max(res, std::abs(e));
      }
    }
  return res;
}

double check_residual(const EikonalSolution& sol, const Potential& p, cplx k) {
  PolarTransform t(sol.grid);
  return eikonal_residual(t, sol.coeffs, p, k);
}

EikonalSolution solve_fixed_point(const Potential& p, cplx k, const PolarGrid& grid, double tol,
                                  int max_iter) {
  check_inputs(p, k);
  PolarTransform t(grid);
  TauSolver tau(grid);
  PolarField A = amplitude_field(grid, p);
  PolarField A2 = A * A;
  SpectralCoeffs zero(grid);

  // 2k P a_new = e^{-i phi} (A^2 - P a M a)
  auto step = [&](const SpectralCoeffs& a) {
    PolarField e = all_zero(a) ? A2 : A2 - apply_pm(t, a, +1) * apply_pm(t, a, -1);
    SpectralCoeffs rows = residual_rows(t, rotate(e, -1));
    impose_matching(grid, zero, rows);
    return tau.solve(rows, 2.0 * k);
  };

  EikonalSolution sol;
  sol.grid = grid;
  sol.k = k;
  sol.method = EikonalMethod::fixed_point;
  SpectralCoeffs a = step(zero);
  for (int it = 1; it <= max_iter; ++it) {
    SpectralCoeffs next = step(a);
    double delta = max_diff(next, a);
    a = std::move(next);
    sol.iterations = it;
    sol.history.push_back(delta);
    if (!std::isfinite(delta)) break;
    if (delta < tol) {
      sol.converged = true;
      break;
    }
  }
  sol.coeffs = std::move(a);
  finish(sol, t, p, tol);
  return sol;
}

EikonalSolution solve_newton(const Potential& p, cplx k, const PolarGrid& grid, double tol, int max_iter) {
  check_inputs(p, k);
  PolarTransform t(grid);
  TauSolver tau(grid);
  PolarField A = amplitude_field(grid, p);
  PolarField A2 = A * A;
  SpectralCoeffs zero(grid);
  PolarField c0(grid);

  EikonalSolution sol;
  sol.grid = grid;
  sol.k = k;
  sol.method = EikonalMethod::newton;

  SpectralCoeffs rows0 = residual_rows(t, rotate(A2, -1));
  impose_matching(grid, zero, rows0);
  SpectralCoeffs a = tau.solve(rows0, 2.0 * k);

  for (int it = 1; it <= max_iter; ++it) {
    PolarField P = apply_pm(t, a, +1), M = apply_pm(t, a, -1);
    // e^{-i phi} F = e^{-i phi}(P M - A^2) + 2k P
    PolarField F = rotate(P * M - A2, -1) + scale(P, 2.0 * k);
    SpectralCoeffs rows = residual_rows(t, F);
    impose_matching(grid, a, rows);
    for (auto& v : rows.a) v = -v;

    PolarField cP = rotate(M, -1);
    for (auto& v : cP.v) v += 2.0 * k;
    PolarLinearOp J(t, std::move(cP), rotate(P, -1), c0);
    PolarSolveStats st;
    SpectralCoeffs delta = solve_polar_linear(J, tau, 2.0 * k, rows, 1e-13, 300, &st);
    sol.linear_iterations += st.iterations;

    double dn = delta.max_abs();
    for (size_t i = 0; i < a.a.size(); ++i) a.a[i] += delta.a[i];
    sol.iterations = it;
    sol.history.push_back(dn);
    if (!std::isfinite(dn)) break;
    if (dn < tol) {
      sol.converged = true;
      break;
    }
  }
  sol.coeffs = std::move(a);
  finish(sol, t, p, tol);
  return sol;
}

double RadialSeries::eval(int n, double r) const {
  const cvec& cn = c.at(n);
  if (r <= 1.0) return cheb_eval(cn.data(), nc, 2.0 * r - 1.0).real();
  return cheb_eval(cn.data() + nc + 1, nc, 2.0 / r - 1.0).real();
}

namespace {

// nodal values of c' - nu c / r (sigma=+1) or c' + nu c / r (sigma=-1) for
// one mode stored as [domain 0 | domain 1] coefficients
cvec radial_pm(const cvec& c, int nc, int nu, int sigma, const std::vector<double>& x) {
  const int n1 = nc + 1;
  cvec out(2 * n1), b(n1), q(n1);
  cheb_euler(c.data(), b.data(), nc, -double(sigma) * nu);
  cheb_div_shifted_l(b.data(), q.data(), nc, +1);
  for (auto& v : q) v *= 2.0;
  cvec v0 = ifct(q);
  cheb_euler(c.data() + n1, b.data(), nc, double(sigma) * nu);
  cvec v1 = ifct(b);
  for (int j = 0; j < n1; ++j) {
    out[j] = v0[j];
    out[n1 + j] = -x[j] * v1[j];
  }
  return out;
}

}  // namespace

RadialSeries solve_radial_series(const Potential& p, int nc, int n_terms) {
  if (!p.is_radial()) throw InputError("radial series: potential is not radial");
  if (!p.smooth()) throw InputError("radial series: discontinuous potentials are not supported");
  if (n_terms < 1) throw InputError("radial series: need at least one term");
  const int n1 = nc + 1;
  PolarGrid g(nc, 4);
  const auto& x = g.x;

  cvec A2(2 * n1);
  for (int j = 0; j < n1; ++j) {
    double a0 = p.radial_amplitude(x[j]);
    double a1 = j == nc ? 0.0 : p.radial_amplitude(1.0 / x[j]);
    A2[j] = a0 * a0;
    A2[n1 + j] = a1 * a1;
  }

  RadialSeries s;
  s.nc = nc;
  std::vector<cvec> Pv, Mv;
  // fine sampling for sup norms
  const int ns = 1024;
  std::vector<double> ls(ns + 1);
  for (int i = 0; i <= ns; ++i) ls[i] = -1.0 + 2.0 * i / ns;

  for (int n = 0; n < n_terms; ++n) {
    const int nu = -(2 * n + 1);
    cvec h(2 * n1, 0.0);
    if (n == 0) {
      h = A2;
    } else {
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < 2 * n1; ++i) h[i] -= Mv[j][i] * Pv[n - 1 - j][i];
    }
    cvec r0(n1), r1(n1);
    for (int j = 0; j < n1; ++j) {
      r0[j] = x[j] * h[j];
      r1[j] = j == nc ? cplx(0.0) : -h[n1 + j] / x[j];
    }
    cvec rows(2 * n1);
    cvec f0 = fct(r0), f1 = fct(r1);
    std::copy(f0.begin(), f0.end(), rows.begin());
    std::copy(f1.begin(), f1.end(), rows.begin() + n1);
    rows[n1 + nc] = 0.0;  // continuity row
    cvec c(2 * n1);
    ModeTau(nc, nu).solve(rows.data(), c.data());
    for (auto& v : c) v = cplx(v.real(), 0.0);

    double sup = 0.0;
    for (int d = 0; d < 2; ++d)
      for (double l : ls) sup = std::max(sup, std::abs(cheb_eval(c.data() + d * n1, nc, l)));

    if (n > 0 && sup < 1e-14 * s.sup_norms.front()) {
      s.truncated = true;
      s.warning = "series truncated at n=" + std::to_string(n) + ": coefficients below floating point floor";
      break;
    }
    Pv.push_back(radial_pm(c, nc, nu, +1, x));
    Mv.push_back(radial_pm(c, nc, nu, -1, x));
    s.c.push_back(std::move(c));
    s.sup_norms.push_back(sup);
  }
  return s;
}

ThresholdFit estimate_threshold(const std::vector<double>& sup, int n_min) {
  std::vector<int> idx;
  for (int n = n_min + 1; n < int(sup.size()); ++n)
    if (sup[n] > 0.0) idx.push_back(n);
  if (idx.size() < 5) throw InputError("estimate_threshold: too few terms beyond n_min");
  Eigen::MatrixXd X(idx.size(), 3);
  Eigen::VectorXd y(idx.size());
  for (size_t i = 0; i < idx.size(); ++i) {
    double n = idx[i];
    X(i, 0) = -n;
    X(i, 1) = -std::log(n);
    X(i, 2) = -1.0;
    y(i) = std::log(sup[idx[i]]);
  }
  Eigen::Vector3d c = X.colPivHouseholderQr().solve(y);
  ThresholdFit f;
  f.alpha = c(0);
  f.beta = c(1);
  f.gamma = c(2);
  f.k_crit = 0.5 * std::exp(-0.5 * f.alpha);
  Eigen::Vector3d c10 = X.colPivHouseholderQr().solve(y / std::log(10.0));
  f.alpha10 = c10(0);
  f.beta10 = c10(1);
  f.gamma10 = c10(2);
  f.n_min = idx.front();
  f.n_max = idx.back();
  return f;
}

ThresholdFit estimate_threshold(const RadialSeries& s, int n_min) {
  return estimate_threshold(s.sup_norms, n_min);
}

double loglog_slope(const std::vector<double>& sup, int n_min) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int n = n_min + 1; n < int(sup.size()); ++n) {
    if (!(sup[n] > 0.0)) continue;
    double lx = std::log(double(n)), ly = std::log(sup[n]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt < 3) throw InputError("loglog_slope: too few terms");
  return (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
}

EikonalSolution series_to_solution(const RadialSeries& s, cplx k, const PolarGrid& grid) {
  if (k == cplx(0.0)) throw InputError("series: k = 0 is not allowed");
  if (grid.nc != s.nc) throw InputError("series: grid degree differs from series degree");
  const int n1 = s.nc + 1;
  const double two_k = std::abs(2.0 * k);

  // divergence: terms ||c_n|| / |2k|^{2n+1} must not grow over the tail
  const int N = int(s.sup_norms.size());
  if (N > 30) {
    auto term = [&](int n) { return std::log(s.sup_norms[n]) - (2 * n + 1) * std::log(two_k); };
    if (term(N - 1) > term(N / 2)) {
      std::ostringstream os;
      double kc = 0.5;
      try {
        kc = estimate_threshold(s).k_crit;
      } catch (const std::exception&) {
      }
      os << "series diverges for |k|=" << std::abs(k) << "; empirical k_crit ~ " << kc;
      throw SolverError(os.str());
    }
  }

  EikonalSolution sol;
  sol.grid = grid;
  sol.k = k;
  sol.method = EikonalMethod::series;
  sol.coeffs = SpectralCoeffs(grid);
  cplx factor = 1.0 / (2.0 * k);
  const cplx f2 = factor * factor;
  for (int n = 0; n < N; ++n, factor *= f2) {
    const int nu = -(2 * n + 1);
    if (-nu >= (grid.nphi + 1) / 2) break;
    const int q = grid.nphi + nu;
    for (int d = 0; d < 2; ++d)
      for (int m = 0; m < n1; ++m) sol.coeffs.at(d, q, m) = s.c[n][d * n1 + m] * factor;
  }
  sol.converged = true;
  PolarTransform t(grid);
  return sol;
}

}  // namespace ds2
