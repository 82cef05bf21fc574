#include "ds2/wkb.hpp"

#include <cmath>
#include <sstream>

#include "ds2/kernels.hpp"

namespace ds2 {

Alpha0Result solve_alpha0(const EikonalSolution& g, const Potential& p, cplx k, const PolarGrid& grid,
                          double tol, int max_iter) {
  if (k == cplx(0.0)) throw InputError("alpha0: k = 0 is not allowed");
  if (!p.smooth()) throw InputError("alpha0: discontinuous potentials are not supported");
  if (g.coeffs.nc != grid.nc || g.coeffs.nphi != grid.nphi)
    throw InputError("alpha0: eikonal solution lives on a different grid");
  PolarTransform t(grid);
  PolarField P = apply_pm(t, g.coeffs, +1), M = apply_pm(t, g.coeffs, -1);

  PolarField cP = scale(rotate(M, -1), 0.5);
  for (auto& v : cP.v) v += k;
  PolarField cM = scale(rotate(P, -1), 0.5);
  // 2 e^{-i phi} d dbar g
  SpectralCoeffs ePg = t.forward(rotate(P, +1));
  PolarField c0 = scale(rotate(apply_pm(t, ePg, -1), -2), 0.5);
  PolarField dlnA = make_field(grid, [&](double r, double phi) {
    auto gr = p.log_amplitude_grad(r * std::cos(phi), r * std::sin(phi));
    return 0.5 * cplx(gr[0], -gr[1]);
  });
  for (size_t i = 0; i < c0.v.size(); ++i) c0.v[i] += P.v[i] * dlnA.v[i];
  for (int i = 0; i < grid.nphi; ++i) c0.at(1, grid.nc, i) = 0.0;

  SpectralCoeffs rhs = residual_rows(t, scale(c0, -1.0), true);
  impose_matching(grid, SpectralCoeffs(grid), rhs);
  PolarLinearOp op(t, std::move(cP), std::move(cM), std::move(c0), true);
  TauSolver tau(grid);
  PolarSolveStats st;
  Alpha0Result res;
  res.coeffs = solve_polar_linear(op, tau, k, rhs, tol, max_iter, &st);
  res.iterations = st.iterations;
  res.rel_residual = st.rel_residual;
  res.converged = st.converged;
  for (int d = 0; d < 2; ++d) res.coeffs.at(d, 0, 0) += 1.0;
  return res;
}

namespace {

void fill_derivatives(WKBLeadingOrder& w) {
  PolarTransform t(w.g.grid);
  w.dg = t.forward(scale(rotate(apply_pm(t, w.g.coeffs, -1), -1), 0.5));
  w.dbarg = t.forward(scale(rotate(apply_pm(t, w.g.coeffs, +1), +1), 0.5));
}

}  // namespace

WKBLeadingOrder make_wkb(const EikonalSolution& g, const Potential& p) {
  Alpha0Result a = solve_alpha0(g, p, g.k, g.grid);
  if (!a.converged) {
    std::ostringstream os;
    os << "alpha0: linear solve stalled at relative residual " << a.rel_residual;
    throw SolverError(os.str());
  }
  return make_wkb(g, std::move(a.coeffs));
}

WKBLeadingOrder make_wkb(const EikonalSolution& g, SpectralCoeffs alpha0) {
  WKBLeadingOrder w;
  w.g = g;
  w.k = g.k;
  w.alpha0 = std::move(alpha0);
  fill_derivatives(w);
  return w;
}

double singularity_identity_residual(const WKBLeadingOrder& w, const Potential& p) {
  PolarTransform t(w.g.grid);
  PolarField dbf = t.inverse(w.dbarg), df = t.inverse(w.dg);
  PolarField A = amplitude_field(w.g.grid, p);
  const PolarGrid& g = w.g.grid;
  double res = 0.0;
  for (int d = 0; d < 2; ++d)
    for (int j = 0; j <= g.nc; ++j) {
      if (d == 0 && j == g.nc) continue;
      for (int i = 0; i < g.nphi; ++i) {
        cplx a = A.at(d, j, i);
        cplx e = 4.0 * dbf.at(d, j, i) * (w.k + df.at(d, j, i)) - a * a;
        res = std::max(res, std::abs(e));
      }
    }
  return res;
}

CField interp_polar_to_cartesian(const SpectralCoeffs& c, const CartesianGrid& cart) {
  const int nc = c.nc, np = c.nphi;
  std::vector<int> active;
  for (int q = 0; q < np; ++q) {
    bool nz = false;
    for (int d = 0; d < 2 && !nz; ++d)
      for (int m = 0; m <= nc; ++m)
        if (c.at(d, q, m) != cplx(0.0)) {
          nz = true;
          break;
        }
    if (nz) active.push_back(q);
  }
  auto mode = [np](int q) { return q <= np / 2 ? q : q - np; };
  int nmax = 0;
  for (int q : active) nmax = std::max(nmax, std::abs(mode(q)));

  CField out(cart);
  std::vector<double> T(nc + 1);
  cvec epow(nmax + 1);
  for (int i = 0; i < cart.nx; ++i)
    for (int j = 0; j < cart.ny; ++j) {
      double x = cart.x(i), y = cart.y(j);
      double r = std::hypot(x, y);
      int d = r <= 1.0 ? 0 : 1;
      double l = d == 0 ? 2.0 * r - 1.0 : 2.0 / r - 1.0;
      T[0] = 1.0;
      if (nc > 0) T[1] = l;
      for (int m = 2; m <= nc; ++m) T[m] = 2.0 * l * T[m - 1] - T[m - 2];
      cplx e1 = r > 0.0 ? cplx(x / r, y / r) : cplx(1.0);
      epow[0] = 1.0;
      for (int n = 1; n <= nmax; ++n) epow[n] = epow[n - 1] * e1;
      cplx sum = 0.0;
      for (int q : active) {
        int n = mode(q);
        cplx v = kernels::cdot_real(c.ring(d, q), T.data(), nc + 1);
        sum += v * (n >= 0 ? epow[n] : std::conj(epow[-n]));
      }
      out.at(i, j) = sum;
    }
  return out;
}

WKBOnGrid wkb_on_grid(const WKBLeadingOrder& w, const Potential& p, const CartesianGrid& cart) {
  WKBOnGrid o;
  o.cart = cart;
  o.k = w.k;
  o.g = interp_polar_to_cartesian(w.g.coeffs, cart);
  o.alpha0 = interp_polar_to_cartesian(w.alpha0, cart);
  o.df = interp_polar_to_cartesian(w.dg, cart);
  for (auto& v : o.df.v) v += w.k;
  o.amp = sample(cart, [&](double x, double y) { return cplx(p.amplitude(x, y)); });
  return o;
}

WKBFields assemble_wkb(const WKBOnGrid& w, double eps) {
  if (!(eps > 0.0)) throw InputError("assemble_wkb: eps must be positive");
  WKBFields f{CField(w.cart), CField(w.cart)};
  const cplx inv2k = 1.0 / (2.0 * w.k);
  for (int i = 0; i < w.cart.nx; ++i)
    for (int j = 0; j < w.cart.ny; ++j) {
      cplx g = w.g.at(i, j);
      if (g.real() / eps > 700.0) {
        std::ostringstream os;
        os << "assemble_wkb: e^{g/eps} overflows at (" << w.cart.x(i) << ", " << w.cart.y(j) << ")";
        throw SolverError(os.str());
      }
      cplx e = std::exp(g / eps) * w.alpha0.at(i, j) * inv2k;
      f.psi1.at(i, j) = 2.0 * w.df.at(i, j) * e;
      f.psi2.at(i, j) = w.amp.at(i, j) * e;
    }
  return f;
}

WKBFields assemble_wkb(const WKBLeadingOrder& w, const Potential& p, double eps, const CartesianGrid& cart) {
  return assemble_wkb(wkb_on_grid(w, p, cart), eps);
}

DeltaFields delta_fields(const CField& psi1s, const CField& psi2s, const WKBOnGrid& w, double eps) {
  if (psi1s.nx != w.cart.nx || psi1s.ny != w.cart.ny || psi2s.nx != w.cart.nx || psi2s.ny != w.cart.ny)
    throw InputError("delta_fields: grid mismatch");
  if (!(eps > 0.0)) throw InputError("delta_fields: eps must be positive");
  DeltaFields d;
  const size_t n = w.cart.size();
  d.d1.resize(n);
  d.d2.resize(n);
  for (size_t i = 0; i < n; ++i) {
    cplx em = std::exp(-w.g.v[i] / eps);
    cplx a = w.alpha0.v[i] / w.k;
    d.d1[i] = std::abs(psi1s.v[i] * em - a * w.df.v[i]);
    d.d2[i] = std::abs(psi2s.v[i] * em - 0.5 * a * w.amp.v[i]);
    d.sup1 = std::max(d.sup1, d.d1[i]);
    d.sup2 = std::max(d.sup2, d.d2[i]);
  }
  return d;
}

}  // namespace ds2
