#pragma once

#include "ds2/cartesian.hpp"
#include "ds2/eikonal.hpp"

namespace ds2 {

struct Alpha0Result {
  SpectralCoeffs coeffs;
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};

// Transport equation  df dbar(a) + dbarf d(a) + (d dbar g + dbar g d ln A) a = 0
// with a -> 1 at infinity, solved for a - 1.
Alpha0Result solve_alpha0(const EikonalSolution& g, const Potential& p, cplx k, const PolarGrid& grid,
                          double tol = 1e-12, int max_iter = 400);

// Leading WKB term on the polar grid. dg holds the coefficients of \partial g,
// dbarg those of \bar\partial g.
struct WKBLeadingOrder {
  EikonalSolution g;
  SpectralCoeffs alpha0;
  SpectralCoeffs dg, dbarg;
  cplx k = 1.0;
};

WKBLeadingOrder make_wkb(const EikonalSolution& g, const Potential& p);
// Built from known coefficients (e.g. read from files).
WKBLeadingOrder make_wkb(const EikonalSolution& g, SpectralCoeffs alpha0);

// sup over nodes of |(2 dbar f)(2 d f) - A^2|, r = 0 excluded
double singularity_identity_residual(const WKBLeadingOrder& w, const Potential& p);

// Direct Chebyshev-Fourier sum at each Cartesian node (domain 0 for r <= 1).
CField interp_polar_to_cartesian(const SpectralCoeffs& c, const CartesianGrid& cart);

// WKB ingredients sampled on a Cartesian grid
struct WKBOnGrid {
  CartesianGrid cart;
  cplx k = 1.0;
  CField g, alpha0, df, amp;
};
WKBOnGrid wkb_on_grid(const WKBLeadingOrder& w, const Potential& p, const CartesianGrid& cart);

// psi_j e^{-kz/eps} of the leading WKB term
struct WKBFields {
  CField psi1, psi2;
};
WKBFields assemble_wkb(const WKBOnGrid& w, double eps);
WKBFields assemble_wkb(const WKBLeadingOrder& w, const Potential& p, double eps, const CartesianGrid& cart);

struct DeltaFields {
  std::vector<double> d1, d2;
  double sup1 = 0.0, sup2 = 0.0;
};
// psi1s, psi2s are psi_j e^{-kz/eps}, e.g. from the Dirac solver
DeltaFields delta_fields(const CField& psi1s, const CField& psi2s, const WKBOnGrid& w, double eps);

}  // namespace ds2
