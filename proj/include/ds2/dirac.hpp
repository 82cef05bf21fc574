#pragma once

#include <string>

#include "ds2/cartesian.hpp"
#include "ds2/gmres.hpp"
#include "ds2/potential.hpp"

namespace ds2 {

// C(u) = F^{-1}{F{u} / xi} on a Cartesian grid. The singularity at xi = 0 is
// removed with G = e^{-|xi|^2} sum_{n<=M} d_n xi_bar^n / n!, where the
// d_n = dbar_xi^n F{u}(0) are moments of u, and F^{-1}{G/xi} is added back
// in closed form.
class CauchyInverse {
 public:
  CauchyInverse(const CartesianGrid& g, int order = 2);
  CField apply(const CField& u) const;
  // in place on nx*ny values; not thread safe (uses internal scratch)
  void apply_inplace(cplx* u) const;
  // closed-form part F^{-1}{G/xi} for the moments of u, and its dbar
  CField tail(const CField& u) const;
  CField dbar_tail(const CField& u) const;
  int order() const { return order_; }
  const CartesianGrid& grid() const { return g_; }
  const CartesianFFT& fft() const { return fft_; }

 private:
  std::vector<cplx> moments(const cplx* u) const;

  CartesianGrid g_;
  int order_;
  CartesianFFT fft_;
  std::vector<double> sign_;     // (-1)^{qx+qy}
  std::vector<cplx> inv_xi_;     // 1/xi, zero at xi = 0
  std::vector<cvec> gker_;       // e^{-|xi|^2} xi_bar^n / (n! xi), zero at xi = 0
  std::vector<cvec> tail_;       // i (2i)^n z^{-(n+1)} P(n+1, |z|^2/4)
  std::vector<cvec> dtail_;      // dbar of the above divided by d_n
  std::vector<cvec> mom_;        // (1/2pi) (-i z/2)^n h^2
  cvec zbar_w_;                  // (1/2pi) (-i zbar/2) h^2, limit of (S-G)/xi at 0
  mutable cvec work_;
};

// F^{-1}{S_hat / xi} for a spectrum on the FFT dual grid
CField regularized_cauchy_inverse(const CField& s_hat, const CartesianGrid& g, int order = 2);

// S_{k/eps} applied direction times: f(xi) -> f(xi + direction 2i kbar/eps),
// realized as modulation by e^{direction (kbar zbar - k z)/eps}.
CField apply_shift(const CField& f_hat, const CartesianGrid& g, cplx k, double eps, int direction);

struct DiracProblem {
  Potential p;
  double eps = 1.0;
  cplx k = 0.0;
  CartesianGrid cart{256, 256};
  GmresOptions gmres;
  int reg_order = 2;
  bool check_resolution = true;
};

struct DiracBranch {
  CField m, sigma;  // sigma = -2i dbar m
  int iterations = 0;
  double rel_residual = 0.0;
  std::vector<double> history;
};

struct DiracSolution {
  CartesianGrid cart;
  DiracBranch plus, minus;
  CField psi1_scaled, psi2_scaled;  // psi_j e^{-kz/eps}
  cplx R = 0.0;
  std::string warning;  // boundary decay
};

// smallest power of two Nx for which the resolution check passes
int suggest_nx(const Potential& p, cplx k, double eps, double box);
DiracSolution solve_dirac(const DiracProblem& prob);
cplx reflection_from_solution(const DiracSolution& sol, const DiracProblem& prob);

// max over |x|,|y| < interior*L of the Dirac-system residual, relative to
// max |q psi| / 2; derivatives taken spectrally with the closed-form tail
// handled analytically
double dirac_residual(const DiracSolution& sol, const DiracProblem& prob, double interior = 0.8);

// desk-scale grid table for the Gaussian
int default_nx(double eps);

}  // namespace ds2
