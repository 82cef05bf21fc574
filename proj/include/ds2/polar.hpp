#pragma once

#include <functional>
#include <map>
#include <memory>

#include <Eigen/Dense>

#include "ds2/chebyshev.hpp"
#include "ds2/fftw_util.hpp"
#include "ds2/types.hpp"

namespace ds2 {

// Two radial Chebyshev domains glued at r = 1: domain 0 uses r = (1+l)/2,
// domain 1 uses s = 1/r = (1+l)/2. Node j = 0 sits on the unit circle, node
// j = nc at r = 0 (domain 0) or r = infinity (domain 1).
struct PolarGrid {
  int nc = 0;
  int nphi = 0;
  std::vector<double> l;    // Chebyshev nodes
  std::vector<double> x;    // (1+l)/2: r in domain 0, s in domain 1
  std::vector<double> phi;  // 2 pi i / nphi

  PolarGrid() = default;
  PolarGrid(int nc, int nphi);

  int ring_len() const { return nc + 1; }
  // Fourier mode of FFT slot q
  int mode(int q) const { return q <= nphi / 2 ? q : q - nphi; }
  bool nyquist(int q) const { return nphi % 2 == 0 && q == nphi / 2; }
  // radius of radial node j in domain d (infinity at s = 0)
  double radius(int d, int j) const;
};

// nodal values, layout [d][j][i] (angle fastest)
struct PolarField {
  int nc = 0, nphi = 0;
  cvec v;
  PolarField() = default;
  PolarField(int nc_, int nphi_) : nc(nc_), nphi(nphi_), v(size_t(2) * (nc_ + 1) * nphi_) {}
  explicit PolarField(const PolarGrid& g) : PolarField(g.nc, g.nphi) {}
  cplx& at(int d, int j, int i) { return v[(size_t(d) * (nc + 1) + j) * nphi + i]; }
  const cplx& at(int d, int j, int i) const { return v[(size_t(d) * (nc + 1) + j) * nphi + i]; }
};

// Chebyshev-Fourier coefficients, layout [d][q][m] (Chebyshev index fastest)
struct SpectralCoeffs {
  int nc = 0, nphi = 0;
  cvec a;
  SpectralCoeffs() = default;
  SpectralCoeffs(int nc_, int nphi_) : nc(nc_), nphi(nphi_), a(size_t(2) * (nc_ + 1) * nphi_) {}
  explicit SpectralCoeffs(const PolarGrid& g) : SpectralCoeffs(g.nc, g.nphi) {}
  cplx* ring(int d, int q) { return a.data() + (size_t(d) * nphi + q) * (nc + 1); }
  const cplx* ring(int d, int q) const { return a.data() + (size_t(d) * nphi + q) * (nc + 1); }
  cplx& at(int d, int q, int m) { return ring(d, q)[m]; }
  const cplx& at(int d, int q, int m) const { return ring(d, q)[m]; }
  double max_abs() const;
};

class PolarTransform {
 public:
  explicit PolarTransform(const PolarGrid& g);
  SpectralCoeffs forward(const PolarField& f) const;
  PolarField inverse(const SpectralCoeffs& c) const;
  const PolarGrid& grid() const { return g_; }

 private:
  PolarGrid g_;
  detail::Plan fwd_angle_, inv_angle_, dct_;
};

// fourier_diff on one ring of angular coefficients in FFT order: i n a_n
cvec fourier_diff(const cvec& a_n);

// Coefficient-space Euler operators. For mode n these are
//   sigma=+1 ("P"): domain 0  r d/dr - n,  domain 1  s d/ds + n
//   sigma=-1 ("M"): domain 0  r d/dr + n,  domain 1  s d/ds - n
SpectralCoeffs apply_euler(const PolarGrid& g, const SpectralCoeffs& a, int sigma);

// Nodal values of P = d_r + (i/r) d_phi (sigma=+1) or M = d_r - (i/r) d_phi
// (sigma=-1) applied to the field with coefficients a.
PolarField apply_pm(const PolarTransform& t, const SpectralCoeffs& a, int sigma);

// pointwise helpers on nodal fields
PolarField operator*(const PolarField& a, const PolarField& b);
PolarField operator+(const PolarField& a, const PolarField& b);
PolarField operator-(const PolarField& a, const PolarField& b);
PolarField scale(const PolarField& a, cplx s);
// multiply by e^{i p phi}
PolarField rotate(const PolarField& a, int p);
PolarField make_field(const PolarGrid& g, const std::function<cplx(double r, double phi)>& fn,
                      cplx at_infinity = 0.0);

// Which coefficient rows of a mode-n system are replaced by matching
// conditions. Row nc of the domain where the Euler operator is singular
// carries continuity at r = 1; for n = 0 domain 1 row nc carries decay.
struct TauRows {
  int continuity_domain;  // 0 or 1
  bool decay_row;         // only n == 0
};
TauRows tau_rows(int n);

// Dense two-domain system for one mode: kappa*P-operator rows plus
// matching rows. Factorized once.
class ModeTau {
 public:
  ModeTau(int nc, int n);
  // rhs, out: [domain0 rows | domain1 rows], 2(nc+1) entries each
  void solve(const cplx* rhs, cplx* out) const;
  int mode() const { return n_; }

 private:
  int nc_, n_;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

// Mode-diagonal tau solver for every slot of a grid.
class TauSolver {
 public:
  explicit TauSolver(const PolarGrid& g);
  // Solve kappa * P-operator(a) = rows, with matching rows taken verbatim.
  SpectralCoeffs solve(const SpectralCoeffs& rows, cplx kappa) const;
  const ModeTau& mode_solver(int q) const { return *modes_[q]; }

 private:
  PolarGrid g_;
  std::vector<std::unique_ptr<ModeTau>> modes_;
};

// matching functionals: continuity jump a0(r=1) - a1(s=1) and a1(s=0)
cplx continuity_jump(const cplx* ring0, const cplx* ring1, int nc);
cplx value_at_s0(const cplx* ring1, int nc);

// Replace tau rows of `rows` with the matching functionals of `a`, and set
// Nyquist rows to the identity.
void impose_matching(const PolarGrid& g, const SpectralCoeffs& a, SpectralCoeffs& rows);

// Scale a nodal residual E into row form: r*E on domain 0, -E/s on domain 1
// and transform. At s = 0 the value is zero, or with extrapolate_s0 the
// limit of the interpolant through the remaining domain-1 nodes.
SpectralCoeffs residual_rows(const PolarTransform& t, const PolarField& e, bool extrapolate_s0 = false);

// Linear operator  x -> cP * P x + cM * M x + c0 * x  in row form, with
// matching rows. Used for Newton steps and the amplitude equation.
class PolarLinearOp {
 public:
  PolarLinearOp(const PolarTransform& t, PolarField cP, PolarField cM, PolarField c0,
                bool extrapolate_s0 = false);
  SpectralCoeffs apply(const SpectralCoeffs& x) const;

 private:
  const PolarTransform& t_;
  PolarField cP_, cM_, c0s_;
  bool has_c0_ = false;
};

// Solve op(x) = rhs with GMRES right-preconditioned by the kappa*P tau solve.
struct PolarSolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
  bool converged = false;
};
SpectralCoeffs solve_polar_linear(const PolarLinearOp& op, const TauSolver& pre, cplx kappa,
                                  const SpectralCoeffs& rhs, double tol, int max_iter,
                                  PolarSolveStats* stats = nullptr);

// Evaluate a polar expansion at an arbitrary point.
cplx polar_eval(const SpectralCoeffs& c, double x, double y);

// Zero coefficients below tol in modulus.
void filter_coeffs(SpectralCoeffs& c, double tol);

}  // namespace ds2
