#include "ds2/dirac.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>

#include "ds2/kernels.hpp"

namespace ds2 {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

cplx* as_cplx(std::vector<double>& v) { return reinterpret_cast<cplx*>(v.data()); }
const cplx* as_cplx(const std::vector<double>& v) { return reinterpret_cast<const cplx*>(v.data()); }

}  // namespace

CauchyInverse::CauchyInverse(const CartesianGrid& g, int order) : g_(g), order_(order), fft_(g) {
  if (order < 0) throw InputError("CauchyInverse: regularization order must be >= 0");
  const size_t n = g.size();
  sign_.resize(n);
  inv_xi_.resize(n);
  gker_.assign(order + 1, cvec(n));
  tail_.assign(order + 1, cvec(n));
  dtail_.assign(order + 1, cvec(n));
  mom_.assign(order + 1, cvec(n));
  zbar_w_.resize(n);
  work_.resize(n);
  const double h2 = g.hx() * g.hy();
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const size_t id = size_t(i) * g.ny + j;
      sign_[id] = (i + j) % 2 ? -1.0 : 1.0;
      const cplx xi(g.xi_x(i), g.xi_y(j));
      const double a2 = std::norm(xi);
      const cplx z(g.x(i), g.y(j));
      const double t = std::norm(z) / 4.0;
      if (a2 > 0.0) inv_xi_[id] = 1.0 / xi;
      zbar_w_[id] = (-kI * std::conj(z) / 2.0) * h2 / (2.0 * kPi);
      cplx zp = 1.0;  // (-i z / 2)^n
      for (int m = 0; m <= order; ++m) {
        if (a2 > 0.0) gker_[m][id] = std::exp(-a2) * std::pow(std::conj(xi), m) / (factorial(m) * xi);
        if (t > 0.0)
          tail_[m][id] = kI * std::pow(2.0 * kI, m) * std::pow(z, -(m + 1)) * boost::math::gamma_p(m + 1, t);
        dtail_[m][id] = 0.25 * kI * std::pow(0.5 * kI * std::conj(z), m) * std::exp(-t) / factorial(m);
        mom_[m][id] = zp * h2 / (2.0 * kPi);
        zp *= -kI * z / 2.0;
      }
    }
}

std::vector<cplx> CauchyInverse::moments(const cplx* u) const {
  std::vector<cplx> d(order_ + 1);
  const size_t n = g_.size();
  for (int m = 0; m <= order_; ++m) {
    cplx s = 0.0;
    const cplx* w = mom_[m].data();
    for (size_t i = 0; i < n; ++i) s += w[i] * u[i];
    d[m] = s;
  }
  return d;
}

void CauchyInverse::apply_inplace(cplx* u) const {
  const size_t n = g_.size();
  std::vector<cplx> d = moments(u);
  cplx lim0 = 0.0;
  for (size_t i = 0; i < n; ++i) lim0 += zbar_w_[i] * u[i];

  fft_.dft(u);
  const double cf = g_.hx() * g_.hy() / (2.0 * kPi);
  const double ci = (kPi / g_.lx) * (kPi / g_.ly) / (2.0 * kPi);
  for (size_t i = 0; i < n; ++i) {
    cplx v;
    if (inv_xi_[i] == cplx(0.0)) {
      v = lim0;
    } else {
      v = cf * sign_[i] * u[i] * inv_xi_[i];
      for (int m = 0; m <= order_; ++m) v -= d[m] * gker_[m][i];
    }
    u[i] = ci * sign_[i] * v;
  }
  fft_.idft(u);
  for (int m = 0; m <= order_; ++m) {
    const cplx* t = tail_[m].data();
    const cplx dm = d[m];
    for (size_t i = 0; i < n; ++i) u[i] += dm * t[i];
  }
}

CField CauchyInverse::apply(const CField& u) const {
  CField out = u;
  apply_inplace(out.v.data());
  return out;
}

CField CauchyInverse::tail(const CField& u) const {
  std::vector<cplx> d = moments(u.v.data());
  CField out(g_);
  for (int m = 0; m <= order_; ++m)
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += d[m] * tail_[m][i];
  return out;
}

CField CauchyInverse::dbar_tail(const CField& u) const {
  std::vector<cplx> d = moments(u.v.data());
  CField out(g_);
  for (int m = 0; m <= order_; ++m)
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += d[m] * dtail_[m][i];
  return out;
}

CField regularized_cauchy_inverse(const CField& s_hat, const CartesianGrid& g, int order) {
  CauchyInverse c(g, order);
  return c.apply(c.fft().inverse(s_hat));
}

CField apply_shift(const CField& f_hat, const CartesianGrid& g, cplx k, double eps, int direction) {
  if (direction != 1 && direction != -1) throw InputError("apply_shift: direction must be +1 or -1");
  if (k == cplx(0.0)) return f_hat;
  CartesianFFT fft(g);
  CField u = fft.inverse(f_hat);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double im_kz = k.real() * g.y(j) + k.imag() * g.x(i);
      u.at(i, j) *= std::polar(1.0, -2.0 * direction * im_kz / eps);
    }
  return fft.forward(u);
}

namespace {

// max |q_hat| beyond the band a modulation by 2|k|/eps leaves intact,
// relative to the peak
double spectral_tail(const CartesianGrid& g, const CField& q, double shift) {
  CField t = q;
  CartesianFFT fft(g);
  fft.dft(t.v.data());
  const double bx = kPi * g.nx / (2.0 * g.lx) - shift, by = kPi * g.ny / (2.0 * g.ly) - shift;
  double peak = 0.0, tail = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double a = std::abs(t.at(i, j));
      peak = std::max(peak, a);
      if (std::abs(g.xi_x(i)) > bx || std::abs(g.xi_y(j)) > by) tail = std::max(tail, a);
    }
  if (peak == 0.0) return 0.0;
  if (bx <= 0.0 || by <= 0.0) return 1.0;
  return tail / peak;
}

}  // namespace

int default_nx(double eps) {
  if (eps >= 1.0) return 256;
  if (eps >= 0.25) return 512;
  if (eps >= 1.0 / 16.0) return 1024;
  return 2048;
}

int suggest_nx(const Potential& p, cplx k, double eps, double box) {
  const double shift = 2.0 * std::abs(k) / eps;
  for (int nx = 64; nx <= (1 << 14); nx *= 2) {
    // the tail test only needs q, so probe with a coarse sample first
    CartesianGrid g(nx, nx, box, box);
    CField q = sample(g, [&](double x, double y) { return cplx(p.amplitude(x, y)); });
    if (spectral_tail(g, q, shift) <= 1e-8) return nx;
  }
  return 1 << 14;
}

DiracSolution solve_dirac(const DiracProblem& prob) {
  if (!(prob.eps > 0.0)) throw InputError("dirac: eps must be positive");
  const CartesianGrid& g = prob.cart;
  const size_t n = g.size();
  const double eps = prob.eps;
  const cplx k = prob.k;

  DiracSolution sol;
  sol.cart = g;
  CField q = sample(g, [&](double x, double y) { return cplx(prob.p.amplitude(x, y)); });
  sol.psi1_scaled = CField(g);
  sol.psi2_scaled = CField(g);
  for (auto& v : sol.psi1_scaled.v) v = 1.0;
  bool zero = true;
  for (const auto& v : q.v)
    if (v != cplx(0.0)) {
      zero = false;
      break;
    }
  if (zero) {
    sol.plus.m = sol.minus.m = sol.plus.sigma = sol.minus.sigma = CField(g);
    return sol;
  }

  if (prob.check_resolution) {
    double tail = spectral_tail(g, q, 2.0 * std::abs(k) / eps);
    if (tail > 1e-8) {
      std::ostringstream os;
      os << "dirac: grid nx=" << g.nx << " under-resolves the modulated potential (spectral tail " << tail
         << "); try nx=" << suggest_nx(prob.p, k, eps, g.lx);
      throw InputError(os.str());
    }
  }

  CauchyInverse C(g, prob.reg_order);
  cvec E(n);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double im_kz = k.real() * g.y(j) + k.imag() * g.x(i);
      E[size_t(i) * g.ny + j] = std::polar(1.0, -2.0 * im_kz / eps);
    }

  auto solve_branch = [&](double s, DiracBranch& br) {
    cvec cQ(n);
    for (size_t i = 0; i < n; ++i) cQ[i] = -kI * s * q.v[i] / eps;
    cvec tmp(n), tmp2(n);
    // T(v) = cQ conj(C(E v)), real linear
    auto T = [&](const cplx* v, cplx* out) {
      kernels::cmul(E.data(), v, out, n);
      C.apply_inplace(out);
      kernels::cmul_conj(cQ.data(), out, out, n);
    };
    RealOp op = [&](const std::vector<double>& in, std::vector<double>& out) {
      out.resize(in.size());
      T(as_cplx(in), tmp.data());
      T(tmp.data(), tmp2.data());
      const cplx* x = as_cplx(in);
      cplx* y = as_cplx(out);
      for (size_t i = 0; i < n; ++i) y[i] = x[i] - tmp2[i];
    };
    std::vector<double> rhs(2 * n);
    std::copy(cQ.begin(), cQ.end(), as_cplx(rhs));
    GmresResult r = gmres_real_linear(op, rhs, prob.gmres);
    br.iterations = r.iterations;
    br.rel_residual = r.rel_residual;
    br.history = r.history;
    if (!r.converged) {
      std::ostringstream os;
      os << "dirac: GMRES stalled for Q=" << (s > 0 ? "+q" : "-q") << " after " << r.iterations
         << " iterations, relative residual " << r.rel_residual << "; history:";
      for (size_t i = 0; i < r.history.size(); i += std::max<size_t>(1, r.history.size() / 8))
        os << " " << r.history[i];
      throw SolverError(os.str());
    }
    // h = eta + T(eta), sigma = E h
    const cplx* eta = as_cplx(r.x);
    T(eta, tmp.data());
    br.sigma = CField(g);
    for (size_t i = 0; i < n; ++i) br.sigma.v[i] = E[i] * (eta[i] + tmp[i]);
    br.m = C.apply(br.sigma);
  };
  solve_branch(+1.0, sol.plus);
  solve_branch(-1.0, sol.minus);

  for (size_t i = 0; i < n; ++i) {
    sol.psi1_scaled.v[i] = 1.0 + 0.5 * (sol.plus.m.v[i] + sol.minus.m.v[i]);
    sol.psi2_scaled.v[i] = E[i] * std::conj(0.5 * (sol.plus.m.v[i] - sol.minus.m.v[i]));
  }
  sol.R = reflection_from_solution(sol, prob);

  // decay check on sigma = -2i dbar m; m itself only decays like 1/z
  double edge = 0.0, peak = 0.0;
  for (const DiracBranch* b : {&sol.plus, &sol.minus})
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        double a = std::abs(b->sigma.at(i, j));
        peak = std::max(peak, a);
        if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) edge = std::max(edge, a);
      }
  if (edge > 1e-3 * peak) {
    std::ostringstream os;
    os << "boundary decay: dbar m on the box edge is " << edge / peak << " of its peak; enlarge the box";
    sol.warning = os.str();
  }
  return sol;
}

cplx reflection_from_solution(const DiracSolution& sol, const DiracProblem& prob) {
  (void)prob;
  const CartesianGrid& g = sol.cart;
  if (sol.plus.sigma.v.empty()) return 0.0;
  cplx s = 0.0;
  for (size_t i = 0; i < g.size(); ++i) s += sol.plus.sigma.v[i] - sol.minus.sigma.v[i];
  // (1/pi) \int dbar(m+ - m-) with dbar m = (i/2) sigma
  return kI / (2.0 * kPi) * s * g.hx() * g.hy();
}

double dirac_residual(const DiracSolution& sol, const DiracProblem& prob, double interior) {
  const CartesianGrid& g = sol.cart;
  const size_t n = g.size();
  if (sol.plus.sigma.v.empty()) return 0.0;
  CauchyInverse C(g, prob.reg_order);
  const double eps = prob.eps;
  const cplx k = prob.k;

  auto dbar_m = [&](const DiracBranch& b) {
    CField smooth = b.m;
    CField t = C.tail(b.sigma);
    for (size_t i = 0; i < n; ++i) smooth.v[i] -= t.v[i];
    CField sh = C.fft().forward(smooth);
    for (int i = 0; i < g.nx; ++i)
      for (int j = 0; j < g.ny; ++j) {
        if (i == g.nx / 2 || j == g.ny / 2) {
          sh.at(i, j) = 0.0;
          continue;
        }
        sh.at(i, j) *= 0.5 * kI * cplx(g.xi_x(i), g.xi_y(j));
      }
    CField d = C.fft().inverse(sh);
    CField dt = C.dbar_tail(b.sigma);
    for (size_t i = 0; i < n; ++i) d.v[i] += dt.v[i];
    return d;
  };
  CField dp = dbar_m(sol.plus), dm = dbar_m(sol.minus);

  double res = 0.0, scale = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      const double x = g.x(i), y = g.y(j);
      if (std::abs(x) > interior * g.lx || std::abs(y) > interior * g.ly) continue;
      const size_t id = size_t(i) * g.ny + j;
      const double qv = prob.p.amplitude(x, y);
      const double im_kz = k.real() * y + k.imag() * x;
      const cplx E = std::polar(1.0, -2.0 * im_kz / eps);
      const cplx P1 = sol.psi1_scaled.v[id], P2 = sol.psi2_scaled.v[id];
      const cplx dbP1 = 0.5 * (dp.v[id] + dm.v[id]);
      const cplx dP2 = -(k / eps) * P2 + E * std::conj(0.5 * (dp.v[id] - dm.v[id]));
      const cplx r1 = eps * dbP1 - 0.5 * qv * P2;
      const cplx r2 = eps * dP2 + k * P2 - 0.5 * qv * P1;
      res = std::max({res, std::abs(r1), std::abs(r2)});
      scale = std::max({scale, 0.5 * std::abs(qv * P1), 0.5 * std::abs(qv * P2)});
    }
  return scale > 0.0 ? res / scale : res;
}

}  // namespace ds2
