#include "ds2/cartesian.hpp"

#include <cmath>

namespace ds2 {

CartesianGrid::CartesianGrid(int nx_, int ny_, double lx_, double ly_)
    : nx(nx_), ny(ny_), lx(lx_), ly(ly_) {
  if (nx < 4 || ny < 4 || nx % 2 || ny % 2) throw InputError("CartesianGrid: nx, ny must be even and >= 4");
  if (!(lx > 0.0) || !(ly > 0.0)) throw InputError("CartesianGrid: box half-widths must be positive");
}

CartesianFFT::CartesianFFT(const CartesianGrid& g) : g_(g) {
  CField tmp(g);
  auto* p = reinterpret_cast<fftw_complex*>(tmp.v.data());
  std::lock_guard<std::mutex> lk(detail::fftw_planner_mutex());
  fwd_.reset(fftw_plan_dft_2d(g.nx, g.ny, p, p, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED));
  bwd_.reset(fftw_plan_dft_2d(g.nx, g.ny, p, p, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED));
  if (!fwd_ || !bwd_) throw SolverError("CartesianFFT: FFTW planning failed");
}

void CartesianFFT::dft(cplx* d) const {
  auto* p = reinterpret_cast<fftw_complex*>(d);
  fftw_execute_dft(fwd_.get(), p, p);
}

void CartesianFFT::idft(cplx* d) const {
  auto* p = reinterpret_cast<fftw_complex*>(d);
  fftw_execute_dft(bwd_.get(), p, p);
}

CField CartesianFFT::forward(const CField& u) const {
  CField out = u;
  dft(out.v.data());
  const double c = g_.hx() * g_.hy() / (2.0 * kPi);
  for (int i = 0; i < g_.nx; ++i)
    for (int j = 0; j < g_.ny; ++j) out.at(i, j) *= ((i + j) % 2 ? -c : c);
  return out;
}

CField CartesianFFT::inverse(const CField& uhat) const {
  CField out = uhat;
  const double c = (kPi / g_.lx) * (kPi / g_.ly) / (2.0 * kPi);
  for (int i = 0; i < g_.nx; ++i)
    for (int j = 0; j < g_.ny; ++j) out.at(i, j) *= ((i + j) % 2 ? -c : c);
  idft(out.v.data());
  return out;
}

CField sample(const CartesianGrid& g, const std::function<cplx(double, double)>& fn) {
  CField f(g);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) f.at(i, j) = fn(g.x(i), g.y(j));
  return f;
}

WienerEstimate wiener_norm_estimate(const CartesianGrid& g, const CField& f) {
  WienerEstimate w;
  double fmax = 0.0, edge = 0.0;
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.ny; ++j) {
      double a = std::abs(f.at(i, j));
      fmax = std::max(fmax, a);
      if (i == 0 || j == 0 || i == g.nx - 1 || j == g.ny - 1) edge = std::max(edge, a);
    }
  if (fmax == 0.0) return w;
  w.decaying = edge <= 1e-6 * fmax;
  CField t = f;
  CartesianFFT fft(g);
  fft.dft(t.v.data());
  // \hat b(xi) = (1/4pi^2) \int b e^{-i xi.x}, norm = \int |\hat b| dxi
  const double fwd = g.hx() * g.hy() / (4.0 * kPi * kPi);
  const double cell = (kPi / g.lx) * (kPi / g.ly);
  double s = 0.0;
  for (const auto& v : t.v) s += std::abs(v);
  w.norm = s * fwd * cell;
  return w;
}

}  // namespace ds2
