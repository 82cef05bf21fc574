#pragma once

#include <functional>

#include "ds2/fftw_util.hpp"
#include "ds2/types.hpp"

namespace ds2 {

// Uniform periodic grid on [-lx, lx) x [-ly, ly); x_i = -lx + i hx.
struct CartesianGrid {
  int nx = 0, ny = 0;
  double lx = 4.0 * kPi, ly = 4.0 * kPi;

  CartesianGrid() = default;
  CartesianGrid(int nx_, int ny_, double lx_ = 4.0 * kPi, double ly_ = 4.0 * kPi);

  double hx() const { return 2.0 * lx / nx; }
  double hy() const { return 2.0 * ly / ny; }
  double x(int i) const { return -lx + i * hx(); }
  double y(int j) const { return -ly + j * hy(); }
  // dual frequencies of FFT slot q
  double xi_x(int q) const { return (q <= nx / 2 ? q : q - nx) * kPi / lx; }
  double xi_y(int q) const { return (q <= ny / 2 ? q : q - ny) * kPi / ly; }
  std::size_t size() const { return std::size_t(nx) * ny; }
};

// Complex field on a Cartesian grid, layout [i][j] with y fastest.
struct CField {
  int nx = 0, ny = 0;
  cvec v;
  CField() = default;
  CField(int nx_, int ny_) : nx(nx_), ny(ny_), v(std::size_t(nx_) * ny_) {}
  explicit CField(const CartesianGrid& g) : CField(g.nx, g.ny) {}
  cplx& at(int i, int j) { return v[std::size_t(i) * ny + j]; }
  const cplx& at(int i, int j) const { return v[std::size_t(i) * ny + j]; }
};

// Unitary continuous Fourier transform approximated on the grid:
//   F{u}(xi) = (1/2pi) \int u(x) e^{-i xi.x} dx.
class CartesianFFT {
 public:
  explicit CartesianFFT(const CartesianGrid& g);
  // raw unnormalized DFTs in place
  void dft(cplx* data) const;
  void idft(cplx* data) const;
  CField forward(const CField& u) const;
  CField inverse(const CField& uhat) const;
  const CartesianGrid& grid() const { return g_; }

 private:
  CartesianGrid g_;
  detail::Plan fwd_, bwd_;
};

CField sample(const CartesianGrid& g, const std::function<cplx(double, double)>& fn);

struct WienerEstimate {
  double norm = 0.0;
  bool decaying = true;  // false when the field is not small on the box edge
};

// cell-weighted L1 norm of the unitary-scaled transform with the 1/(4 pi^2)
// forward constant
WienerEstimate wiener_norm_estimate(const CartesianGrid& g, const CField& f);

}  // namespace ds2
