#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>

#include "ds2/expr.hpp"
#include "ds2/types.hpp"

namespace ds2 {

enum class PotentialTag { gaussian, lorentzian, disk, aniso_gaussian, custom };

// Amplitude A(x, y) >= 0 with zero phase. `scale` multiplies the whole
// amplitude, so scale*gaussian is still tagged gaussian.
class Potential {
 public:
  static Potential gaussian(double scale = 1.0);
  static Potential lorentzian(double scale = 1.0);
  static Potential disk(double rho, double a0);
  static Potential aniso_gaussian(double scale = 1.0);
  static Potential custom(const std::string& expr);
  // gaussian | lorentzian | disk:RHO:A0 | aniso | expr:TEXT
  static Potential parse(const std::string& spec);

  PotentialTag tag() const { return tag_; }
  std::string describe() const;
  double scale() const { return scale_; }
  double rho() const { return rho_; }
  double a0() const { return a0_; }

  double amplitude(double x, double y) const;
  // A and its partial derivatives
  Dual amplitude_grad(double x, double y) const;
  // gradient of ln A, analytic for the built-in tags so it stays finite
  // where A underflows
  std::array<double, 2> log_amplitude_grad(double x, double y) const;
  bool is_radial() const;
  // a(m) with A(x,y) = a(x^2+y^2); empty for non-radial potentials
  std::optional<std::function<double(double)>> radial_profile() const;
  // A as a function of r for radial potentials
  double radial_amplitude(double r) const;
  // true for potentials the smooth solvers accept
  bool smooth() const { return tag_ != PotentialTag::disk; }
  bool identically_zero() const;

 private:
  PotentialTag tag_ = PotentialTag::gaussian;
  double scale_ = 1.0, rho_ = 0.0, a0_ = 0.0;
  std::optional<Expr> expr_;
};

// Sufficient lower bound on |k| for solvability of the eikonal problem:
// B + max{u/(4(B - v)), sqrt(u)/2}, requiring B > v.
double min_k_bound(double u_norm, double v_norm, double B);

}  // namespace ds2
