#pragma once

#include <array>
#include <utility>

#include "ds2/cartesian.hpp"
#include "ds2/potential.hpp"

namespace ds2 {

// k = 0 radial analysis of  eps X' = A(1 - X^2) - eps X / r,  X = O(r) at 0.
struct RiccatiSample {
  double r, X, dX;
  double J, dJ;  // \int_0^r A X / eps and its derivative
  double K;  // \int_0^r s A / eps
};

struct RiccatiSolution {
  double eps = 0.0;
  std::vector<RiccatiSample> samples;
  double a_origin = 0.0;  // A(0)
  double r_start = 0.0, r_max = 0.0;
  bool has_match = false;  // eps < max r A(r)
  double r_match = 0.0, r0 = 0.0, r1 = 0.0, delta = 0.0;
  bool bounds_valid = false;
  double R_lower = 0.0, R_upper = 0.0;
  double R0_estimate = 0.0;   // 2 r_match
  double R0_integrated = 0.0; // 2 lim r X
  double J_inf = 0.0;         // \int_0^\infty A X / eps
  double K_match_inf = 0.0;   // \int_{r_match}^\infty s A / eps

  // Hermite interpolation of X, J; analytic beyond the sampled range
  double X(double r) const;
  double J(double r) const;
};

// (X_+, X_-) at r; X_+ X_- = -1
std::pair<double, double> nullclines(double r, double eps, const Potential& p);

// large root of r A(r) = level; support endpoint for the disk
double r_match(const Potential& p, double eps);
double radial_large_root(const Potential& p, double level);
// smallest root of A(r)(1 - r^2)/eps = 2
double riccati_r0(const Potential& p, double eps);

RiccatiSolution integrate_riccati(const Potential& p, double eps, double r_max = 0.0, double tol = 1e-12);

struct ReflectionK0 {
  double estimate = 0.0, lower = 0.0, upper = 0.0, integrated = 0.0;
  bool has_estimate = false, bounds_valid = false;
};
ReflectionK0 reflection_k0(const Potential& p, double eps);

// largest violation of the four sandwich inequalities over the samples
// (0 when all hold); entries: (0,r0], [r0,r1], [r1,r_match], [r_match,inf)
std::array<double, 4> sandwich_violations(const RiccatiSolution& s, const Potential& p);

// psi1, psi2 on a Cartesian grid
struct RiccatiPsi {
  CField psi1, psi2;
};
RiccatiPsi riccati_to_psi(const RiccatiSolution& s, const Potential& p, const CartesianGrid& cart);

// Integrates  eps r w1' = A w2,  eps r w2' = r^2 A w1  from the regular
// solution at the origin and returns max |w2 - r X w1| / |w2| on [r_a, r_b].
double linear_system_check(const RiccatiSolution& s, const Potential& p, double r_a, double r_b);

}  // namespace ds2
