#include "ds2/riccati.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

namespace ds2 {

namespace {

using State = std::array<double, 3>;  // X, J, K
namespace odeint = boost::numeric::odeint;
using boost::math::quadrature::gauss_kronrod;

void require_radial(const Potential& p) {
  if (!p.is_radial()) throw InputError("riccati: potential is not radial");
}

double root_between(const std::function<double(double)>& f, double a, double b) {
  boost::math::tools::eps_tolerance<double> tol(50);
  std::uintmax_t it = 200;
  auto r = boost::math::tools::toms748_solve(f, a, b, tol, it);
  return 0.5 * (r.first + r.second);
}

// location and value of the maximum of r A(r)
std::pair<double, double> ra_max(const Potential& p) {
  if (p.tag() == PotentialTag::disk) return {p.rho(), p.rho() * p.a0()};
  auto f = [&](double r) { return r * p.radial_amplitude(r); };
  double best_r = 0.0, best = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    double r = 1e-3 * std::pow(1e5, i / 2000.0);
    double v = f(r);
    if (v > best) best = v, best_r = r;
  }
  if (best <= 0.0) return {0.0, 0.0};
  auto m = boost::math::tools::brent_find_minima([&](double r) { return -f(r); }, best_r / 1.01, best_r * 1.01, 52);
  return {m.first, -m.second};
}

double hermite(double r0, double r1, double y0, double y1, double d0, double d1, double r) {
  double h = r1 - r0, t = (r - r0) / h;
  double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * h * d0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

}  // namespace

std::pair<double, double> nullclines(double r, double eps, const Potential& p) {
  if (!(r > 0.0)) throw InputError("nullclines: r must be positive");
  require_radial(p);
  double a = p.radial_amplitude(r);
  double er = eps / r;
  if (a == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};
  // X_+ in the cancellation-free form 2A / (eps/r + sqrt(...))
  double xp = 2.0 * a / (er + std::sqrt(er * er + 4.0 * a * a));
  return {xp, -1.0 / xp};
}

double radial_large_root(const Potential& p, double level) {
  require_radial(p);
  auto [rs, mx] = ra_max(p);
  if (!(level < mx)) {
    std::ostringstream os;
    os << "r A(r) = " << level << " has no root (max r A = " << mx << ")";
    throw InputError(os.str());
  }
  if (p.tag() == PotentialTag::disk) return p.rho();
  auto f = [&](double r) { return r * p.radial_amplitude(r) - level; };
  double hi = std::max(2.0 * rs, 1.0);
  while (f(hi) > 0.0) {
    hi *= 2.0;
    if (hi > 1e8) throw InputError("r A(r) does not decay");
  }
  return root_between(f, rs, hi);
}

double r_match(const Potential& p, double eps) {
  if (!(eps > 0.0)) throw InputError("r_match: eps must be positive");
  return radial_large_root(p, eps);
}

double riccati_r0(const Potential& p, double eps) {
  require_radial(p);
  auto f = [&](double r) { return p.radial_amplitude(r) * (1.0 - r * r) / eps - 2.0; };
  if (!(f(0.0) > 0.0)) throw InputError("riccati r0: needs eps < A(0)/2");
  double prev = 0.0;
  const int n = 4000;
  for (int i = 1; i <= n; ++i) {
    double r = double(i) / n;
    if (f(r) <= 0.0) return root_between(f, prev, r);
    prev = r;
  }
  return 1.0;
}

double RiccatiSolution::X(double r) const {
  if (samples.empty() || r <= samples.front().r) return a_origin * r / (2.0 * eps);
  if (r >= samples.back().r) return samples.back().r * samples.back().X / r;
  auto it = std::upper_bound(samples.begin(), samples.end(), r,
                             [](double v, const RiccatiSample& s) { return v < s.r; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  return hermite(a.r, b.r, a.X, b.X, a.dX, b.dX, r);
}

double RiccatiSolution::J(double r) const {
  if (samples.empty()) return 0.0;
  if (r <= samples.front().r) return a_origin * a_origin * r * r / (4.0 * eps * eps);
  if (r >= samples.back().r) return J_inf;
  auto it = std::upper_bound(samples.begin(), samples.end(), r,
                             [](double v, const RiccatiSample& s) { return v < s.r; });
  const auto& b = *it;
  const auto& a = *(it - 1);
  return hermite(a.r, b.r, a.J, b.J, a.dJ, b.dJ, r);
}

RiccatiSolution integrate_riccati(const Potential& p, double eps, double r_max, double tol) {
  require_radial(p);
  if (!(eps > 0.0)) throw InputError("riccati: eps must be positive");
  RiccatiSolution s;
  s.eps = eps;
  s.a_origin = p.radial_amplitude(0.0);
  if (p.identically_zero()) return s;
  if (s.a_origin <= 0.0) throw InputError("riccati: needs A(0) > 0");

  const bool disk = p.tag() == PotentialTag::disk;
  const auto [ra_arg, ra_peak] = ra_max(p);
  s.has_match = eps < ra_peak;
  if (s.has_match) {
    s.r_match = r_match(p, eps);
    s.R0_estimate = 2.0 * s.r_match;
  }
  if (r_max <= 0.0)
    r_max = s.has_match ? 3.0 * s.r_match : std::max(3.0 * ra_arg, radial_large_root(p, 1e-6 * ra_peak));
  if (disk) r_max = p.rho();
  s.r_max = r_max;
  s.r_start = std::min(1e-6, 1e-3 * eps) / s.a_origin;

  auto rhs = [&](const State& y, State& dy, double r) {
    double a = p.radial_amplitude(r);
    dy[0] = (a * (1.0 - y[0] * y[0]) - eps * y[0] / r) / eps;
    dy[1] = a * y[0] / eps;
    dy[2] = r * a / eps;
  };
  // inside a disk the amplitude is the constant a0 all the way to rho
  auto rhs_disk = [&](const State& y, State& dy, double r) {
    double a = p.a0();
    dy[0] = (a * (1.0 - y[0] * y[0]) - eps * y[0] / r) / eps;
    dy[1] = a * y[0] / eps;
    dy[2] = r * a / eps;
  };

  const double a0 = s.a_origin, rs = s.r_start;
  State y{a0 * rs / (2.0 * eps), a0 * a0 * rs * rs / (4.0 * eps * eps), a0 * rs * rs / (2.0 * eps)};
  auto observe = [&](const State& st, double r) {
    State d;
    if (disk)
      rhs_disk(st, d, r);
    else
      rhs(st, d, r);
    s.samples.push_back({r, st[0], d[0], st[1], d[1], st[2]});
  };
  auto stepper = odeint::make_dense_output(tol * 1e-2, tol, odeint::runge_kutta_dopri5<State>());
  try {
    if (disk)
      odeint::integrate_adaptive(stepper, rhs_disk, y, rs, r_max, rs * 0.1, observe);
    else
      odeint::integrate_adaptive(stepper, rhs, y, rs, r_max, rs * 0.1, observe);
  } catch (const std::exception& e) {
    std::ostringstream os;
    os << "riccati: integration failed at eps=" << eps << " (" << e.what()
       << "); use eps >= 1e-4 at this scale";
    throw SolverError(os.str());
  }
  if (s.samples.empty() || !std::isfinite(s.samples.back().X))
    throw SolverError("riccati: integration produced non-finite values; try a larger eps");

  const auto& last = s.samples.back();
  const double Qm = last.r * last.X;
  double Q_inf = Qm, J_inf = last.J, K_tail = 0.0;
  if (!disk) {
    double err = 0.0;
    K_tail = gauss_kronrod<double, 31>::integrate(
        [&](double r) { return r * p.radial_amplitude(r) / eps; }, last.r,
        std::numeric_limits<double>::infinity(), 15, 1e-12, &err);
    if (!std::isfinite(K_tail)) throw InputError("riccati: r A(r) is not integrable");
    Q_inf += gauss_kronrod<double, 31>::integrate(
        [&](double r) {
          double x = Qm / r;
          return r * p.radial_amplitude(r) * (1.0 - x * x) / eps;
        },
        last.r, std::numeric_limits<double>::infinity(), 15, 1e-12);
    J_inf += gauss_kronrod<double, 31>::integrate(
        [&](double r) { return p.radial_amplitude(r) * Qm / (r * eps); }, last.r,
        std::numeric_limits<double>::infinity(), 15, 1e-12);
  }
  s.J_inf = J_inf;
  s.R0_integrated = 2.0 * Q_inf;

  if (!s.has_match) return s;

  // K(r_match) by interpolation; for the disk r_match is the last sample
  double K_rm = last.K;
  if (s.r_match < last.r) {
    auto it = std::upper_bound(s.samples.begin(), s.samples.end(), s.r_match,
                               [](double v, const RiccatiSample& q) { return v < q.r; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    double da = a.r * p.radial_amplitude(a.r) / eps, db = b.r * p.radial_amplitude(b.r) / eps;
    K_rm = hermite(a.r, b.r, a.K, b.K, da, db, s.r_match);
  }
  s.K_match_inf = last.K - K_rm + K_tail;
  s.R_upper = 2.0 * s.r_match + 2.0 * s.K_match_inf;

  // lower bound needs delta = 1/ln(1/eps) in (0,1) and a large root r1
  if (eps < std::exp(-1.0) && eps < 0.5 * a0) {
    s.delta = 1.0 / std::log(1.0 / eps);
    double level = eps / s.delta * (1.0 - s.delta) / (2.0 - s.delta);
    try {
      s.r0 = riccati_r0(p, eps);
      s.r1 = radial_large_root(p, level);
      if (s.r1 > s.r0 && s.r1 <= s.r_match) {
        s.bounds_valid = true;
        s.R_lower = 2.0 * (1.0 - s.delta) * s.r1;
      }
    } catch (const InputError&) {
      s.bounds_valid = false;
    }
  }
  return s;
}

ReflectionK0 reflection_k0(const Potential& p, double eps) {
  RiccatiSolution s = integrate_riccati(p, eps);
  ReflectionK0 r;
  r.has_estimate = s.has_match;
  r.estimate = s.R0_estimate;
  r.integrated = s.R0_integrated;
  r.bounds_valid = s.bounds_valid;
  if (s.bounds_valid) {
    r.lower = s.R_lower;
    r.upper = s.R_upper;
  }
  return r;
}

std::array<double, 4> sandwich_violations(const RiccatiSolution& s, const Potential& p) {
  std::array<double, 4> v{0, 0, 0, 0};
  if (!s.bounds_valid) throw InputError("sandwich: bounds not available at this eps");
  const double d = s.delta, rm = s.r_match;
  double K_rm = 0.0;
  {
    auto it = std::upper_bound(s.samples.begin(), s.samples.end(), rm,
                               [](double x, const RiccatiSample& q) { return x < q.r; });
    if (it == s.samples.end()) {
      K_rm = s.samples.back().K;
    } else {
      const auto& b = *it;
      const auto& a = *(it - 1);
      double da = a.r * p.radial_amplitude(a.r) / s.eps, db = b.r * p.radial_amplitude(b.r) / s.eps;
      K_rm = hermite(a.r, b.r, a.K, b.K, da, db, rm);
    }
  }
  for (const auto& q : s.samples) {
    const double r = q.r, X = q.X;
    if (r <= s.r0) v[0] = std::max({v[0], r - X, X - 1.0});
    if (r >= s.r0 && r <= s.r1) v[1] = std::max({v[1], 1.0 - d - X, X - 1.0});
    if (r >= s.r1 && r <= rm) v[2] = std::max({v[2], (1.0 - d) * s.r1 / r - X, X - 1.0});
    if (r >= rm) {
      double phi5 = (rm + q.K - K_rm) / r;
      v[3] = std::max({v[3], (1.0 - d) * s.r1 / r - X, X - phi5});
    }
  }
  return v;
}

RiccatiPsi riccati_to_psi(const RiccatiSolution& s, const Potential& p, const CartesianGrid& cart) {
  RiccatiPsi out{CField(cart), CField(cart)};
  if (s.samples.empty()) {
    for (auto& v : out.psi1.v) v = 1.0;
    return out;
  }
  const auto& last = s.samples.back();
  const double Qm = last.r * last.X;
  for (int i = 0; i < cart.nx; ++i)
    for (int j = 0; j < cart.ny; ++j) {
      double x = cart.x(i), y = cart.y(j), r = std::hypot(x, y);
      double X, J;
      if (r <= last.r) {
        X = s.X(r);
        J = s.J(r);
      } else {
        X = Qm / r;
        J = s.J_inf - gauss_kronrod<double, 15>::integrate(
                          [&](double t) { return p.radial_amplitude(t) * Qm / (t * s.eps); }, r,
                          std::numeric_limits<double>::infinity(), 5, 1e-10);
      }
      double psi1 = std::exp(J - s.J_inf);
      cplx e = r > 0.0 ? cplx(x / r, y / r) : cplx(0.0);
      out.psi1.at(i, j) = psi1;
      out.psi2.at(i, j) = e * X * psi1;
    }
  return out;
}

double linear_system_check(const RiccatiSolution& s, const Potential& p, double r_a, double r_b) {
  using W = std::array<double, 2>;
  const double eps = s.eps, a0 = s.a_origin, rs = s.r_start;
  auto rhs = [&](const W& w, W& dw, double r) {
    double a = p.radial_amplitude(r);
    dw[0] = a * w[1] / (eps * r);
    dw[1] = r * a * w[0] / eps;
  };
  W w{1.0, a0 * rs * rs / (2.0 * eps)};
  auto stepper = odeint::make_dense_output(1e-14, 1e-12, odeint::runge_kutta_dopri5<W>());
  std::vector<double> times{rs};
  const int n = 200;
  for (int i = 0; i <= n; ++i) times.push_back(r_a + (r_b - r_a) * i / n);
  double worst = 0.0;
  odeint::integrate_times(stepper, rhs, w, times.begin(), times.end(), rs * 0.1, [&](const W& st, double r) {
    if (r < r_a) return;
    double pred = r * s.X(r) * st[0];
    worst = std::max(worst, std::abs(st[1] - pred) / std::abs(st[1]));
  });
  return worst;
}

}  // namespace ds2
