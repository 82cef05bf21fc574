// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "ds2/dirac.hpp"
#include "ds2/eikonal.hpp"
#include "ds2/harness.hpp"
#include "ds2/oracles.hpp"
#include "ds2/riccati.hpp"
#include "ds2/wkb.hpp"

using namespace ds2;

namespace {

int failures = 0;

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void report(int id, const char* name, bool pass, const std::string& detail, double secs) {
  if (!pass) ++failures;
  std::printf("criterion %2d %-4s %-28s %s (%.1f s)\n", id, pass ? "PASS" : "FAIL", name, detail.c_str(), secs);
  std::fflush(stdout);
}

void run(int id, const char* name, const std::function<bool(std::string&)>& body) {
  double t0 = now_s();
  std::string detail;
  bool pass = false;
  try {
    pass = body(detail);
  } catch (const std::exception& e) {
    detail += std::string(" error: ") + e.what();
  }
  report(id, name, pass, detail, now_s() - t0);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double lorentzian_error(const SpectralCoeffs& c, cplx k) {
  double e = 0;
  for (double r : {0.05, 0.3, 0.7, 1.0, 1.5, 3.0, 10.0})
    for (int i = 0; i < 13; ++i) {
      cplx z = std::polar(r, 2 * kPi * i / 13);
      e = std::max(e, std::abs(polar_eval(c, z.real(), z.imag()) - (lorentzian_f(z, k) - k * z)));
    }
  return e;
}

}  // namespace

int main() {
  auto lor = Potential::lorentzian();
  auto gau = Potential::gaussian();

  run(1, "lorentzian fixed point", [&](std::string& d) {
    double t0 = now_s();
    auto s = solve_fixed_point(lor, 1.0, PolarGrid(32, 50));
    double secs = now_s() - t0, err = lorentzian_error(s.coeffs, 1.0);
    d = fmt("iterations %d, error %.2e, solve %.2f s", s.iterations, err, secs);
    return s.converged && err <= 1e-8 && s.iterations <= 15 && secs < 10;
  });

  run(2, "lorentzian newton", [&](std::string& d) {
    auto n1 = solve_newton(lor, 1.0, PolarGrid(32, 50));
    double e1 = lorentzian_error(n1.coeffs, 1.0);
    PolarGrid g(40, 140);
    auto f6 = solve_fixed_point(lor, 0.6, g);
    auto n6 = solve_newton(lor, 0.6, g);
    double e6 = lorentzian_error(n6.coeffs, 0.6);
    d = fmt("k=1 newton %d it err %.2e; k=0.6 fixed point %d it, newton %d it err %.2e", n1.iterations, e1,
            f6.iterations, n6.iterations, e6);
    return n1.converged && n1.iterations <= 5 && e1 <= 1e-8 && f6.converged && f6.iterations <= 30 &&
           n6.converged && n6.iterations <= 6;
  });

  run(3, "radial series vs catalan", [&](std::string& d) {
    auto s = solve_radial_series(lor, 64, 51);
    double e = 0;
    for (int n = 0; n <= 50; ++n) {
      double mx = 0, diff = 0;
      for (int i = 1; i <= 400; ++i) {
        double r = 0.05 * i;
        mx = std::max(mx, std::abs(lorentzian_cn(n, r)));
        diff = std::max(diff, std::abs(s.eval(n, r) - lorentzian_cn(n, r)));
      }
      e = std::max(e, diff / mx);
    }
    d = fmt("sup relative error %.2e over n <= 50", e);
    return e <= 1e-10;
  });

  run(4, "gaussian G2 closed form", [&](std::string& d) {
    auto s = solve_radial_series(gau, 64, 4);
    double e = 0;
    for (int i = 0; i <= 500; ++i) {
      double m = 5.0 * i / 500, r = std::sqrt(m);
      double G2 = 3.0 / 16 * (1 - 4 * std::exp(-2 * m) + (3 + 4 * m) * std::exp(-4 * m));
      e = std::max(e, std::abs(6 * r * r * r * s.eval(1, r) - G2));
    }
    d = fmt("sup error %.2e on m in [0,5]", e);
    return e <= 1e-10;
  });

  run(5, "threshold estimate", [&](std::string& d) {
    auto s = solve_radial_series(gau, 64, 200);
    auto f = estimate_threshold(s);
    double slope = loglog_slope(solve_radial_series(lor, 64, 200).sup_norms);
    d = fmt("k_crit %.4f, beta %.4f (log10 norms; natural log %.4f), lorentzian slope %.3f", f.k_crit, f.beta10,
            f.beta, slope);
    return std::abs(f.k_crit - 0.5) <= 0.02 && std::abs(f.beta10 - 1.10) <= 0.05 && std::abs(slope + 2.5) <= 0.1;
  });

  run(6, "alpha0 lorentzian", [&](std::string& d) {
    PolarGrid g(32, 50);
    auto s = solve_newton(lor, 1.0, g);
    auto a = solve_alpha0(s, lor, 1.0, g);
    double e = 0;
    for (int i = 0; i <= 400; ++i) {
      double r = 0.1 * std::pow(100.0, i / 400.0);
      for (int q = 0; q < 16; ++q) {
        cplx z = std::polar(r, 2 * kPi * q / 16);
        e = std::max(e, std::abs(polar_eval(a.coeffs, z.real(), z.imag()) - lorentzian_alpha0(z, 1.0)));
      }
    }
    d = fmt("sup error %.2e on r in [0.1,10], %d iterations", e, a.iterations);
    return a.converged && e <= 1e-7;
  });

  run(7, "riccati vs bessel (disk)", [&](std::string& d) {
    auto disk = Potential::disk(1.0, 1.0);
    double worst = 0;
    for (double eps : {0.2, 0.1, 0.05}) {
      double ref = 2 * bessel_i1_over_i0(1 / eps);
      double r = integrate_riccati(disk, eps).R0_integrated;
      worst = std::max(worst, std::abs(r - ref) / ref);
    }
    d = fmt("max relative error %.2e", worst);
    return worst <= 1e-6;
  });

  run(8, "riccati sandwich bounds", [&](std::string& d) {
    auto s = integrate_riccati(gau, 1e-3);
    auto v = sandwich_violations(s, gau);
    d = fmt("violations %.1e %.1e %.1e %.1e", v[0], v[1], v[2], v[3]);
    return v[0] <= 1e-6 && v[1] <= 1e-6 && v[2] <= 1e-6 && v[3] <= 1e-6;
  });

  run(9, "k=0 reflection bounds trend", [&](std::string& d) {
    bool ok = true;
    double prev = 0;
    for (double eps : {1e-2, 1e-3, 1e-4}) {
      auto r = reflection_k0(gau, eps);
      double ratio = r.integrated / (2 * std::sqrt(std::log(1 / eps)));
      d += fmt("eps %g: %.4f in (%.4f, %.4f) ratio %.4f; ", eps, r.integrated, r.lower, r.upper, ratio);
      ok = ok && r.bounds_valid && r.lower < r.integrated && r.integrated < r.upper && ratio >= 0.6 && ratio <= 1.0 &&
           ratio > prev;
      prev = ratio;
    }
    return ok;
  });

  run(10, "dirac sanity", [&](std::string& d) {
    DiracProblem z;
    z.p = Potential::custom("0");
    z.k = 1.0;
    z.eps = 0.25;
    z.cart = CartesianGrid(64, 64);
    auto s0 = solve_dirac(z);
    bool zero = s0.R == cplx(0.0);
    for (size_t i = 0; i < s0.psi2_scaled.v.size(); ++i)
      zero = zero && s0.psi2_scaled.v[i] == cplx(0.0) && s0.psi1_scaled.v[i] == cplx(1.0) &&
             s0.plus.m.v[i] == cplx(0.0) && s0.minus.m.v[i] == cplx(0.0);
    DiracProblem pr;
    pr.p = gau;
    pr.k = 1.0;
    pr.eps = 0.25;
    pr.cart = CartesianGrid(512, 512);
    auto s = solve_dirac(pr);
    double res = dirac_residual(s, pr);
    d = fmt("zero potential exact: %s; gaussian residual %.2e", zero ? "yes" : "no", res);
    return zero && res <= 1e-6;
  });

  run(11, "dirac vs riccati at k=0", [&](std::string& d) {
    double worst = 0;
    for (double eps : {1.0, 0.5, 0.25}) {
      DiracProblem pr;
      pr.p = gau;
      pr.k = 0.0;
      pr.eps = eps;
      int nx = default_nx(eps);
      pr.cart = CartesianGrid(nx, nx);
      double rd = solve_dirac(pr).R.real();
      double rr = integrate_riccati(gau, eps).R0_integrated;
      worst = std::max(worst, std::abs(rd - rr) / std::abs(rr));
      d += fmt("eps %g: %.8f vs %.8f; ", eps, rd, rr);
    }
    d += fmt("max relative difference %.1e", worst);
    return worst <= 1e-2;
  });

  run(12, "WKB convergence rate", [&](std::string& d) {
    std::vector<double> eps = {0.5, 0.25, 0.125, 0.0625};
    bool ok = true;
    for (double kk : {1.0, 0.75, 1.25}) {
      PolarGrid g = kk == 0.75 ? PolarGrid(48, 96) : PolarGrid(40, 64);
      auto s = solve_newton(gau, kk, g);
      if (!s.converged) throw SolverError("eikonal did not converge");
      auto w = make_wkb(s, gau);
      std::vector<double> d1(eps.size()), d2(eps.size());
      parallel_for(int(eps.size()), [&](int i) {
        DiracProblem pr;
        pr.p = gau;
        pr.k = kk;
        pr.eps = eps[i];
        int nx = eps[i] >= 0.25 ? 512 : 1024;
        pr.cart = CartesianGrid(nx, nx);
        auto sol = solve_dirac(pr);
        auto on = wkb_on_grid(w, gau, pr.cart);
        auto df = delta_fields(sol.psi1_scaled, sol.psi2_scaled, on, eps[i]);
        d1[i] = df.sup1;
        d2[i] = df.sup2;
      });
      auto r1 = regression_loglog(eps, d1), r2 = regression_loglog(eps, d2);
      double lo = kk == 1.0 ? 0.85 : 0.80, hi = kk == 1.0 ? 1.10 : 1.15;
      bool pass = r1.slope >= lo && r1.slope <= hi && r2.slope >= lo && r2.slope <= hi;
      ok = ok && pass;
      d += fmt("k=%g slopes %.3f/%.3f (intercepts %.3f/%.3f, Delta2 %.3g..%.3g) %s; ", kk, r1.slope, r2.slope,
               r1.intercept, r2.intercept, d2.front(), d2.back(), pass ? "ok" : "out of range");
    }
    return ok;
  });

  run(13, "reflection scan shape", [&](std::string& d) {
    bool ok = true;
    const int nk = 25;  // k = 0, 0.05, ..., 1.2
    for (double eps : {0.1, 0.05}) {
      std::vector<cplx> R(nk);
      parallel_for(nk, [&](int i) {
        DiracProblem pr;
        pr.p = gau;
        pr.k = 0.05 * i;
        pr.eps = eps;
        pr.cart = CartesianGrid(512, 512);
        R[i] = solve_dirac(pr).R;
      });
      double imag = 0;
      int rises = 0;
      for (int i = 0; i < nk; ++i) {
        imag = std::max(imag, std::abs(R[i].imag()));
        if (i > 11 && R[i].real() >= R[i - 1].real()) ++rises;  // k in [0.55, 1.2]
      }
      double r0 = R[0].real(), r1 = R[20].real(), sc = 2 * std::sqrt(std::log(1 / eps));
      bool pass = imag <= 1e-6 && rises == 0 && r1 < 0.05 * r0 && std::abs(r0 / sc - 1) <= 0.15;
      ok = ok && pass;
      d += fmt("eps %g: max |Im R| %.1e, rises %d, R(1)/R(0) %.1e, R(0)/2sqrt(ln 1/eps) %.3f; ", eps, imag, rises,
               r1 / r0, r0 / sc);
    }
    return ok;
  });

  std::printf("%d of 13 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
