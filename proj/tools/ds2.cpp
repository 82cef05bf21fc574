#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "ds2/dirac.hpp"
#include "ds2/eikonal.hpp"
#include "ds2/field_io.hpp"
#include "ds2/harness.hpp"
#include "ds2/oracles.hpp"
#include "ds2/riccati.hpp"
#include "ds2/svg.hpp"
#include "ds2/wkb.hpp"

using namespace ds2;
using nlohmann::json;

namespace {

// "RE", "RE,IM" or "RE+IMi"
cplx parse_k(const std::string& s) {
  auto comma = s.find(',');
  if (comma == std::string::npos) return parse_complex(s);
  return {parse_real(s.substr(0, comma)), parse_real(s.substr(comma + 1))};
}

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

struct PolarOpts {
  std::string potential = "lorentzian";
  std::string k = "1";
  int nc = 32, nphi = 50;
  double tol = 1e-10;
  int max_iter = 100;
  std::string method = "newton";
  int n_terms = 100;
  std::string out;
};

void add_polar(CLI::App* c, PolarOpts& o, bool with_out = true) {
  c->add_option("--potential", o.potential, "gaussian | lorentzian | disk:RHO:A0 | aniso | expr:TEXT")
      ->capture_default_str();
  c->add_option("--k", o.k, "spectral parameter RE[,IM]")->capture_default_str();
  c->add_option("--nc", o.nc, "Chebyshev degree per domain")->capture_default_str();
  c->add_option("--nphi", o.nphi, "angular points")->capture_default_str();
  c->add_option("--tol", o.tol)->capture_default_str();
  c->add_option("--max-iter", o.max_iter)->capture_default_str();
  c->add_option("--method", o.method, "fixed-point | newton | series")->capture_default_str();
  c->add_option("--n-terms", o.n_terms, "series terms")->capture_default_str();
  if (with_out) c->add_option("--out", o.out, "DSFLD1 file for nodal values on the polar grid");
}

EikonalSolution eikonal_from(const PolarOpts& o, const Potential& p, cplx k) {
  PolarGrid g(o.nc, o.nphi);
  if (o.method == "fixed-point") return solve_fixed_point(p, k, g, o.tol, o.max_iter);
  if (o.method == "newton") return solve_newton(p, k, g, o.tol, std::min(o.max_iter, 30));
  if (o.method == "series") {
    auto s = solve_radial_series(p, o.nc, o.n_terms);
    if (!s.warning.empty()) std::cerr << "warning: " << s.warning << '\n';
    return series_to_solution(s, k, g);
  }
  throw InputError("unknown method '" + o.method + "'");
}

json eikonal_json(const EikonalSolution& s) {
  return {{"method", method_name(s.method)},     {"k", cjson(s.k)},
          {"nc", s.grid.nc},                     {"nphi", s.grid.nphi},
          {"iterations", s.iterations},          {"linear_iterations", s.linear_iterations},
          {"converged", s.converged},            {"residual_sup", s.residual_sup},
          {"filter_threshold", s.filter_threshold}};
}

int cmd_eikonal(const PolarOpts& o) {
  Potential p = Potential::parse(o.potential);
  cplx k = parse_k(o.k);
  auto s = eikonal_from(o, p, k);
  json j = eikonal_json(s);
  if (p.tag() == PotentialTag::lorentzian && p.scale() == 1.0) {
    double e = 0;
    PolarTransform t(s.grid);
    for (int d = 0; d < 2; ++d)
      for (int jr = 0; jr <= s.grid.nc; ++jr) {
        double r = s.grid.radius(d, jr);
        if (!std::isfinite(r) || r == 0) continue;
        for (int i = 0; i < s.grid.nphi; ++i) {
          cplx z = std::polar(r, s.grid.phi[i]);
          e = std::max(e, std::abs(polar_eval(s.coeffs, z.real(), z.imag()) - (lorentzian_f(z, k) - k * z)));
        }
      }
    j["oracle_error"] = e;
  }
  if (!o.out.empty()) {
    PolarTransform t(s.grid);
    write_dsfld(o.out, {to_record(t.inverse(s.coeffs))});
    j["out"] = o.out;
  }
  print(j);
  if (!s.converged) throw SolverError("eikonal solve did not converge");
  return 0;
}

int cmd_alpha0(const PolarOpts& o) {
  Potential p = Potential::parse(o.potential);
  cplx k = parse_k(o.k);
  auto s = eikonal_from(o, p, k);
  if (!s.converged) throw SolverError("eikonal solve did not converge");
  auto a = solve_alpha0(s, p, k, s.grid);
  json j = {{"eikonal", eikonal_json(s)},
            {"iterations", a.iterations},
            {"converged", a.converged},
            {"rel_residual", a.rel_residual}};
  if (p.tag() == PotentialTag::lorentzian && p.scale() == 1.0) {
    double e = 0;
    for (int i = 0; i <= 200; ++i) {
      double r = 0.1 * std::pow(100.0, i / 200.0);
      for (int q = 0; q < 16; ++q) {
        cplx z = std::polar(r, 2 * kPi * q / 16);
        e = std::max(e, std::abs(polar_eval(a.coeffs, z.real(), z.imag()) - lorentzian_alpha0(z, k)));
      }
    }
    j["oracle_error_r_0.1_10"] = e;
  }
  if (!o.out.empty()) {
    PolarTransform t(s.grid);
    write_dsfld(o.out, {to_record(t.inverse(a.coeffs))});
    j["out"] = o.out;
  }
  print(j);
  if (!a.converged) throw SolverError("amplitude solve did not converge");
  return 0;
}

struct DiracOpts {
  std::string potential = "gaussian";
  std::string k = "0";
  double eps = 0.25;
  int nx = 0;
  double box = 4 * kPi;
  double gmres_tol = 1e-10;
  int restart = 50, max_iter = 400, reg_order = 2;
  bool no_check = false;
  std::string out, r0_out;
};

void add_dirac(CLI::App* c, DiracOpts& o, bool with_potential = true) {
  if (with_potential) c->add_option("--potential", o.potential)->capture_default_str();
  c->add_option("--eps", o.eps)->capture_default_str();
  c->add_option("--nx", o.nx, "grid points per side; 0 picks from eps")->capture_default_str();
  c->add_option("--box", o.box, "half width L of [-L, L)^2")->capture_default_str();
  c->add_option("--gmres-tol", o.gmres_tol)->capture_default_str();
  c->add_option("--gmres-restart", o.restart)->capture_default_str();
  c->add_option("--gmres-max-iter", o.max_iter)->capture_default_str();
  c->add_option("--reg-order", o.reg_order)->capture_default_str();
  c->add_flag("--no-resolution-check", o.no_check);
}

DiracProblem problem_from(const DiracOpts& o, double eps, cplx k) {
  DiracProblem pr;
  pr.p = Potential::parse(o.potential);
  pr.eps = eps;
  pr.k = k;
  int nx = o.nx > 0 ? o.nx : default_nx(eps);
  pr.cart = CartesianGrid(nx, nx, o.box, o.box);
  pr.gmres = {o.gmres_tol, o.restart, o.max_iter};
  pr.reg_order = o.reg_order;
  pr.check_resolution = !o.no_check;
  return pr;
}

int cmd_dirac(const DiracOpts& o) {
  cplx k = parse_k(o.k);
  auto pr = problem_from(o, o.eps, k);
  auto s = solve_dirac(pr);
  json j = {{"k", cjson(k)},
            {"eps", o.eps},
            {"nx", pr.cart.nx},
            {"R", cjson(s.R)},
            {"iterations", {s.plus.iterations, s.minus.iterations}},
            {"rel_residual", {s.plus.rel_residual, s.minus.rel_residual}}};
  if (!s.warning.empty()) {
    j["warning"] = s.warning;
    std::cerr << "warning: " << s.warning << '\n';
  }
  if (!o.out.empty()) {
    write_dsfld(o.out, {to_record(s.psi1_scaled), to_record(s.psi2_scaled)});
    j["out"] = o.out;
  }
  if (!o.r0_out.empty()) {
    std::ofstream f(o.r0_out);
    if (!f) throw InputError("cannot write " + o.r0_out);
    f << j.dump(2) << '\n';
  }
  print(j);
  return 0;
}

int cmd_riccati(const std::string& potential, double eps, double tol, const std::string& out) {
  Potential p = Potential::parse(potential);
  auto s = integrate_riccati(p, eps, 0.0, tol);
  json j = {{"eps", eps},
            {"r_start", s.r_start},
            {"r_max", s.r_max},
            {"samples", s.samples.size()},
            {"R0_integrated", s.R0_integrated},
            {"has_match", s.has_match}};
  if (s.has_match) {
    j["r_match"] = s.r_match;
    j["R0_estimate"] = s.R0_estimate;
  }
  if (s.bounds_valid) {
    j["r0"] = s.r0;
    j["r1"] = s.r1;
    j["R_lower"] = s.R_lower;
    j["R_upper"] = s.R_upper;
    auto v = sandwich_violations(s, p);
    j["sandwich_violations"] = v;
  }
  if (!out.empty()) {
    CsvWriter w({"r", "X", "J", "K"});
    for (const auto& x : s.samples) w.row({csv_num(x.r), csv_num(x.X), csv_num(x.J), csv_num(x.K)});
    w.save(out);
    j["out"] = out;
  }
  print(j);
  return 0;
}

int cmd_riccati_r0(const std::string& potential, double eps) {
  auto r = reflection_k0(Potential::parse(potential), eps);
  json j = {{"eps", eps}, {"integrated", r.integrated}, {"semiclassical", 2 * std::sqrt(std::log(1 / eps))}};
  if (r.has_estimate) j["estimate"] = r.estimate;
  if (r.bounds_valid) {
    j["lower"] = r.lower;
    j["upper"] = r.upper;
  }
  print(j);
  return 0;
}

int cmd_wkb_compare(const PolarOpts& po, const DiracOpts& dopt, const std::string& out) {
  Potential p = Potential::parse(po.potential);
  cplx k = parse_k(po.k);
  auto g = eikonal_from(po, p, k);
  if (!g.converged) throw SolverError("eikonal solve did not converge");
  auto w = make_wkb(g, p);
  auto pr = problem_from(dopt, dopt.eps, k);
  pr.p = p;
  auto s = solve_dirac(pr);
  auto on = wkb_on_grid(w, p, pr.cart);
  auto d = delta_fields(s.psi1_scaled, s.psi2_scaled, on, dopt.eps);
  json j = {{"k", cjson(k)}, {"eps", dopt.eps}, {"nx", pr.cart.nx}, {"delta1_sup", d.sup1}, {"delta2_sup", d.sup2}};
  if (!out.empty()) {
    CField f1(pr.cart), f2(pr.cart);
    for (size_t i = 0; i < d.d1.size(); ++i) {
      f1.v[i] = d.d1[i];
      f2.v[i] = d.d2[i];
    }
    write_dsfld(out, {to_record(f1), to_record(f2)});
    j["out"] = out;
  }
  print(j);
  return 0;
}

int cmd_scan(const DiracOpts& o, double kmin, double kmax, int steps, const std::string& out, const std::string& plot) {
  if (steps < 1 || !(kmax > kmin)) throw InputError("need k-max > k-min and k-steps >= 1");
  std::vector<double> ks(steps + 1);
  for (int i = 0; i <= steps; ++i) ks[i] = kmin + (kmax - kmin) * i / steps;
  std::vector<cplx> R(ks.size());
  parallel_for(int(ks.size()), [&](int i) { R[i] = solve_dirac(problem_from(o, o.eps, ks[i])).R; });
  CsvWriter w({"k", "re_R", "im_R"});
  for (size_t i = 0; i < ks.size(); ++i) w.row({csv_num(ks[i]), csv_num(R[i].real()), csv_num(R[i].imag())});
  if (out.empty()) std::cout << w.str();
  else w.save(out);
  if (!plot.empty()) {
    PlotSeries s{"eps=" + csv_num(o.eps), ks, {}};
    for (cplx r : R) s.y.push_back(r.real());
    PlotStyle st;
    st.title = "reflection coefficient";
    st.xlabel = "k";
    st.ylabel = "R";
    st.vlines = {0.5};
    emit_plot(plot, {s}, st);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiclassical direct spectral transform for defocusing DS-II"};
  app.require_subcommand(1);

  PolarOpts eik, alp, wpo;
  auto* c_eik = app.add_subcommand("eikonal", "solve the eikonal problem on the polar grid");
  add_polar(c_eik, eik);
  auto* c_alp = app.add_subcommand("alpha0", "solve the leading WKB amplitude");
  add_polar(c_alp, alp);

  DiracOpts dir;
  auto* c_dir = app.add_subcommand("dirac", "solve the Dirac system for one (k, eps)");
  add_dirac(c_dir, dir);
  c_dir->add_option("--k", dir.k, "RE[,IM]")->capture_default_str();
  c_dir->add_option("--out", dir.out, "DSFLD1 file with psi1, psi2 times e^{-kz/eps}");
  c_dir->add_option("--r0-out", dir.r0_out, "JSON file with R");

  std::string ric_pot = "gaussian", ric_out;
  double ric_eps = 0.1, ric_tol = 1e-12;
  auto* c_ric = app.add_subcommand("riccati", "integrate the k = 0 Riccati equation");
  c_ric->add_option("--potential", ric_pot)->capture_default_str();
  c_ric->add_option("--eps", ric_eps)->capture_default_str();
  c_ric->add_option("--tol", ric_tol)->capture_default_str();
  c_ric->add_option("--out", ric_out, "CSV of samples r, X, J, K");

  std::string r0_pot = "gaussian";
  double r0_eps = 0.01;
  auto* c_r0 = app.add_subcommand("riccati-r0", "k = 0 reflection coefficient with bounds");
  c_r0->add_option("--potential", r0_pot)->capture_default_str();
  c_r0->add_option("--eps", r0_eps)->capture_default_str();

  auto* c_or = app.add_subcommand("oracle", "closed-form reference values");
  c_or->require_subcommand(1);
  std::string or_z = "1", or_k = "1";
  auto* o_lf = c_or->add_subcommand("lorentzian-f", "exponent f for A = 1/(1+|z|^2)");
  o_lf->add_option("--z", or_z, "RE[,IM]")->capture_default_str();
  o_lf->add_option("--k", or_k, "RE[,IM]")->capture_default_str();
  std::string bp_k = "0.3";
  auto* o_bp = c_or->add_subcommand("branch-points", "Lorentzian branch points for |k| < 1/2");
  o_bp->add_option("--k", bp_k, "RE[,IM]")->capture_default_str();
  double d_rho = 1, d_a0 = 1, d_eps = 0.1;
  auto* o_dk = c_or->add_subcommand("disk-r0", "k = 0 reflection coefficient of a disk");
  o_dk->add_option("--rho", d_rho)->capture_default_str();
  o_dk->add_option("--a0", d_a0)->capture_default_str();
  o_dk->add_option("--eps", d_eps)->capture_default_str();

  DiracOpts wdir;
  std::string w_out;
  wpo.potential = "gaussian";
  wpo.nc = 40;
  wpo.nphi = 64;
  auto* c_wkb = app.add_subcommand("wkb-compare", "sup norms of Delta1, Delta2 for one (k, eps)");
  add_polar(c_wkb, wpo, false);
  add_dirac(c_wkb, wdir, false);
  c_wkb->add_option("--out", w_out, "DSFLD1 file with Delta1, Delta2");

  DiracOpts sdir;
  double kmin = 0, kmax = 1.2;
  int ksteps = 60;
  std::string s_out, s_plot;
  auto* c_scan = app.add_subcommand("reflection-scan", "R along real k for one eps");
  add_dirac(c_scan, sdir);
  c_scan->add_option("--k-min", kmin)->capture_default_str();
  c_scan->add_option("--k-max", kmax)->capture_default_str();
  c_scan->add_option("--k-steps", ksteps)->capture_default_str();
  c_scan->add_option("--out", s_out, "CSV with columns k, re_R, im_R (stdout if absent)");
  c_scan->add_option("--plot", s_plot, "SVG plot");

  std::string cfg_path;
  auto* c_run = app.add_subcommand("run", "run an experiment from a config file");
  c_run->add_option("--config", cfg_path)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*c_eik) return cmd_eikonal(eik);
    if (*c_alp) return cmd_alpha0(alp);
    if (*c_dir) return cmd_dirac(dir);
    if (*c_ric) return cmd_riccati(ric_pot, ric_eps, ric_tol, ric_out);
    if (*c_r0) return cmd_riccati_r0(r0_pot, r0_eps);
    if (*o_lf) {
      cplx z = parse_k(or_z), k = parse_k(or_k);
      print({{"z", cjson(z)}, {"k", cjson(k)}, {"f", cjson(lorentzian_f(z, k))}, {"alpha0", cjson(lorentzian_alpha0(z, k))}});
      return 0;
    }
    if (*o_bp) {
      json pts = json::array();
      for (cplx z : lorentzian_branch_points(parse_k(bp_k))) pts.push_back(cjson(z));
      print({{"k", cjson(parse_k(bp_k))}, {"points", pts}});
      return 0;
    }
    if (*o_dk) {
      print({{"rho", d_rho}, {"a0", d_a0}, {"eps", d_eps}, {"R", disk_reflection_k0(d_rho, d_a0, d_eps)}});
      return 0;
    }
    if (*c_wkb) return cmd_wkb_compare(wpo, wdir, w_out);
    if (*c_scan) return cmd_scan(sdir, kmin, kmax, ksteps, s_out, s_plot);
    if (*c_run) {
      auto cfg = experiment_from(ConfigFile::load(cfg_path));
      auto man = run_experiment(cfg);
      for (const auto& c : man.checks) {
        bool declared = std::isfinite(c.bounds.lo) || std::isfinite(c.bounds.hi);
        std::printf("%-40s %-14s %s\n", c.name.c_str(), csv_num(c.value).c_str(),
                    declared ? (c.pass ? "PASS" : "FAIL") : "-");
      }
      if (!man.error.empty()) std::fprintf(stderr, "error: %s\n", man.error.c_str());
      std::printf("manifest: %s/manifest.json (%.1f s)\n", cfg.out_dir.c_str(), man.runtime_s);
      return man.exit_code();
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
