#include "ds2/harness.hpp"

#include <fftw3.h>
#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <Eigen/Core>
#include <boost/version.hpp>
#include <json.hpp>

#include "ds2/dirac.hpp"
#include "ds2/eikonal.hpp"
#include "ds2/field_io.hpp"
#include "ds2/kernels.hpp"
#include "ds2/oracles.hpp"
#include "ds2/riccati.hpp"
#include "ds2/svg.hpp"
#include "ds2/wkb.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ds2 {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

}  // namespace

// ---- config ----------------------------------------------------------------

ConfigFile ConfigFile::parse(const std::string& text) {
  ConfigFile c;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw InputError("config line " + std::to_string(lineno) + ": unterminated section");
      section = trim(line.substr(1, line.size() - 2));
      c.data_[section];
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError("config line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw InputError("config line " + std::to_string(lineno) + ": empty key");
    c.data_[section][key] = trim(line.substr(eq + 1));
  }
  return c;
}

ConfigFile ConfigFile::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot read config " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

bool ConfigFile::has(const std::string& section, const std::string& key) const {
  auto it = data_.find(section);
  return it != data_.end() && it->second.count(key);
}

std::string ConfigFile::get(const std::string& section, const std::string& key, const std::string& def) const {
  auto it = data_.find(section);
  if (it == data_.end()) return def;
  auto kv = it->second.find(key);
  return kv == it->second.end() ? def : kv->second;
}

double ConfigFile::get_double(const std::string& section, const std::string& key, double def) const {
  return has(section, key) ? parse_real(get(section, key)) : def;
}

int ConfigFile::get_int(const std::string& section, const std::string& key, int def) const {
  if (!has(section, key)) return def;
  double v = parse_real(get(section, key));
  if (v != std::floor(v)) throw InputError("[" + section + "] " + key + " must be an integer");
  return int(v);
}

const std::map<std::string, std::string>& ConfigFile::section(const std::string& name) const {
  static const std::map<std::string, std::string> empty;
  auto it = data_.find(name);
  return it == data_.end() ? empty : it->second;
}

std::vector<std::string> ConfigFile::sections() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : data_) out.push_back(k);
  return out;
}

double parse_real(const std::string& text) {
  std::string s = trim(text);
  if (auto slash = s.find('/'); slash != std::string::npos)
    return parse_real(s.substr(0, slash)) / parse_real(s.substr(slash + 1));
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError("not a number: '" + text + "'");
  return v;
}

cplx parse_complex(const std::string& text) {
  std::string s = trim(text);
  if (s.empty()) throw InputError("empty complex number");
  if (s.back() != 'i') return parse_real(s);
  std::string body = s.substr(0, s.size() - 1);
  // split at the last sign that is not an exponent sign or the leading one
  for (size_t i = body.size(); i-- > 1;)
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      std::string im = body.substr(i);
      if (im == "+" || im == "-") im += "1";
      return {parse_real(body.substr(0, i)), parse_real(im[0] == '+' ? im.substr(1) : im)};
    }
  if (body.empty() || body == "+") return {0, 1};
  if (body == "-") return {0, -1};
  return {0, parse_real(body)};
}

std::vector<double> parse_real_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& t : split(s, ',')) out.push_back(parse_real(t));
  return out;
}

std::vector<cplx> parse_complex_list(const std::string& s) {
  std::vector<cplx> out;
  for (const auto& t : split(s, ',')) out.push_back(parse_complex(t));
  return out;
}

namespace {

const std::vector<std::string> kTags = {"eikonal-accuracy", "alpha0-accuracy", "wkb-convergence",
                                        "reflection-scan",  "riccati-bounds",  "threshold-estimate"};

bool parse_bool(const std::string& s) {
  std::string t = trim(s);
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off" || t.empty()) return false;
  throw InputError("not a boolean: '" + s + "'");
}

}  // namespace

ExperimentConfig experiment_from(const ConfigFile& cfg) {
  ExperimentConfig e;
  e.tag = cfg.get("experiment", "tag");
  e.potential = cfg.get("experiment", "potential", e.potential);
  e.ks = parse_complex_list(cfg.get("experiment", "k"));
  e.eps = parse_real_list(cfg.get("experiment", "eps"));
  e.out_dir = cfg.get("experiment", "out_dir", e.out_dir);
  e.write_fields = parse_bool(cfg.get("experiment", "write_fields", "false"));

  e.nc = cfg.get_int("grid", "nc", e.nc);
  e.nphi = cfg.get_int("grid", "nphi", e.nphi);
  e.nx = cfg.get_int("grid", "nx", e.nx);
  e.box = cfg.get_double("grid", "box", e.box);
  // polar_override = K:NC:NPHI, ...
  for (const auto& item : split(cfg.get("grid", "polar_override"), ',')) {
    auto parts = split(item, ':');
    if (parts.size() != 3) throw InputError("polar_override entries are K:NC:NPHI, got '" + item + "'");
    e.polar_override[parse_real(parts[0])] = {int(parse_real(parts[1])), int(parse_real(parts[2]))};
  }

  e.tol = cfg.get_double("solver", "tol", e.tol);
  e.max_iter = cfg.get_int("solver", "max_iter", e.max_iter);
  e.gmres_tol = cfg.get_double("solver", "gmres_tol", e.gmres_tol);
  e.gmres_restart = cfg.get_int("solver", "gmres_restart", e.gmres_restart);
  e.gmres_max_iter = cfg.get_int("solver", "gmres_max_iter", e.gmres_max_iter);

  e.k_min = cfg.get_double("scan", "k_min", e.k_min);
  e.k_max = cfg.get_double("scan", "k_max", e.k_max);
  e.k_steps = cfg.get_int("scan", "k_steps", e.k_steps);

  e.n_terms = cfg.get_int("series", "n_terms", e.n_terms);
  e.n_min = cfg.get_int("series", "n_min", e.n_min);

  for (const auto& [name, range] : cfg.section("thresholds")) {
    auto parts = split(range, ',');
    if (parts.size() != 2) throw InputError("threshold '" + name + "' must be lo,hi");
    auto bound = [](const std::string& s, double inf) {
      if (s == "-inf" || s == "inf" || s == "*") return inf;
      return parse_real(s);
    };
    e.thresholds[name] = {bound(parts[0], -INFINITY), bound(parts[1], INFINITY)};
  }
  validate(e);
  return e;
}

void validate(const ExperimentConfig& e) {
  if (std::find(kTags.begin(), kTags.end(), e.tag) == kTags.end())
    throw InputError("unknown experiment tag '" + e.tag + "'");
  Potential::parse(e.potential);
  bool needs_k = e.tag == "eikonal-accuracy" || e.tag == "alpha0-accuracy" || e.tag == "wkb-convergence";
  bool needs_eps = e.tag == "wkb-convergence" || e.tag == "reflection-scan" || e.tag == "riccati-bounds";
  if (needs_k && e.ks.empty()) throw InputError(e.tag + " needs a k list");
  if (needs_eps && e.eps.empty()) throw InputError(e.tag + " needs an eps list");
  for (double v : e.eps)
    if (!(v > 0)) throw InputError("eps values must be positive");
  if (e.tag == "wkb-convergence" || e.tag == "riccati-bounds")
    for (size_t i = 1; i < e.eps.size(); ++i)
      if (!(e.eps[i] < e.eps[i - 1])) throw InputError("eps list must be strictly decreasing for " + e.tag);
  if (e.nc < 4 || e.nphi < 4) throw InputError("polar grid too small");
  if (e.tag == "reflection-scan" && (e.k_steps < 1 || !(e.k_max > e.k_min)))
    throw InputError("scan needs k_max > k_min and k_steps >= 1");
  if (e.out_dir.empty()) throw InputError("out_dir is empty");
}

// ---- regression ------------------------------------------------------------

RegressionResult regression_loglog(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw InputError("regression: length mismatch");
  if (xs.size() < 3) throw InputError("regression needs at least 3 points");
  RegressionResult r;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0) || !(ys[i] > 0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw InputError("regression: values must be positive and finite");
    r.points.emplace_back(std::log10(xs[i]), std::log10(ys[i]));
  }
  double n = double(r.points.size()), mx = 0, my = 0;
  for (auto [x, y] : r.points) {
    mx += x / n;
    my += y / n;
  }
  double sxx = 0, sxy = 0;
  for (auto [x, y] : r.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  if (sxx == 0) throw InputError("regression: x values are all equal");
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ss = 0;
  for (auto [x, y] : r.points) ss += std::pow(y - r.intercept - r.slope * x, 2);
  r.residual_rms = std::sqrt(ss / n);
  return r;
}

// ---- hashing, pool, csv ----------------------------------------------------

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return sha256_hex(ss.str());
}

int worker_count() {
  int n = int(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("DS2_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, cap);
  }
  return n;
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  int nt = std::min(worker_count(), n);
  std::vector<std::exception_ptr> errors(std::max(n, 0));
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&] {
        for (int i; !failed && (i = next++) < n;) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
            failed = true;
          }
        }
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string csv_num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt_num(v);
}

CsvWriter::CsvWriter(std::vector<std::string> columns) : ncol_(columns.size()) {
  for (size_t i = 0; i < columns.size(); ++i) text_ += (i ? "," : "") + columns[i];
  text_ += '\n';
}

CsvWriter& CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != ncol_) throw InputError("csv row has the wrong number of cells");
  for (size_t i = 0; i < cells.size(); ++i) text_ += (i ? "," : "") + cells[i];
  text_ += '\n';
  return *this;
}

void CsvWriter::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot write " + path);
  f << text_;
}

bool Manifest::passed() const {
  if (!error.empty()) return false;
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

int Manifest::exit_code() const {
  if (!error.empty()) return 1;
  return passed() ? 0 : 2;
}

// ---- experiments -----------------------------------------------------------

namespace {

std::string k_label(cplx k) {
  std::string s = csv_num(k.real());
  if (k.imag() != 0) s += (k.imag() > 0 ? "+" : "") + csv_num(k.imag()) + "i";
  return s;
}

struct Run {
  const ExperimentConfig& cfg;
  Manifest& man;
  fs::path dir;
  json jobs = json::array();
  std::mutex mu;

  Run(const ExperimentConfig& c, Manifest& m) : cfg(c), man(m), dir(c.out_dir) {}

  void artifact(const std::string& name) {
    fs::path p = dir / name;
    man.artifacts.push_back({name, sha256_file(p.string()), fs::file_size(p)});
  }
  void csv(const std::string& name, const CsvWriter& w) {
    w.save((dir / name).string());
    artifact(name);
  }
  void plot(const std::string& name, const std::vector<PlotSeries>& s, const PlotStyle& st) {
    emit_plot((dir / name).string(), s, st);
    artifact(name);
  }
  void heatmap(const std::string& name, const HeatMap& h, const PlotStyle& st) {
    emit_heatmap((dir / name).string(), h, st);
    artifact(name);
  }
  void fields(const std::string& name, const std::vector<FieldRecord>& recs) {
    write_dsfld((dir / name).string(), recs);
    artifact(name);
  }
  // threshold lookup: exact name first, then the part before '@'
  void check(const std::string& name, double value) {
    CheckResult c{name, value, {}, true};
    auto it = cfg.thresholds.find(name);
    if (it == cfg.thresholds.end()) it = cfg.thresholds.find(name.substr(0, name.find('@')));
    if (it != cfg.thresholds.end()) {
      c.bounds = it->second;
      c.pass = value >= c.bounds.lo && value <= c.bounds.hi;
    }
    man.checks.push_back(c);
  }
  void job_time(const std::string& what, double seconds) {
    std::lock_guard<std::mutex> lock(mu);
    jobs.push_back({{"job", what}, {"seconds", seconds}});
  }
  PolarGrid polar_for(cplx k) const {
    for (const auto& [kr, g] : cfg.polar_override)
      if (std::abs(kr - k.real()) < 1e-12) return PolarGrid(g.first, g.second);
    return PolarGrid(cfg.nc, cfg.nphi);
  }
  int nx_for(double eps) const { return cfg.nx > 0 ? cfg.nx : default_nx(eps); }
  GmresOptions gmres() const { return {cfg.gmres_tol, cfg.gmres_restart, cfg.gmres_max_iter}; }
};

PlotStyle style(std::string title, std::string xlabel, std::string ylabel, bool logx = false, bool logy = false) {
  PlotStyle s;
  s.title = std::move(title);
  s.xlabel = std::move(xlabel);
  s.ylabel = std::move(ylabel);
  s.logx = logx;
  s.logy = logy;
  return s;
}

EikonalSolution solve_eikonal(const Run& run, const Potential& p, cplx k, EikonalMethod m) {
  PolarGrid g = run.polar_for(k);
  if (m == EikonalMethod::newton) return solve_newton(p, k, g, run.cfg.tol, std::min(run.cfg.max_iter, 30));
  return solve_fixed_point(p, k, g, run.cfg.tol, run.cfg.max_iter);
}

// sup |g - (f - kz)| against the closed form on a fixed sample of rings
double lorentzian_g_error(const SpectralCoeffs& c, cplx k) {
  double e = 0;
  for (double r : {0.05, 0.3, 0.7, 1.0, 1.5, 3.0, 10.0})
    for (int i = 0; i < 13; ++i) {
      cplx z = std::polar(r, 2 * kPi * i / 13);
      e = std::max(e, std::abs(polar_eval(c, z.real(), z.imag()) - (lorentzian_f(z, k) - k * z)));
    }
  return e;
}

double lorentzian_alpha0_error(const SpectralCoeffs& c, cplx k) {
  double e = 0;
  for (int i = 0; i <= 200; ++i) {
    double r = 0.1 * std::pow(100.0, i / 200.0);
    for (int q = 0; q < 16; ++q) {
      cplx z = std::polar(r, 2 * kPi * q / 16);
      e = std::max(e, std::abs(polar_eval(c, z.real(), z.imag()) - lorentzian_alpha0(z, k)));
    }
  }
  return e;
}

void eikonal_accuracy(Run& run) {
  Potential p = Potential::parse(run.cfg.potential);
  bool oracle = p.tag() == PotentialTag::lorentzian && p.scale() == 1.0;
  int nk = int(run.cfg.ks.size());
  std::vector<EikonalSolution> fp(nk), nw(nk);
  parallel_for(2 * nk, [&](int j) {
    int i = j / 2;
    double t0 = now_s();
    cplx k = run.cfg.ks[i];
    if (j % 2 == 0) fp[i] = solve_eikonal(run, p, k, EikonalMethod::fixed_point);
    else nw[i] = solve_eikonal(run, p, k, EikonalMethod::newton);
    run.job_time(std::string(j % 2 ? "newton" : "fixed_point") + " k=" + k_label(k), now_s() - t0);
  });

  CsvWriter w({"k", "method", "nc", "nphi", "iterations", "converged", "residual", "oracle_error"});
  std::vector<PlotSeries> hist;
  for (int i = 0; i < nk; ++i) {
    cplx k = run.cfg.ks[i];
    for (const EikonalSolution* s : {&fp[i], &nw[i]}) {
      std::string m = method_name(s->method);
      double err = oracle ? lorentzian_g_error(s->coeffs, k) : NAN;
      w.row({k_label(k), m, std::to_string(s->grid.nc), std::to_string(s->grid.nphi), std::to_string(s->iterations),
             s->converged ? "1" : "0", csv_num(s->residual_sup), csv_num(err)});
      std::string at = "@k" + k_label(k);
      run.check(m + ".iterations" + at, s->iterations);
      run.check(m + ".converged" + at, s->converged);
      run.check(m + ".residual" + at, s->residual_sup);
      if (oracle) run.check(m + ".oracle_error" + at, err);
      PlotSeries ps{m + " k=" + k_label(k), {}, {}, true, s->method == EikonalMethod::newton};
      for (size_t it = 0; it < s->history.size(); ++it)
        if (s->history[it] > 0) {
          ps.x.push_back(double(it + 1));
          ps.y.push_back(s->history[it]);
        }
      if (!ps.x.empty()) hist.push_back(ps);
    }
    if (run.cfg.write_fields) {
      PolarTransform t(nw[i].grid);
      run.fields("g_k" + k_label(k) + ".dsfld", {to_record(t.inverse(nw[i].coeffs))});
    }
  }
  run.csv("eikonal.csv", w);
  if (!hist.empty()) run.plot("eikonal_history.svg", hist, style("iteration history", "iteration", "update sup norm", false, true));
}

void alpha0_accuracy(Run& run) {
  Potential p = Potential::parse(run.cfg.potential);
  bool oracle = p.tag() == PotentialTag::lorentzian && p.scale() == 1.0;
  int nk = int(run.cfg.ks.size());
  std::vector<EikonalSolution> gs(nk);
  std::vector<Alpha0Result> as(nk);
  parallel_for(nk, [&](int i) {
    double t0 = now_s();
    cplx k = run.cfg.ks[i];
    gs[i] = solve_eikonal(run, p, k, EikonalMethod::newton);
    if (!gs[i].converged) throw SolverError("eikonal solve did not converge at k=" + k_label(k));
    as[i] = solve_alpha0(gs[i], p, k, gs[i].grid);
    run.job_time("alpha0 k=" + k_label(k), now_s() - t0);
  });

  CsvWriter w({"k", "nc", "nphi", "iterations", "converged", "rel_residual", "oracle_error", "at_infinity"});
  std::vector<PlotSeries> prof;
  for (int i = 0; i < nk; ++i) {
    cplx k = run.cfg.ks[i];
    double err = oracle ? lorentzian_alpha0_error(as[i].coeffs, k) : NAN;
    double inf = std::abs(polar_eval(as[i].coeffs, 1e8, 0.0) - 1.0);
    w.row({k_label(k), std::to_string(gs[i].grid.nc), std::to_string(gs[i].grid.nphi),
           std::to_string(as[i].iterations), as[i].converged ? "1" : "0", csv_num(as[i].rel_residual), csv_num(err),
           csv_num(inf)});
    std::string at = "@k" + k_label(k);
    run.check("alpha0.converged" + at, as[i].converged);
    run.check("alpha0.at_infinity" + at, inf);
    if (oracle) run.check("alpha0.oracle_error" + at, err);
    PlotSeries re{"Re alpha0 k=" + k_label(k), {}, {}}, im{"Im alpha0 k=" + k_label(k), {}, {}, false, true};
    for (int j = 0; j <= 100; ++j) {
      double x = 0.1 * std::pow(100.0, j / 100.0);
      cplx v = polar_eval(as[i].coeffs, x, 0.0);
      re.x.push_back(x);
      re.y.push_back(v.real());
      im.x.push_back(x);
      im.y.push_back(v.imag());
    }
    prof.push_back(re);
    prof.push_back(im);
  }
  run.csv("alpha0.csv", w);
  run.plot("alpha0_profile.svg", prof, style("alpha0 on the positive real axis", "x", "alpha0", true));
}

void wkb_convergence(Run& run) {
  Potential p = Potential::parse(run.cfg.potential);
  const auto& ks = run.cfg.ks;
  const auto& eps = run.cfg.eps;
  int nk = int(ks.size()), ne = int(eps.size());

  std::vector<WKBLeadingOrder> lead(nk);
  parallel_for(nk, [&](int i) {
    double t0 = now_s();
    auto g = solve_eikonal(run, p, ks[i], EikonalMethod::newton);
    if (!g.converged) throw SolverError("eikonal solve did not converge at k=" + k_label(ks[i]));
    lead[i] = make_wkb(g, p);
    run.job_time("wkb k=" + k_label(ks[i]), now_s() - t0);
  });

  struct Cell {
    double sup1 = 0, sup2 = 0;
    int nx = 0, iterations = 0;
    HeatMap psi2;
  };
  std::vector<Cell> cells(size_t(nk) * ne);
  parallel_for(nk * ne, [&](int j) {
    int i = j / ne, e = j % ne;
    double t0 = now_s();
    DiracProblem pr;
    pr.p = p;
    pr.eps = eps[e];
    pr.k = ks[i];
    int nx = run.nx_for(eps[e]);
    pr.cart = CartesianGrid(nx, nx, run.cfg.box, run.cfg.box);
    pr.gmres = run.gmres();
    auto sol = solve_dirac(pr);
    auto on = wkb_on_grid(lead[i], p, pr.cart);
    auto d = delta_fields(sol.psi1_scaled, sol.psi2_scaled, on, eps[e]);
    Cell& c = cells[j];
    c.sup1 = d.sup1;
    c.sup2 = d.sup2;
    c.nx = nx;
    c.iterations = std::max(sol.plus.iterations, sol.minus.iterations);
    if (e == ne - 1 && i == 0) {
      c.psi2 = {nx, nx, {}, -run.cfg.box, run.cfg.box, -run.cfg.box, run.cfg.box};
      for (const auto& v : sol.psi2_scaled.v) c.psi2.v.push_back(std::abs(v));
    }
    if (run.cfg.write_fields) {
      std::string name = "psi_k" + k_label(ks[i]) + "_eps" + csv_num(eps[e]) + ".dsfld";
      std::lock_guard<std::mutex> lock(run.mu);
      write_dsfld((run.dir / name).string(), {to_record(sol.psi1_scaled), to_record(sol.psi2_scaled)});
    }
    run.job_time("dirac k=" + k_label(ks[i]) + " eps=" + csv_num(eps[e]), now_s() - t0);
  });
  if (run.cfg.write_fields)
    for (int i = 0; i < nk; ++i)
      for (int e = 0; e < ne; ++e) run.artifact("psi_k" + k_label(ks[i]) + "_eps" + csv_num(eps[e]) + ".dsfld");

  CsvWriter table({"k", "eps", "nx", "gmres_iterations", "delta1_sup", "delta2_sup"});
  CsvWriter reg({"k", "slope1", "intercept1", "rms1", "slope2", "intercept2", "rms2"});
  std::vector<PlotSeries> series;
  for (int i = 0; i < nk; ++i) {
    std::vector<double> d1, d2;
    for (int e = 0; e < ne; ++e) {
      const Cell& c = cells[size_t(i) * ne + e];
      table.row({k_label(ks[i]), csv_num(eps[e]), std::to_string(c.nx), std::to_string(c.iterations), csv_num(c.sup1),
                 csv_num(c.sup2)});
      d1.push_back(c.sup1);
      d2.push_back(c.sup2);
    }
    series.push_back({"delta1 k=" + k_label(ks[i]), eps, d1, true, false});
    series.push_back({"delta2 k=" + k_label(ks[i]), eps, d2, true, true});
    if (ne >= 3) {
      auto r1 = regression_loglog(eps, d1), r2 = regression_loglog(eps, d2);
      reg.row({k_label(ks[i]), csv_num(r1.slope), csv_num(r1.intercept), csv_num(r1.residual_rms), csv_num(r2.slope),
               csv_num(r2.intercept), csv_num(r2.residual_rms)});
      std::string at = "@k" + k_label(ks[i]);
      run.check("slope_delta1" + at, r1.slope);
      run.check("slope_delta2" + at, r2.slope);
      run.check("intercept_delta1" + at, r1.intercept);
      run.check("intercept_delta2" + at, r2.intercept);
    }
  }
  // slope-one reference through the first point of the first series
  {
    PlotSeries ref{"slope 1", eps, {}, false, true};
    for (double v : eps) ref.y.push_back(series[0].y[0] * v / eps[0]);
    series.push_back(ref);
  }
  run.csv("wkb_deltas.csv", table);
  if (ne >= 3) run.csv("wkb_regression.csv", reg);
  run.plot("wkb_deltas.svg", series, style("sup norms of Delta1, Delta2", "eps", "sup norm", true, true));
  const Cell& hc = cells[size_t(ne - 1)];
  run.heatmap("psi2_scaled_abs.svg", hc.psi2,
              style("|psi2 e^{-kz/eps}|, k=" + k_label(ks[0]) + ", eps=" + csv_num(eps.back()), "x", "y"));
}

void reflection_scan(Run& run) {
  Potential p = Potential::parse(run.cfg.potential);
  const auto& eps = run.cfg.eps;
  int ne = int(eps.size()), nk = run.cfg.k_steps + 1;
  std::vector<double> kgrid(nk);
  for (int i = 0; i < nk; ++i) kgrid[i] = run.cfg.k_min + (run.cfg.k_max - run.cfg.k_min) * i / run.cfg.k_steps;
  std::vector<cplx> R(size_t(ne) * nk);
  parallel_for(ne * nk, [&](int j) {
    int e = j / nk, i = j % nk;
    double t0 = now_s();
    DiracProblem pr;
    pr.p = p;
    pr.eps = eps[e];
    pr.k = kgrid[i];
    int nx = run.nx_for(eps[e]);
    pr.cart = CartesianGrid(nx, nx, run.cfg.box, run.cfg.box);
    pr.gmres = run.gmres();
    R[j] = solve_dirac(pr).R;
    run.job_time("reflection k=" + csv_num(kgrid[i]) + " eps=" + csv_num(eps[e]), now_s() - t0);
  });

  auto index_of = [&](double k) {
    for (int i = 0; i < nk; ++i)
      if (std::abs(kgrid[i] - k) < 1e-9) return i;
    return -1;
  };
  std::vector<PlotSeries> series;
  for (int e = 0; e < ne; ++e) {
    CsvWriter w({"k", "re_R", "im_R"});
    PlotSeries s{"eps=" + csv_num(eps[e]), kgrid, {}};
    double imag = 0;
    int increases = 0;
    for (int i = 0; i < nk; ++i) {
      cplx r = R[size_t(e) * nk + i];
      w.row({csv_num(kgrid[i]), csv_num(r.real()), csv_num(r.imag())});
      s.y.push_back(r.real());
      imag = std::max(imag, std::abs(r.imag()));
      if (i > 0 && kgrid[i - 1] >= 0.55 - 1e-9 && kgrid[i] <= 1.2 + 1e-9 && r.real() >= R[size_t(e) * nk + i - 1].real())
        ++increases;
    }
    std::string tag = "@eps" + csv_num(eps[e]);
    run.csv("scan_eps" + csv_num(eps[e]) + ".csv", w);
    series.push_back(s);
    run.check("max_abs_imag" + tag, imag);
    run.check("increases_on_0.55_1.2" + tag, increases);
    int i0 = index_of(0.0), i1 = index_of(1.0);
    if (i0 >= 0) {
      double r0 = R[size_t(e) * nk + i0].real();
      run.check("R0_over_2sqrtln" + tag, r0 / (2 * std::sqrt(std::log(1 / eps[e]))));
      if (i1 >= 0) run.check("R1_over_R0" + tag, R[size_t(e) * nk + i1].real() / r0);
    }
  }
  PlotStyle st = style("reflection coefficient", "k", "R");
  st.vlines = {0.5};
  run.plot("reflection_scan.svg", series, st);
}

void riccati_bounds(Run& run) {
  Potential p = Potential::parse(run.cfg.potential);
  if (!p.is_radial()) throw InputError("riccati-bounds needs a radial potential");
  const auto& eps = run.cfg.eps;
  int ne = int(eps.size());
  std::vector<ReflectionK0> rk(ne);
  std::vector<std::array<double, 4>> viol(ne);
  parallel_for(ne, [&](int e) {
    double t0 = now_s();
    rk[e] = reflection_k0(p, eps[e]);
    auto s = integrate_riccati(p, eps[e], 0.0, run.cfg.tol < 1e-12 ? run.cfg.tol : 1e-12);
    viol[e] = sandwich_violations(s, p);
    run.job_time("riccati eps=" + csv_num(eps[e]), now_s() - t0);
  });
  CsvWriter w({"eps", "R_lower", "R_integrated", "R_upper", "R_estimate", "ratio_semiclassical", "sandwich_violation"});
  PlotSeries lo{"lower bound", {}, {}, false, true}, hi{"upper bound", {}, {}, false, true},
      integ{"integrated", {}, {}, true}, sc{"2 sqrt(ln 1/eps)", {}, {}};
  double prev_ratio = -INFINITY;
  int decreases = 0;
  for (int e = 0; e < ne; ++e) {
    double sc_v = 2 * std::sqrt(std::log(1 / eps[e]));
    double ratio = rk[e].integrated / sc_v;
    double v = *std::max_element(viol[e].begin(), viol[e].end());
    w.row({csv_num(eps[e]), csv_num(rk[e].lower), csv_num(rk[e].integrated), csv_num(rk[e].upper),
           csv_num(rk[e].estimate), csv_num(ratio), csv_num(v)});
    std::string tag = "@eps" + csv_num(eps[e]);
    if (rk[e].bounds_valid)
      run.check("bounds_margin" + tag, std::min(rk[e].integrated - rk[e].lower, rk[e].upper - rk[e].integrated));
    run.check("ratio_semiclassical" + tag, ratio);
    run.check("sandwich_violation" + tag, v);
    if (ratio <= prev_ratio) ++decreases;
    prev_ratio = ratio;
    double x = 1 / eps[e];
    if (rk[e].bounds_valid) {
      lo.x.push_back(x);
      lo.y.push_back(rk[e].lower);
      hi.x.push_back(x);
      hi.y.push_back(rk[e].upper);
    }
    integ.x.push_back(x);
    integ.y.push_back(rk[e].integrated);
    sc.x.push_back(x);
    sc.y.push_back(sc_v);
  }
  run.check("ratio_decreases", decreases);
  run.csv("riccati_bounds.csv", w);
  std::vector<PlotSeries> s{integ, sc};
  if (!lo.x.empty()) {
    s.push_back(lo);
    s.push_back(hi);
  }
  run.plot("riccati_bounds.svg", s, style("k = 0 reflection coefficient", "1/eps", "R", true));
}

void threshold_estimate(Run& run) {
  Potential p = Potential::parse(run.cfg.potential);
  if (!p.is_radial()) throw InputError("threshold-estimate needs a radial potential");
  double t0 = now_s();
  auto s = solve_radial_series(p, run.cfg.nc, run.cfg.n_terms);
  run.job_time("series", now_s() - t0);
  auto fit = estimate_threshold(s, run.cfg.n_min);
  double slope = loglog_slope(s.sup_norms, run.cfg.n_min);
  CsvWriter w({"n", "sup_norm"});
  PlotSeries ps{"sup |c_n|", {}, {}};
  for (size_t n = 0; n < s.sup_norms.size(); ++n) {
    w.row({std::to_string(n), csv_num(s.sup_norms[n])});
    if (n > 0 && s.sup_norms[n] > 0) {
      ps.x.push_back(double(n));
      ps.y.push_back(s.sup_norms[n]);
    }
  }
  CsvWriter f({"k_crit", "alpha", "beta", "gamma", "alpha10", "beta10", "gamma10", "loglog_slope", "n_min", "n_max"});
  f.row({csv_num(fit.k_crit), csv_num(fit.alpha), csv_num(fit.beta), csv_num(fit.gamma), csv_num(fit.alpha10),
         csv_num(fit.beta10), csv_num(fit.gamma10), csv_num(slope), std::to_string(fit.n_min),
         std::to_string(fit.n_max)});
  run.check("k_crit", fit.k_crit);
  run.check("beta", fit.beta);
  run.check("beta10", fit.beta10);
  run.check("loglog_slope", slope);
  run.csv("series_norms.csv", w);
  run.csv("threshold_fit.csv", f);
  run.plot("series_norms.svg", {ps}, style("series coefficient norms", "n", "sup |c_n|", true, true));
}

json versions() {
  return {{"ds2", "0.1.0"},
          {"fftw", std::string(fftw_version)},
          {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                        std::to_string(EIGEN_MINOR_VERSION)},
          {"boost", BOOST_LIB_VERSION},
          {"openssl", OPENSSL_VERSION_TEXT},
          {"compiler", __VERSION__},
          {"isa", kernels::isa_name(kernels::active_isa())}};
}

json config_json(const ExperimentConfig& c) {
  json ks = json::array();
  for (cplx k : c.ks) ks.push_back({k.real(), k.imag()});
  json po = json::object();
  for (const auto& [k, g] : c.polar_override) po[csv_num(k)] = {g.first, g.second};
  json th = json::object();
  for (const auto& [n, t] : c.thresholds)
    th[n] = {std::isfinite(t.lo) ? json(t.lo) : json(nullptr), std::isfinite(t.hi) ? json(t.hi) : json(nullptr)};
  return {{"tag", c.tag},         {"potential", c.potential},   {"k", ks},
          {"eps", c.eps},         {"nc", c.nc},                 {"nphi", c.nphi},
          {"polar_override", po}, {"nx", c.nx},                 {"box", c.box},
          {"tol", c.tol},         {"max_iter", c.max_iter},     {"gmres_tol", c.gmres_tol},
          {"gmres_restart", c.gmres_restart}, {"gmres_max_iter", c.gmres_max_iter},
          {"k_min", c.k_min},     {"k_max", c.k_max},           {"k_steps", c.k_steps},
          {"n_terms", c.n_terms}, {"n_min", c.n_min},           {"write_fields", c.write_fields},
          {"thresholds", th}};
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

Manifest run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  Manifest man;
  man.tag = cfg.tag;
  fs::create_directories(cfg.out_dir);
  Run run(cfg, man);
  double t0 = now_s();
  try {
    if (cfg.tag == "eikonal-accuracy") eikonal_accuracy(run);
    else if (cfg.tag == "alpha0-accuracy") alpha0_accuracy(run);
    else if (cfg.tag == "wkb-convergence") wkb_convergence(run);
    else if (cfg.tag == "reflection-scan") reflection_scan(run);
    else if (cfg.tag == "riccati-bounds") riccati_bounds(run);
    else threshold_estimate(run);
  } catch (const std::exception& e) {
    man.error = e.what();
  }
  man.runtime_s = now_s() - t0;

  json j;
  j["tag"] = cfg.tag;
  j["config"] = config_json(cfg);
  j["versions"] = versions();
  j["threads"] = worker_count();
  j["runtime_s"] = man.runtime_s;
  j["jobs"] = run.jobs;
  j["artifacts"] = json::array();
  for (const auto& a : man.artifacts) j["artifacts"].push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  j["checks"] = json::array();
  for (const auto& c : man.checks)
    j["checks"].push_back({{"name", c.name},
                           {"value", num_or_null(c.value)},
                           {"lo", num_or_null(c.bounds.lo)},
                           {"hi", num_or_null(c.bounds.hi)},
                           {"pass", c.pass}});
  j["error"] = man.error.empty() ? json(nullptr) : json(man.error);
  j["passed"] = man.passed();
  std::ofstream f(run.dir / "manifest.json");
  f << j.dump(2) << '\n';
  return man;
}

}  // namespace ds2
