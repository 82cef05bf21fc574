#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ds2/types.hpp"

namespace ds2 {

// Flat key=value text with [section] headers; '#' starts a comment. Keys
// before the first header land in section "".
class ConfigFile {
 public:
  static ConfigFile parse(const std::string& text);
  static ConfigFile load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key, const std::string& def = "") const;
  double get_double(const std::string& section, const std::string& key, double def) const;
  int get_int(const std::string& section, const std::string& key, int def) const;
  const std::map<std::string, std::string>& section(const std::string& name) const;
  std::vector<std::string> sections() const;

 private:
  std::map<std::string, std::map<std::string, std::string>> data_;
};

// "1,0.5,0.25", "1/2,1/4", "0.3+0.1i"
double parse_real(const std::string& s);
cplx parse_complex(const std::string& s);
std::vector<double> parse_real_list(const std::string& s);
std::vector<cplx> parse_complex_list(const std::string& s);

struct Threshold {
  double lo = -INFINITY, hi = INFINITY;
};

struct ExperimentConfig {
  std::string tag;  // eikonal-accuracy | alpha0-accuracy | wkb-convergence | reflection-scan |
                    // riccati-bounds | threshold-estimate
  std::string potential = "gaussian";
  std::vector<cplx> ks;
  std::vector<double> eps;
  // polar grid, with per-k overrides keyed by Re k
  int nc = 40, nphi = 64;
  std::map<double, std::pair<int, int>> polar_override;
  int nx = 0;  // 0: desk table per eps
  double box = 4.0 * kPi;
  double tol = 1e-10;
  int max_iter = 100;
  double gmres_tol = 1e-10;
  int gmres_restart = 50, gmres_max_iter = 400;
  // reflection-scan k grid
  double k_min = 0.0, k_max = 1.2;
  int k_steps = 24;
  // threshold-estimate
  int n_terms = 200, n_min = 20;
  bool write_fields = false;
  std::string out_dir = "out";
  std::map<std::string, Threshold> thresholds;
};

// sections: [experiment] tag potential k eps out_dir write_fields,
// [grid] nc nphi nx box polar_override, [solver] tol max_iter gmres_tol
// gmres_restart gmres_max_iter, [scan] k_min k_max k_steps, [series] n_terms
// n_min, [thresholds] name = lo,hi
ExperimentConfig experiment_from(const ConfigFile& cfg);
// Throws InputError for unknown tags, empty lists or an eps list that is not
// strictly decreasing where a convergence rate is fitted.
void validate(const ExperimentConfig& cfg);

struct RegressionResult {
  double slope = 0.0, intercept = 0.0, residual_rms = 0.0;
  std::vector<std::pair<double, double>> points;  // (log10 x, log10 y)
};
// ordinary least squares of log10 y against log10 x
RegressionResult regression_loglog(const std::vector<double>& xs, const std::vector<double>& ys);

struct CheckResult {
  std::string name;
  double value = 0.0;
  Threshold bounds;
  bool pass = true;
};

struct Artifact {
  std::string path;  // relative to out_dir
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct Manifest {
  std::string tag;
  std::vector<Artifact> artifacts;
  std::vector<CheckResult> checks;
  double runtime_s = 0.0;
  std::string error;  // solver error that aborted the run
  bool passed() const;
  int exit_code() const;  // 0 pass, 2 threshold failure, 1 solver error
};

// Writes CSV tables, plots and optional fields to cfg.out_dir, then
// manifest.json listing each with its hash. Checks are computed for every
// named value; only those with a declared threshold can fail.
Manifest run_experiment(const ExperimentConfig& cfg);

std::string sha256_file(const std::string& path);
std::string sha256_hex(const std::string& bytes);

// DS2_THREADS caps the pool; default hardware concurrency
int worker_count();
// runs fn(i) for i in [0, n) on the pool; rethrows the first failure by index
void parallel_for(int n, const std::function<void(int)>& fn);

// deterministic CSV writer with round-trip number formatting
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);
  CsvWriter& row(const std::vector<std::string>& cells);
  std::string str() const { return text_; }
  void save(const std::string& path) const;

 private:
  size_t ncol_;
  std::string text_;
};
std::string csv_num(double v);

}  // namespace ds2
