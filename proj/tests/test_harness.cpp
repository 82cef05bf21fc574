#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "ds2/harness.hpp"
#include "ds2/svg.hpp"

using namespace ds2;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing") {
  auto c = ConfigFile::parse(
      "top = 1\n"
      "[experiment]   # comment\n"
      "tag = wkb-convergence\n"
      "eps = 1/2, 1/4 ,1/8\n"
      "k = 1, 0.75+0.25i\n"
      "[thresholds]\n"
      "slope_delta1 = 0.85, 1.10\n"
      "slope_delta2@k1 = -inf, 2\n");
  CHECK(c.get("", "top") == "1");
  CHECK(c.get("experiment", "tag") == "wkb-convergence");
  CHECK(c.get("experiment", "missing", "x") == "x");
  CHECK(c.get_int("grid", "nc", 7) == 7);
  auto e = experiment_from(c);
  REQUIRE(e.eps.size() == 3);
  CHECK(e.eps[2] == 0.125);
  REQUIRE(e.ks.size() == 2);
  CHECK(e.ks[1] == cplx(0.75, 0.25));
  CHECK(e.thresholds.at("slope_delta1").lo == 0.85);
  CHECK(std::isinf(e.thresholds.at("slope_delta2@k1").lo));
  CHECK_THROWS_AS(ConfigFile::parse("[open\n"), InputError);
  CHECK_THROWS_AS(ConfigFile::parse("novalue\n"), InputError);
}

TEST_CASE("number parsing") {
  CHECK(parse_real("1/16") == 0.0625);
  CHECK(parse_real(" 2.5e-3 ") == 0.0025);
  CHECK_THROWS_AS(parse_real("abc"), InputError);
  CHECK_THROWS_AS(parse_real("1.5x"), InputError);
  CHECK(parse_complex("0.3-0.1i") == cplx(0.3, -0.1));
  CHECK(parse_complex("-2i") == cplx(0, -2));
  CHECK(parse_complex("i") == cplx(0, 1));
  CHECK(parse_complex("1e-3+2e-2i") == cplx(1e-3, 2e-2));
  CHECK(parse_complex("-4") == cplx(-4, 0));
}

TEST_CASE("config validation") {
  ExperimentConfig e;
  e.tag = "wkb-convergence";
  e.ks = {1.0};
  e.eps = {0.5, 0.25, 0.25};
  CHECK_THROWS_AS(validate(e), InputError);
  e.eps = {0.5, 0.25, 0.125};
  CHECK_NOTHROW(validate(e));
  e.tag = "nonsense";
  CHECK_THROWS_AS(validate(e), InputError);
  e.tag = "reflection-scan";
  e.eps = {};
  CHECK_THROWS_AS(validate(e), InputError);
  e.eps = {0.1, 0.2};  // scans do not need ordering
  CHECK_NOTHROW(validate(e));
}

TEST_CASE("log-log regression") {
  std::vector<double> xs = {0.5, 0.25, 0.125, 0.0625};
  std::vector<double> ys;
  for (double x : xs) ys.push_back(3.0 * x);
  auto r = regression_loglog(xs, ys);
  CHECK(r.slope == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.intercept == doctest::Approx(std::log10(3.0)).epsilon(1e-14));
  CHECK(r.residual_rms < 1e-14);
  CHECK(r.points.size() == 4);
  ys[1] = 0.0;
  CHECK_THROWS_AS(regression_loglog(xs, ys), InputError);
  CHECK_THROWS_AS(regression_loglog({0.5, 0.25}, {1.0, 0.5}), InputError);
}

TEST_CASE("sha256 and csv") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CsvWriter w({"a", "b"});
  w.row({csv_num(0.1), csv_num(1e-300)});
  w.row({csv_num(NAN), csv_num(-INFINITY)});
  CHECK(w.str() == "a,b\n0.1,1e-300\nnan,-inf\n");
  CHECK_THROWS_AS(w.row({"1"}), InputError);
  CHECK(csv_num(1.0 / 3) == "0.3333333333333333");
}

TEST_CASE("worker pool") {
  setenv("DS2_THREADS", "2", 1);
  CHECK(worker_count() <= 2);
  std::vector<int> hit(100, 0);
  parallel_for(100, [&](int i) { hit[i] += i; });
  for (int i = 0; i < 100; ++i) CHECK(hit[i] == i);
  CHECK_THROWS_AS(parallel_for(10, [](int i) {
                    if (i == 3) throw SolverError("boom");
                  }),
                  SolverError);
}

TEST_CASE("svg line plot") {
  PlotSeries s{"R", {0, 0.5, 1}, {1, 0.5, 0.1}, true};
  PlotStyle st;
  st.title = "scan <a & b>";
  st.xlabel = "k";
  st.ylabel = "R";
  st.vlines = {0.5};
  auto svg = render_plot({s}, st);
  auto sum = read_svg_text(svg);
  CHECK(sum.well_formed);
  CHECK(sum.polylines == 1);
  CHECK(sum.width == 640);
  bool title = false;
  for (const auto& t : sum.text) title |= t == "scan &lt;a &amp; b&gt;";
  CHECK(title);
  CHECK(render_plot({s}, st) == svg);
  CHECK_THROWS_AS(render_plot({}, st), InputError);
  CHECK_THROWS_AS(render_plot({PlotSeries{"x", {0, 1}, {1, NAN}}}, st), InputError);
  st.logy = true;
  CHECK_THROWS_AS(render_plot({PlotSeries{"x", {0, 1}, {1, 0}}}, st), InputError);
  CHECK_FALSE(read_svg_text("<svg><g></svg>").well_formed);
}

TEST_CASE("svg heat map") {
  HeatMap h{300, 200, std::vector<double>(300 * 200), -1, 1, -1, 1};
  for (int i = 0; i < 300; ++i)
    for (int j = 0; j < 200; ++j) h.v[size_t(i) * 200 + j] = std::exp(-(i - 150.0) * (i - 150.0) / 1000.0);
  PlotStyle st;
  st.title = "|psi2|";
  auto svg = render_heatmap(h, st, 64);
  auto sum = read_svg_text(svg);
  CHECK(sum.well_formed);
  CHECK(sum.rects > 64 * 40);
  CHECK_THROWS_AS(render_heatmap(HeatMap{}, st), InputError);
}

TEST_CASE("run_experiment writes hashed, reproducible outputs") {
  auto dir = fs::temp_directory_path() / "ds2_harness_test";
  fs::remove_all(dir);
  ExperimentConfig e;
  e.tag = "threshold-estimate";
  e.potential = "gaussian";
  e.nc = 48;
  e.n_terms = 120;
  e.out_dir = dir.string();
  e.thresholds["k_crit"] = {0.45, 0.55};
  e.thresholds["beta10"] = {5.0, 6.0};
  auto m = run_experiment(e);
  CHECK(m.error.empty());
  CHECK_FALSE(m.passed());
  CHECK(m.exit_code() == 2);
  bool saw_k = false;
  for (const auto& c : m.checks)
    if (c.name == "k_crit") {
      saw_k = true;
      CHECK(c.pass);
    }
  CHECK(saw_k);
  REQUIRE(fs::exists(dir / "manifest.json"));
  auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  CHECK(j["tag"] == "threshold-estimate");
  CHECK(j["passed"] == false);
  CHECK(j["artifacts"].size() == m.artifacts.size());
  std::map<std::string, std::string> first;
  for (const auto& a : m.artifacts) {
    CHECK(sha256_file((dir / a.path).string()) == a.sha256);
    first[a.path] = slurp(dir / a.path);
  }
  auto m2 = run_experiment(e);
  for (const auto& a : m2.artifacts)
    if (a.path.size() > 4 && a.path.substr(a.path.size() - 4) == ".csv") CHECK(slurp(dir / a.path) == first[a.path]);

  e.thresholds.clear();
  e.tag = "riccati-bounds";
  e.eps = {1e-2, 1e-3};
  auto m3 = run_experiment(e);
  CHECK(m3.passed());
  CHECK(m3.exit_code() == 0);
  fs::remove_all(dir);
}

TEST_CASE("a solver error aborts with a partial manifest") {
  auto dir = fs::temp_directory_path() / "ds2_harness_abort";
  fs::remove_all(dir);
  ExperimentConfig e;
  e.tag = "wkb-convergence";
  e.ks = {1.0};
  e.eps = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  e.nc = 16;
  e.nphi = 16;
  e.nx = 64;  // far too coarse for these eps
  e.out_dir = dir.string();
  auto m = run_experiment(e);
  CHECK_FALSE(m.error.empty());
  CHECK(m.exit_code() == 1);
  CHECK(fs::exists(dir / "manifest.json"));
  fs::remove_all(dir);
}
