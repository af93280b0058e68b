#include "doctest.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kpzlab/io.hpp"

using namespace kpz;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("kpzlab_io_" + std::to_string(std::rand()) + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::string> lines(const fs::path& f) {
  std::ifstream in(f);
  std::vector<std::string> out;
  for (std::string s; std::getline(in, s);) out.push_back(s);
  return out;
}

GridField small_field() {
  GridField F(Axis::continuous(0.5, 0.25, 2), Axis::discrete(-1, 3), Axis::discrete(1, 2));
  F.enable(Channel::Dt);
  F.for_each([&](Index3 p) {
    F(p) = 0.1 * p.t + 0.01 * p.a + p.n;
    F.set(Channel::Dt, p, -0.5 * p.a);
    F.set_valid(p, true);
  });
  F.set_valid({1, 2, 1}, false);
  return F;
}

}  // namespace

TEST_CASE("default output directory follows the environment") {
  ::setenv(io::kOutputDirEnv, "/tmp/somewhere", 1);
  CHECK(io::default_output_dir() == fs::path("/tmp/somewhere"));
  ::setenv(io::kOutputDirEnv, "", 1);
  CHECK(io::default_output_dir() == fs::path("kpzlab_out"));
  ::unsetenv(io::kOutputDirEnv);
  CHECK(io::default_output_dir() == fs::path("kpzlab_out"));
}

TEST_CASE("field CSV lists valid points only") {
  TempDir d;
  GridField F = small_field();
  io::write_field_csv(d.path / "sub" / "f.csv", F);
  auto l = lines(d.path / "sub" / "f.csv");
  REQUIRE(l.size() == 1 + 11);
  CHECK(l[0] == "t,a,n,F");
  CHECK(l[1] == "0.5,-1,1,0");
}

TEST_CASE("field JSON round trip keeps mask and channels") {
  GridField F = small_field();
  GridField G = io::field_from_json(io::field_to_json(F));
  CHECK(G.shape() == F.shape());
  CHECK(G.axis(0).kind == AxisKind::Continuous);
  CHECK(G.axis(1).kind == AxisKind::Discrete);
  CHECK(G.has(Channel::Dt));
  CHECK_FALSE(G.has(Channel::Da));
  F.for_each([&](Index3 p) {
    CHECK(G(p) == F(p));
    CHECK(G.valid(p) == F.valid(p));
    CHECK(G.get(Channel::Dt, p) == F.get(Channel::Dt, p));
  });
  io::json bad = io::field_to_json(F);
  bad["values"].erase(0);
  CHECK_THROWS_AS(io::field_from_json(bad), std::invalid_argument);
}

TEST_CASE("residual, cdf, trajectory and rate CSV schemas") {
  TempDir d;
  GridField F = small_field();
  ResidualField r;
  r.raw = F;
  r.normalized = F;
  io::write_residual_csv(d.path / "r.csv", r);
  auto l = lines(d.path / "r.csv");
  CHECK(l[0] == "t,a,n,residual,normalized");
  CHECK(l.size() == 12);

  EnsembleCDF cdf = empirical_cdf({0.0, 1.0, 1.0, 3.0}, 1, 1.0, {0.0, 1.0, 2.0});
  io::write_cdf_csv(d.path / "c.csv", cdf);
  l = lines(d.path / "c.csv");
  CHECK(l[0] == "a,F_hat,stderr");
  CHECK(l.size() == 4);

  Eigen::MatrixXd run(2, 2);
  run << 0, -1, 1, -1;
  io::write_trajectories_csv(d.path / "tr.csv", {run, run}, {0.0, 1.0});
  l = lines(d.path / "tr.csv");
  CHECK(l[0] == "run,particle,t,position");
  CHECK(l.size() == 9);
  CHECK(l[2] == "0,1,1,1");
  CHECK_THROWS_AS(io::write_trajectories_csv(d.path / "bad.csv", {run}, {0.0}), std::invalid_argument);

  RateReport rep;
  rep.rows = {{0.1, 1e-3, 0.5, 1.0}};
  io::write_rate_csv(d.path / "rate.csv", rep);
  l = lines(d.path / "rate.csv");
  CHECK(l[0] == "eps,residual,target_residual,ratio");
  CHECK(io::rate_to_json(rep)["rows"].size() == 1);
}

TEST_CASE("manifest carries the schema version") {
  TempDir d;
  io::Manifest m;
  m.command = "simulate";
  m.seed = 42;
  m.config = {{"model", "tasep"}};
  m.pass = false;
  io::write_manifest(d.path / "manifest.json", m);
  io::json j = io::read_json(d.path / "manifest.json");
  CHECK(j["schema"] == 1);
  CHECK(j["seed"] == 42);
  CHECK(j["pass"] == false);
  CHECK(j["config"]["model"] == "tasep");
  io::Manifest det;
  CHECK(io::manifest_to_json(det)["seed"].is_null());
  CHECK_THROWS(io::read_json(d.path / "missing.json"));
  std::ofstream(d.path / "broken.json") << "{ nope";
  CHECK_THROWS_AS(io::read_json(d.path / "broken.json"), std::invalid_argument);
}

TEST_CASE("SVG plots with bands") {
  io::Plot p;
  p.title = "F <vs> a & more";
  p.series.push_back({"det", {0, 1, 2}, {0.1, 0.5, 0.9}, {}, {}, false});
  p.series.push_back({"mc", {0, 1, 2}, {0.1, 0.4, 0.9}, {0.0, 0.3, 0.8}, {0.2, 0.5, 1.0}, true});
  std::string svg = io::render_svg(p);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("<polygon") != std::string::npos);
  CHECK(svg.find("&lt;vs&gt; a &amp; more") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  p.series[0].y.pop_back();
  CHECK_THROWS_AS(io::render_svg(p), std::invalid_argument);
  io::Plot empty;
  CHECK(io::render_svg(empty).find("</svg>") != std::string::npos);
}
