#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kTmp = fs::path(FERMI_TEST_TMP) / "cli_tmp";

int run(const std::string& args) {
  std::string cmd = std::string(FERMI_CLI) + " " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kTmp);
  fs::path p = kTmp / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path out_dir(const std::string& name) {
  fs::path d = kTmp / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

const char* kVolume =
    "[dispersion]\nfamily = circle\nradius = 1\n[volume]\neps1 = 0.05\neps2 = 0.05\neps3 = 0.1,0.2\n"
    "q1 = 0.5\nq2 = 0.3\nsamples = 20000\nseed = 3\nshell_eps = 0.01,0.02\n";

}  // namespace

TEST_CASE("graph-verify") {
  auto d = out_dir("graph");
  CHECK(run("graph-verify --max-vertices 2 --out " + d.string()) == 0);
  CHECK(fs::exists(d / "corpus.txt"));
  CHECK(slurp(d / "graph_report.json").find("\"corpus_size\": 3") != std::string::npos);
  CHECK(run("graph-verify --max-vertices 7 --out " + d.string()) == 2);
}

TEST_CASE("usage and configuration errors") {
  CHECK(run("") == 2);
  CHECK(run("invert") == 2);
  CHECK(run("bogus-command") == 2);
  CHECK(run("check-class --config /nonexistent.cfg") == 2);
  auto bad = write_config("bad.cfg", "[dispersion]\nfamily = circle\nradius = 1\ncolour = red\n");
  CHECK(run("check-class --config " + bad.string()) == 2);
  auto badval = write_config("badval.cfg", "[dispersion]\nfamily = circle\nradius = -1\n");
  CHECK(run("trace-surface --config " + badval.string()) == 2);
}

TEST_CASE("check-class verdicts") {
  auto d = out_dir("class");
  auto ok = write_config("ok.cfg", "[dispersion]\nfamily = wrapped-quadratic\nmu = 0.5\n");
  CHECK(run("check-class --config " + ok.string() + " --out " + d.string()) == 0);
  CHECK(slurp(d / "class_report.json").find("\"verdict\": true") != std::string::npos);
  auto strict = write_config("strict.cfg", "[dispersion]\nfamily = wrapped-quadratic\nmu = 0.5\n[class]\ng0 = 1.2\n");
  CHECK(run("check-class --config " + strict.string() + " --out " + d.string()) == 1);
  auto open = write_config("open.cfg", "[dispersion]\nfamily = tight-binding\nt = 1\nmu = 0\n");
  CHECK(run("check-class --config " + open.string() + " --out " + d.string()) == 3);
}

TEST_CASE("trace-surface output") {
  auto d = out_dir("surface");
  auto ok = write_config("surface.cfg", "[dispersion]\nfamily = circle\nradius = 1\n[class]\nm_theta = 64\n");
  REQUIRE(run("trace-surface --config " + ok.string() + " --out " + d.string()) == 0);
  std::ifstream in(d / "surface.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "index,theta,radius,p1,p2,curvature");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 64);
}

TEST_CASE("invert exit codes") {
  auto d = out_dir("invert");
  CHECK(run("invert --config " CONFIG_DIR "/invert_synthetic_divergent.cfg --out " + d.string()) == 4);
  CHECK(slurp(d / "summary.json").find("ball-exit") != std::string::npos);
  auto small = write_config("invert.cfg",
                            "[dispersion]\nfamily = wrapped-quadratic\nmu = 0.5\n[interaction]\nfamily = cosine\n"
                            "[counterterm]\nmodel = fock\nlambda = 0.01\n[solver]\nm_theta = 128\nnr = 17\n");
  CHECK(run("invert --config " + small.string() + " --out " + d.string()) == 0);
  CHECK(fs::exists(d / "solution.csv"));
  std::ifstream in(d / "trace.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "n,f0,f1,f3r,residual,ball2,ball3r,class_ok,ball_ok");
}

TEST_CASE("seeded runs are reproducible") {
  auto cfg = write_config("volume.cfg", kVolume);
  auto a = out_dir("vol_a"), b = out_dir("vol_b"), c = out_dir("vol_c");
  REQUIRE(run("volume-improvement --config " + cfg.string() + " --out " + a.string()) == 0);
  REQUIRE(run("volume-improvement --config " + cfg.string() + " --out " + b.string()) == 0);
  REQUIRE(run("volume-improvement --config " + cfg.string() + " --seed 99 --out " + c.string()) == 0);
  for (const char* f : {"volume.csv", "shells.csv", "volume.json"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(slurp(a / "volume.csv") != slurp(c / "volume.csv"));
  CHECK(slurp(c / "volume.json").find("\"seed\": 99") != std::string::npos);
}
