#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fermi/config.hpp"
#include "fermi/error.hpp"
#include "fermi/runner.hpp"

using namespace fermi;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("parsing") {
  auto c = Config::parse("# comment\n[dispersion]\nfamily = circle  # trailing\nradius=2\n\n[volume]\neps3 = 0.1, 0.2,0.4\n",
                         "/data");
  CHECK(c.text("dispersion", "family") == "circle");
  CHECK(c.number("dispersion", "radius") == 2.0);
  CHECK(c.number("dispersion", "mu", 0.25) == 0.25);
  CHECK(c.numbers("volume", "eps3", {}) == std::vector<double>{0.1, 0.2, 0.4});
  CHECK(c.has("dispersion", "radius"));
  CHECK_FALSE(c.has("dispersion", "mu"));
  c.set("dispersion", "file", "grid.csv");
  CHECK(c.path("dispersion", "file") == "/data/grid.csv");
  CHECK(code_of([&] { c.number("dispersion", "family"); }) == ErrorCode::Config);
  CHECK(code_of([&] { c.number("dispersion", "mu"); }) == ErrorCode::Config);
  CHECK(code_of([&] { c.set("dispersion", "colour", "red"); }) == ErrorCode::Config);
}

TEST_CASE("malformed files") {
  for (const char* text : {"[nowhere]\n", "[dispersion\n", "[dispersion]\nradius\n", "radius = 1\n",
                           "[dispersion]\nradius = 1\nradius = 2\n", "[dispersion]\ncolour = red\n"})
    CHECK(code_of([&] { Config::parse(text); }) == ErrorCode::Config);
  CHECK(code_of([] { Config::load("/nonexistent/x.cfg"); }) == ErrorCode::Config);
}

TEST_CASE("builders validate values") {
  auto bad_family = Config::parse("[dispersion]\nfamily = hexagon\n");
  CHECK(code_of([&] { build_dispersion(bad_family); }) == ErrorCode::Config);
  auto bad_radius = Config::parse("[dispersion]\nfamily = circle\nradius = -1\n");
  CHECK(code_of([&] { build_dispersion(bad_radius); }) == ErrorCode::Config);
  auto base = std::string("[dispersion]\nfamily = wrapped-quadratic\nmu = 0.5\n[interaction]\nfamily = cosine\n");
  auto bad_solver = Config::parse(base + "[counterterm]\nmodel = fock\nlambda = 0.01\n[solver]\nepsilon = -1\n");
  auto E = build_dispersion(bad_solver);
  CHECK(code_of([&] { build_solver(bad_solver, E); }) == ErrorCode::Config);
  auto bad_model = Config::parse(base + "[counterterm]\nmodel = magic\n");
  CHECK(code_of([&] { build_model(bad_model, E); }) == ErrorCode::Config);
  auto good = Config::parse(base + "[counterterm]\nmodel = fock\nlambda = 0.02\n[solver]\nm_theta = 128\n");
  auto s = build_solver(good, E);
  CHECK(s.lambda() == 0.02);
  CHECK(s.m_theta == 128);
  CHECK(s.model->kind() == "fock");
  auto p = build_class_params(Config::parse("[class]\ng0 = 0.3\n"));
  CHECK(p.g0 == 0.3);
  CHECK(p.G0 == 10.0);
}

TEST_CASE("grid dispersion files") {
  auto dir = std::filesystem::path(FERMI_TEST_TMP) / "config_tmp";
  std::filesystem::create_directories(dir);
  auto E = make_dispersion("tight-binding", {1.0, -1.0});
  std::ofstream(dir / "tb.csv") << grid_dispersion_csv(*E, 32);
  auto c = Config::parse("[dispersion]\nfamily = grid\nfile = tb.csv\nsymmetric = true\n", dir.string());
  auto g = build_dispersion(c);
  CHECK(g->value({0.3, -0.2}) == doctest::Approx(E->value({0.3, -0.2})).epsilon(1e-3));
  std::ofstream(dir / "short.csv") << "8\n1,2,3\n";
  CHECK(code_of([&] { read_grid_dispersion_csv((dir / "short.csv").string(), true); }) == ErrorCode::Config);
}

TEST_CASE("exit code mapping") {
  CHECK(exit_code_for(ErrorCode::Ok) == kExitOk);
  CHECK(exit_code_for(ErrorCode::CheckFailed) == kExitCheckFailed);
  CHECK(exit_code_for(ErrorCode::Config) == kExitConfig);
  CHECK(exit_code_for(ErrorCode::InvalidArgument) == kExitConfig);
  CHECK(exit_code_for(ErrorCode::Geometry) == kExitGeometry);
  CHECK(exit_code_for(ErrorCode::Divergence) == kExitDivergence);
  CHECK(exit_code_for(ErrorCode::Internal) == kExitInternal);
  CHECK(command_names().size() == 8);
}
