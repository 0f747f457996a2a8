#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mbi/cli.hpp"
#include "mbi/io.hpp"
#include "test_support.hpp"

using namespace mbi;
using namespace mbi::testing;
using nlohmann::json;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mbi_test_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

json base_config() {
  return json{
      {"schema_version", 1},
      {"grid",
       {{"dims", {16, 16, 16}}, {"spacing", 0.14}, {"origin", {-1.05, -1.05, -1.05}}}},
      {"sources",
       {{{"kind", "mollified_ball"}, {"radius", 0.3}, {"amplitude", 0.4},
         {"center", {0.0, 0.0, 0.0}}}}},
      {"beta", 0.1},
      {"order", 1},
      {"mode", "em"},
      {"alpha", 0.5},
      {"method", "fast_transform"},
      {"safety_factor", 2.0}};
}

}  // namespace

TEST_CASE("raw field round trip is bit identical") {
  TempDir tmp;
  const GridSpec g = cube_grid(12, 0.8);
  std::mt19937 rng(77);
  const ScalarField f = random_scalar(g, rng);
  const VectorField3 v = random_vector(g, rng);

  write_raw(f, tmp.file("f.mbif"));
  write_raw(v, tmp.file("v.mbif"));
  const ScalarField f2 = read_raw_scalar(tmp.file("f.mbif"));
  const VectorField3 v2 = read_raw_vector(tmp.file("v.mbif"));

  CHECK(f2.grid == g);
  CHECK(v2.grid == g);
  CHECK(std::memcmp(f.values.data(), f2.values.data(),
                    f.values.size() * sizeof(double)) == 0);
  for (int c = 0; c < 3; ++c)
    CHECK(std::memcmp(v.component(c).data(), v2.component(c).data(),
                      v.size() * sizeof(double)) == 0);
}

TEST_CASE("raw header is 64 bytes and type-checked") {
  TempDir tmp;
  const GridSpec g = cube_grid(8, 0.5);
  write_raw(ScalarField(g), tmp.file("s.mbif"));
  CHECK(std::filesystem::file_size(tmp.file("s.mbif")) ==
        64 + 512 * sizeof(double));
  CHECK_THROWS(read_raw_vector(tmp.file("s.mbif")));  // wrong component count
  std::ofstream bad(tmp.file("bad.mbif"), std::ios::binary);
  bad << "not a field";
  bad.close();
  CHECK_THROWS(read_raw_scalar(tmp.file("bad.mbif")));
}

TEST_CASE("vtk output is well formed") {
  TempDir tmp;
  const GridSpec g = cube_grid(8, 0.5);
  std::mt19937 rng(5);
  write_vtk(random_scalar(g, rng), tmp.file("f.vtk"), "f");
  std::ifstream in(tmp.file("f.vtk"));
  std::string line;
  std::getline(in, line);
  CHECK(line == "# vtk DataFile Version 3.0");
  int lines = 1;
  while (std::getline(in, line)) ++lines;
  CHECK(lines >= 7 + 512);
}

TEST_CASE("config parsing and validation") {
  SUBCASE("valid config") {
    const RunConfig cfg = RunConfig::from_json(base_config());
    CHECK(cfg.grid.nx() == 16);
    CHECK(cfg.sources.size() == 1);
    CHECK(cfg.beta == 0.1);
    CHECK(cfg.mode == EngineMode::em);
  }
  SUBCASE("wrong schema version") {
    json j = base_config();
    j["schema_version"] = 2;
    CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  }
  SUBCASE("unknown mode and method") {
    json j = base_config();
    j["mode"] = "quantum";
    CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
    j = base_config();
    j["method"] = "magic";
    CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  }
  SUBCASE("mode/source consistency") {
    json j = base_config();
    j["mode"] = "magnetostatic";  // charge source present
    CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);

    j = base_config();
    j["mode"] = "electrostatic";
    j["sources"].push_back({{"kind", "ring_current"},
                            {"major_radius", 0.4},
                            {"minor_radius", 0.15},
                            {"amplitude", 0.3}});
    CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  }
  SUBCASE("source outside the box") {
    json j = base_config();
    j["sources"][0]["radius"] = 2.0;
    CHECK_THROWS_AS(RunConfig::from_json(j), ConfigError);
  }
}

TEST_CASE("cmd_coeffs") {
  std::ostringstream out;
  CHECK(cmd_coeffs(3, true, out) == kExitOk);
  CHECK(out.str().find("R_1 = 3/2") != std::string::npos);
  CHECK(out.str().find("R_2 = 65/8") != std::string::npos);
  CHECK(out.str().find("R_3 = 943/16") != std::string::npos);
  CHECK(out.str().find("1 6 130 3772") != std::string::npos);

  std::ostringstream dec;
  CHECK(cmd_coeffs(1, false, dec) == kExitOk);
  CHECK(dec.str().find("R_1 = 1.5") != std::string::npos);

  std::ostringstream err;
  CHECK(cmd_coeffs(0, true, err) == kExitOk);
  CHECK(err.str().find("R_0 = 1") != std::string::npos);
  CHECK(cmd_coeffs(1000, true, err) == kExitConfig);
}

TEST_CASE("cmd_radius prints the certified constants") {
  std::ostringstream out;
  CHECK(cmd_radius(out) == kExitOk);
  CHECK(out.str().find("0.285891852") != std::string::npos);
  CHECK(out.str().find("0.450196464") != std::string::npos);
  CHECK(out.str().find("12.2347877899") != std::string::npos);
}

TEST_CASE("cmd_certify writes a schema-versioned JSON verdict") {
  TempDir tmp;
  json j = base_config();
  j["output"] = {{"dir", tmp.file("out")}};
  const RunConfig cfg = RunConfig::from_json(j);

  std::ostringstream out;
  const int rc = cmd_certify(cfg, out);
  CHECK((rc == kExitOk || rc == kExitUncertified));
  std::ifstream in(tmp.file("out") + "/certificate.json");
  REQUIRE(in.good());
  json rep;
  in >> rep;
  CHECK(rep.at("schema_version") == 1);
  CHECK(rep.at("certificate").contains("verdict"));
  CHECK(rep.at("certificate").at("radius_used").get<double>() ==
        doctest::Approx(0.285891853));
}

TEST_CASE("cmd_solve end to end: beta=0 returns the seeds; verify reads back") {
  TempDir tmp;
  json j = base_config();
  j["beta"] = 0.0;
  j["order"] = 1;
  j["output"] = {{"dir", tmp.file("out")}, {"write_vtk", false}};
  const RunConfig cfg = RunConfig::from_json(j);

  std::ostringstream out;
  REQUIRE(cmd_solve(cfg, false, out) == kExitOk);

  // At beta = 0 the assembled fields coincide with the seeds.
  const PotentialSolver solver(cfg.grid, cfg.method);
  const PreparedRun run = prepare_run(cfg, solver);
  const VectorField3 D = read_raw_vector(tmp.file("out") + "/D.mbif");
  const VectorField3 E = read_raw_vector(tmp.file("out") + "/E.mbif");
  CHECK(max_diff(D, run.D_C) == 0.0);
  CHECK(max_diff(E, run.D_C) == 0.0);

  std::ostringstream vout;
  CHECK(cmd_verify(cfg, vout) == kExitOk);
  CHECK(vout.str().find("residuals") != std::string::npos);

  std::ifstream in(tmp.file("out") + "/report.json");
  REQUIRE(in.good());
  json rep;
  in >> rep;
  CHECK(rep.at("schema_version") == 1);
  CHECK(rep.at("certificate").at("verdict") == "certified");
  CHECK(rep.at("residuals").at("curl_E").get<double>() < 1e-10);
}

TEST_CASE("cmd_solve refuses an uncertified beta without force") {
  TempDir tmp;
  json j = base_config();
  j["beta"] = 10.0;
  j["output"] = {{"dir", tmp.file("out")}};
  const RunConfig cfg = RunConfig::from_json(j);
  std::ostringstream out;
  CHECK(cmd_solve(cfg, false, out) == kExitUncertified);
  CHECK(!std::filesystem::exists(tmp.file("out") + "/report.json"));
}
