// Runs the grushin executable; its path and the spec directory come from the build.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(GRUSHIN_EXE) + " " + args + " 2>/dev/null";
  Run r;
  std::unique_ptr<FILE, int (*)(FILE*)> pipe(popen(cmd.c_str(), "r"), pclose);
  REQUIRE(pipe);
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe.get())) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe.release());
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string spec(const char* name) { return std::string(" --spec ") + SPEC_DIR + "/" + name; }

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("dist brackets the Euclidean distance at beta = 0") {
  const auto r = run("dist" + spec("euclid.json") + " --from 0,0 --to 3,4");
  REQUIRE(r.code == 0);
  const auto j = parse(r);
  CHECK(j["bracket"]["lower"].get<double>() <= 5.0 + 1e-12);
  CHECK(j["bracket"]["upper"].get<double>() == doctest::Approx(5.0).epsilon(0.01));
  CHECK(j["version"] == "0.1.0");
  CHECK(j["spec_hash"].get<std::string>().size() == 16);
  CHECK(j.contains("seed"));
  CHECK(j.contains("resolution"));
}

TEST_CASE("usage and spec errors exit with 2") {
  CHECK(run("dist" + spec("cone.json") + " --from 5,0 --to 0,1").code == 2);
  CHECK(run("dist" + spec("cone.json") + " --from 1,x --to 0,1").code == 2);
  CHECK(run("dist" + spec("cone.json") + " --from 1,0,0 --to 0,1").code == 2);
  CHECK(run("dist" + spec("missing.json") + " --from 1,0 --to 0,1").code == 2);
  CHECK(run("embed blob" + spec("cone.json")).code == 2);
  CHECK(run("decompose" + spec("line.json") + " --delta 0.15 --c0 0.11").code == 2);
  CHECK(run("no-such-command").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("GRUSHIN_THREADS is validated") {
  const std::string exe = GRUSHIN_EXE;
  const auto bad = std::system(("GRUSHIN_THREADS=zero " + exe + " verify nondoubling --n 0 > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(bad) == 2);
  const auto good = std::system(("GRUSHIN_THREADS=4 " + exe + " verify nondoubling --n 0 > /dev/null 2>&1").c_str());
  CHECK(WEXITSTATUS(good) == 0);
}

TEST_CASE("verify suites") {
  SUBCASE("holder passes with the uniform-domain constant") {
    const auto r = run("verify holder --H 16 --samples 100" + spec("vaxis.json"));
    CHECK(r.code == 0);
    CHECK_FALSE(parse(r)["holder"]["violated"].get<bool>());
  }
  SUBCASE("a too small holder constant is a certified violation") {
    CHECK(run("verify holder --H 0.1 --samples 20" + spec("vaxis.json")).code == 1);
  }
  SUBCASE("curvature of the alpha metric") {
    const auto r = run("verify curvature --alpha 1");
    CHECK(r.code == 0);
    const auto j = parse(r);
    CHECK(j["max_rel_error"].get<double>() <= 0.02);
    CHECK(j["samples"].size() == 10);
    CHECK(j["spec_hash"].is_null());
  }
  SUBCASE("nondoubling count") {
    const auto r = run("verify nondoubling --eps 1 --n 2");
    CHECK(r.code == 0);
    CHECK(parse(r)["nondoubling"]["count"] == 436);
  }
  SUBCASE("curvature bound with a claimed constant") {
    CHECK(run("verify curvature --A 3" + spec("vaxis.json")).code == 0);
    CHECK(run("verify curvature --A 1" + spec("vaxis.json")).code == 1);
  }
}

TEST_CASE("decompose reports passing checks") {
  const auto r = run("decompose --per-axis 40 --verify-balls --charts" + spec("line.json"));
  CHECK(r.code == 0);
  const auto j = parse(r);
  CHECK(j["system"]["disjoint"].get<bool>());
  CHECK(j["system"]["in_shell"].get<bool>());
  CHECK(j["system"]["data"]["a"] == 21.0);
  CHECK(j["whitney_balls"]["diameter_violations"] == 0);
  CHECK(j["charts"]["violations"] == 0);
  CHECK_FALSE(j["system"].contains("cubes"));
}

TEST_CASE("embed") {
  SUBCASE("cone path isometry") {
    const auto r = run("embed cone" + spec("cone.json"));
    CHECK(r.code == 0);
    const auto j = parse(r);
    CHECK(j["map"] == "cone(0.5)");
    CHECK(j["checks"]["path_isometry"]["max_rel_error"].get<double>() <= 2e-3);
  }
  SUBCASE("grushin chart length preservation") {
    const auto r = run("embed grushin-chart --alpha 2" + spec("line.json"));
    CHECK(r.code == 0);
    CHECK(parse(r)["checks"]["length_preservation"]["max_rel_error"].get<double>() <= 1e-3);
  }
  SUBCASE("pipeline") {
    const auto r = run("embed --pipeline '[{\"name\":\"cone\",\"param\":0.5},{\"name\":\"project-xy\"}]'" +
                       spec("cone.json"));
    CHECK(r.code == 0);
    CHECK(parse(r)["map"] == "cone(0.5) | project-xy");
  }
  SUBCASE("a bad pipeline is a usage error") {
    CHECK(run("embed --pipeline '[{\"name\":\"cone\"},{\"name\":\"cone\"}]'" + spec("cone.json")).code == 2);
    CHECK(run("embed --pipeline 'nope'" + spec("cone.json")).code == 2);
  }
}

TEST_CASE("--out writes the same bytes as stdout") {
  const std::string path = "grushin_cli_out.json";
  const auto a = run("verify nondoubling --n 1 --out " + path);
  CHECK(a.code == 0);
  CHECK(a.out.empty());
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == run("verify nondoubling --n 1").out);
  std::remove(path.c_str());
}

TEST_CASE("property: fixed seeds give byte-identical output") {
  for (const std::string args :
       {"verify qs --samples 100" + spec("vaxis.json"), "embed cone --seed 9" + spec("cone.json"),
        "verify doubling --samples 4 --per-axis 17" + spec("vaxis.json")}) {
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
  CHECK(run("embed cone --seed 1" + spec("cone.json")).out !=
        run("embed cone --seed 2" + spec("cone.json")).out);
}
