#include "doctest.h"

#include <cstdlib>
#include <sys/wait.h>

#include "json.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using gehm::testing::slurp;
using gehm::testing::spit;
using gehm::testing::TempDir;

namespace {

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " GEHM_CLI_PATH " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string run_capture(const std::string& args, const fs::path& out) {
  const int status = std::system((GEHM_CLI_PATH " " + args + " >" + out.string() + " 2>/dev/null").c_str());
  REQUIRE(status == 0);
  return slurp(out);
}

const char* kSmall = R"({
  "graph": {"model": "barabasi_albert", "n": 16, "m": 2, "seed": 5},
  "sim": {"horizon": 0.1},
  "replicates": 4
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("exit codes") {
  TempDir dir("cli-exit");
  spit(dir / "bad.json", R"({"graph": {"model": "lattice"}, "sim": {"dt": -1}})");
  spit(dir / "small.json", kSmall);
  spit(dir / "blocker", "x");
  CHECK(run("simulate " + (dir / "bad.json").string()) == 2);
  CHECK(run("simulate " + (dir / "missing.json").string()) == 4);
  CHECK(run("simulate " + (dir / "small.json").string() + " -o " + (dir / "blocker" / "out").string()) == 4);
  CHECK(run("graph validate " + (dir / "missing.txt").string()) == 4);
  CHECK(run("simulate " + (dir / "small.json").string() + " -o " + (dir / "ok").string()) == 0);
  CHECK(fs::exists(dir / "ok" / "summary.json"));
}

TEST_CASE("output directory from the environment") {
  TempDir dir("cli-env");
  spit(dir / "small.json", kSmall);
  const std::string env = "GEHM_OUTPUT_DIR=" + (dir / "env").string();
  CHECK(run("spectrum " + (dir / "small.json").string(), env) == 0);
  CHECK(fs::exists(dir / "env" / "spectrum.json"));
  CHECK(run("spectrum " + (dir / "small.json").string() + " -o " + (dir / "flag").string(), env) == 0);
  CHECK(fs::exists(dir / "flag" / "spectrum.json"));
}

TEST_CASE("graph gen and validate") {
  TempDir dir("cli-graph");
  const auto file = dir / "g.txt";
  CHECK(run("graph gen --model watts_strogatz --n 30 --k 4 --beta 0.2 --seed 9 --normalization none -o " + file.string()) == 0);
  const auto report = nlohmann::json::parse(run_capture("graph validate " + file.string(), dir / "report.json"));
  CHECK(report["nodes"] == 30);
  CHECK(report["undirected_edges"] == 60);
  CHECK(report["value_symmetric"] == true);
  CHECK(report["isolated_nodes"] == 0);
  CHECK(run("graph gen --model watts_strogatz --n 30 --k 3") == 2);
  spit(dir / "broken.txt", "# nodes\n3\n0 1 x\n");
  CHECK(run("graph validate " + (dir / "broken.txt").string()) == 2);
}

TEST_CASE("worker count does not change results") {
  TempDir dir("cli-workers");
  spit(dir / "small.json", kSmall);
  CHECK(run("simulate " + (dir / "small.json").string() + " -w 1 -o " + (dir / "a").string()) == 0);
  CHECK(run("simulate " + (dir / "small.json").string() + " -w 4 -o " + (dir / "b").string()) == 0);
  for (const auto& e : fs::recursive_directory_iterator(dir / "a")) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    const auto rel = fs::relative(e.path(), dir / "a");
    CHECK_MESSAGE(slurp(e.path()) == slurp(dir / "b" / rel), rel.string());
  }
}

TEST_CASE("resolved config printout") {
  TempDir dir("cli-config");
  const auto printed = nlohmann::json::parse(run_capture("config", dir / "c.json"));
  CHECK(printed["graph"]["n"] == 2000);
  CHECK(printed["sim"]["p"] == 3.0);
}

}  // TEST_SUITE
