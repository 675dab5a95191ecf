#include <doctest.h>

#include <filesystem>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "../tools/cli.hpp"
#include "semiot/io.hpp"

namespace fs = std::filesystem;
using semiot::cli::run_cli;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("semiot_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "semiot");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (err_text) *err_text = err.str();
  return rc;
}

std::set<fs::path> tree(const fs::path& root) {
  std::set<fs::path> s;
  for (const auto& e : fs::recursive_directory_iterator(root)) s.insert(fs::relative(e.path(), root));
  return s;
}

}  // namespace

TEST_CASE("cli exit codes and outputs") {
  TempDir tmp;
  const fs::path gen = tmp.path / "gen";
  REQUIRE(run({"generate", "--out", gen.string(), "--count", "2", "--seed", "3"}) == 0);
  const fs::path inst = gen / "instances" / "00000.json";
  REQUIRE(fs::exists(inst));

  SUBCASE("solve writes g.json, trace.csv and manifest.json only") {
    const fs::path out = tmp.path / "solve";
    CHECK(run({"solve", "--instance", inst.string(), "--iters", "2000", "--out", out.string()}) == 0);
    CHECK(tree(out) == std::set<fs::path>{"g.json", "trace.csv", "manifest.json"});
    CHECK(semiot::read_text_file(out / "trace.csv").rfind("n,g_1,g_2", 0) == 0);
  }
  SUBCASE("usage errors exit 64") {
    CHECK(run({"solve", "--instance", inst.string(), "--iters", "0", "--out", (tmp.path / "x").string()}) == 64);
    CHECK(run({"solve", "--instance", inst.string()}) == 64);
    CHECK(run({"solve", "--bogus", "--instance", inst.string(), "--out", (tmp.path / "x").string()}) == 64);
    CHECK(run({"frobnicate"}) == 64);
    CHECK(run({"learn", "--instance", inst.string(), "--rho", "0.1", "--rho-schedule", "--out",
               (tmp.path / "x").string()}) == 64);
  }
  SUBCASE("malformed input exits 2") {
    const fs::path bad = tmp.path / "bad.json";
    semiot::write_text_file(bad, "{ not json");
    std::string err;
    CHECK(run({"solve", "--instance", bad.string(), "--out", (tmp.path / "y").string()}, &err) == 2);
    CHECK_FALSE(err.empty());
    CHECK(run({"solve", "--instance", (tmp.path / "missing.json").string(), "--out", (tmp.path / "y").string()}) ==
          2);
  }
  SUBCASE("failed verification exits 3") {
    CHECK(run({"solve", "--instance", inst.string(), "--iters", "10", "--verify-tol", "0.0001", "--verify-samples",
               "100000", "--out", (tmp.path / "z").string()}) == 3);
  }
  SUBCASE("replay reproduces the outputs byte for byte") {
    const fs::path a = tmp.path / "learn_a", b = tmp.path / "learn_b";
    REQUIRE(run({"learn", "--instance", inst.string(), "--horizon", "3000", "--seed", "5", "--score", "--oracle-iters",
                 "200000", "--oracle-tol", "0.05", "--oracle-check-samples", "50000", "--out", a.string()}) == 0);
    CHECK(run({"replay", "--manifest", (a / "manifest.json").string(), "--out", b.string()}) == 0);
    for (const auto& f : {"trace.csv", "checkpoint.json", "score.csv", "oracle.json"})
      CHECK(semiot::sha256_file(a / f) == semiot::sha256_file(b / f));

    // a manifest whose checksum no longer matches reports a mismatch
    std::string m = semiot::read_text_file(a / "manifest.json");
    const auto at = m.find("\"sha256\": \"") + 11;
    m.replace(at, 64, std::string(64, '0'));
    semiot::write_text_file(a / "manifest.json", m);
    CHECK(run({"replay", "--manifest", (a / "manifest.json").string(), "--out", (tmp.path / "learn_c").string()}) ==
          1);
  }
  SUBCASE("nothing is written outside --out") {
    const fs::path out = tmp.path / "only_here";
    const auto before = tree(tmp.path);
    CHECK(run({"solve", "--instance", inst.string(), "--iters", "100", "--out", out.string()}) == 0);
    auto after = tree(tmp.path);
    for (const auto& p : after)
      if (before.count(p) == 0) CHECK(p.string().rfind("only_here", 0) == 0);
  }
}
