#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "rkhawkes/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string output;
};

Run run(const fs::path& dir, const std::string& args) {
  fs::create_directories(dir);
  const fs::path log = dir / "cli.log";
  const std::string cmd = std::string(RKHAWKES_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, rkhawkes::read_text_file(log)};
}

json read_json(const fs::path& p) { return json::parse(rkhawkes::read_text_file(p)); }

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("rkhawkes_cli_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("help lists defaults") {
  TempDir t("help");
  const Run r = run(t.path, "fit --help");
  CHECK(r.code == 0);
  CHECK(r.output.find("--omega") != std::string::npos);
  CHECK(r.output.find("100") != std::string::npos);
  CHECK(r.output.find("mle") != std::string::npos);
  CHECK(run(t.path, "").code == 2);
  CHECK(run(t.path, "frobnicate").code == 2);
}

TEST_CASE("simulate writes three files and a manifest, deterministically") {
  TempDir t("sim");
  const std::string a = (t.path / "a").string(), b = (t.path / "b").string();
  REQUIRE(run(t.path, "simulate --model paper3d --horizon 100 --seed 7 --out " + a).code == 0);
  REQUIRE(run(t.path, "simulate --model paper3d --horizon 100 --seed 7 --out " + b).code == 0);
  for (const char* f : {"train.csv", "val.csv", "test.csv", "ground_truth.json"})
    CHECK(rkhawkes::read_text_file(fs::path(a) / f) == rkhawkes::read_text_file(fs::path(b) / f));
  json m = read_json(fs::path(a) / "manifest.json");
  json mb = read_json(fs::path(b) / "manifest.json");
  m["config"].erase("out");
  mb["config"].erase("out");
  CHECK(m == mb);
  CHECK(m["status"] == "complete");
  CHECK(m["config"]["seed"] == 7);
  CHECK(m["outputs"]["val"]["seed"] == 8);
  CHECK(m["outputs"]["test"]["seed"] == 9);
  CHECK(m["outputs"]["train"]["counts"].size() == 3);
}

TEST_CASE("unknown model is a config error naming the valid ones") {
  TempDir t("badmodel");
  const Run r = run(t.path, "simulate --model nope --out " + (t.path / "o").string());
  CHECK(r.code == 2);
  CHECK(r.output.find("paper3d") != std::string::npos);
}

TEST_CASE("config precedence: flags over file over defaults") {
  TempDir t("cfg");
  rkhawkes::write_text_file(t.path / "c.json", R"({"horizon": 50, "simulate": {"seed": 3}})");
  const std::string cfg = " --config " + (t.path / "c.json").string();
  REQUIRE(run(t.path, "simulate --model poisson --out " + (t.path / "a").string() + cfg).code == 0);
  json m = read_json(t.path / "a" / "manifest.json");
  CHECK(m["config"]["horizon"] == 50.0);
  CHECK(m["config"]["seed"] == 3);
  CHECK(m["config"]["format"] == "csv");
  REQUIRE(run(t.path, "simulate --model poisson --horizon 30 --out " + (t.path / "b").string() + cfg).code == 0);
  m = read_json(t.path / "b" / "manifest.json");
  CHECK(m["config"]["horizon"] == 30.0);
  rkhawkes::write_text_file(t.path / "bad.json", R"({"horizn": 50})");
  CHECK(run(t.path, "simulate --config " + (t.path / "bad.json").string() + " --out " + (t.path / "c").string())
            .code == 2);
}

TEST_CASE("fit, score and eval-l1 round trip") {
  TempDir t("fit");
  const auto d = t.path.string();
  REQUIRE(run(t.path, "simulate --model poisson --horizon 80 --out " + d).code == 0);
  const std::string fit_args = "fit --events " + d + "/train.csv --horizon 80 --support 1 --gamma 10 --eta 1";
  REQUIRE(run(t.path, fit_args + " --criterion ls --out " + d + "/ls").code == 0);
  CHECK(read_json(t.path / "ls" / "report.json")["criterion"] == "ls");
  REQUIRE(run(t.path, fit_args + " --out " + d + "/f").code == 0);
  const json rep = read_json(t.path / "f" / "report.json");
  CHECK(std::isfinite(rep["objective"].get<double>()));

  REQUIRE(run(t.path, "score --model " + d + "/f/model.json --events " + d + "/test.csv --horizon 80 --out " + d +
                          "/s").code == 0);
  const json s = read_json(t.path / "s" / "score.json");
  CHECK(std::isfinite(s["log_likelihood"].get<double>()));

  REQUIRE(run(t.path, "eval-l1 --model " + d + "/f/model.json --truth poisson --out " + d + "/l").code == 0);
  CHECK(read_json(t.path / "l" / "l1.json")["l1_sum"].get<double>() >= 0.0);
  // Support mismatch with paper3d (A = 5).
  CHECK(run(t.path, "eval-l1 --model " + d + "/f/model.json --truth paper3d --out " + d + "/l2").code == 2);
}

TEST_CASE("fit on empty events") {
  TempDir t("empty");
  rkhawkes::write_text_file(t.path / "e.csv", "");
  REQUIRE(run(t.path, "fit --events " + (t.path / "e.csv").string() +
                          " --horizon 50 --dims 1 --support 1 --out " + (t.path / "o").string())
              .code == 0);
  const json model = read_json(t.path / "o" / "model.json");
  CHECK(model["mu"][0].get<double>() <= 1e-3);
}

TEST_CASE("score with mismatched dims is a config error") {
  TempDir t("dims");
  const auto d = t.path.string();
  REQUIRE(run(t.path, "simulate --model poisson --horizon 40 --out " + d).code == 0);
  REQUIRE(run(t.path, "fit --events " + d + "/train.csv --horizon 40 --support 1 --out " + d + "/f").code == 0);
  rkhawkes::write_text_file(t.path / "two.csv", "0,1.0\n1,2.0\n");
  CHECK(run(t.path, "score --model " + d + "/f/model.json --events " + d + "/two.csv --horizon 40 --out " + d + "/s")
            .code == 2);
}

TEST_CASE("missing input file is an I/O error") {
  TempDir t("io");
  CHECK(run(t.path, "fit --events /nonexistent/x.csv --out " + (t.path / "o").string()).code == 4);
  CHECK(run(t.path, "score --model /nonexistent/m.json --events x.csv --out " + (t.path / "o").string()).code == 4);
}

TEST_CASE("malformed events are a config error") {
  TempDir t("parse");
  rkhawkes::write_text_file(t.path / "bad.csv", "0,abc\n");
  CHECK(run(t.path, "fit --events " + (t.path / "bad.csv").string() + " --out " + (t.path / "o").string()).code == 2);
}

}  // TEST_SUITE
