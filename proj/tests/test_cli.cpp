#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <sys/wait.h>

#include <json.hpp>

#include "cli.hpp"
#include "curecg/io.hpp"

using namespace curecg;
using namespace curecg::cli;
using Catch::Matchers::ContainsSubstring;
namespace fs = std::filesystem;

namespace {

RunConfig parse(std::vector<std::string> args) {
  args.insert(args.begin(), "curecg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return parse_args(static_cast<int>(argv.size()), argv.data());
}

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "curecg");
  args.push_back("--quiet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

int usage_code(std::vector<std::string> args) {
  try {
    parse(std::move(args));
  } catch (const UsageError& e) {
    return e.code();
  }
  return -1;
}

std::string usage_message(std::vector<std::string> args) {
  try {
    parse(std::move(args));
  } catch (const UsageError& e) {
    return e.what();
  }
  return {};
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("curecg_cli_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("argument parsing", "[cli]") {
  SECTION("fit defaults") {
    const auto c = parse({"fit", "--data", "d.csv", "--out", "est.json"});
    CHECK(c.command == Subcommand::kFit);
    CHECK(c.data == "d.csv");
    CHECK(c.out == "est.json");
    CHECK(c.optimizer.k_max == 100);
    CHECK(c.optimizer.lambda == 0.1);
    CHECK(c.optimizer.tol == 0.001);
    CHECK_FALSE(c.alpha.has_value());
  }
  SECTION("mc") {
    const auto c = parse({"mc", "--design", "design.json", "--reps", "500", "--seed", "42"});
    CHECK(c.command == Subcommand::kMc);
    CHECK(c.reps == 500);
    CHECK(c.seed == 42);
    CHECK(c.out == "mc_summary.json");
  }
  SECTION("overrides") {
    const auto c = parse({"bootstrap", "--data", "d.csv", "--out", "b.json", "--B", "40",
                          "--alpha", "1", "--k-max", "250", "--tol", "1e-5", "--lambda", "0.2",
                          "--threads", "2"});
    CHECK(c.command == Subcommand::kBootstrap);
    CHECK(c.B == 40);
    CHECK(c.alpha == 1.0);
    CHECK(c.optimizer.k_max == 250);
    CHECK(c.optimizer.tol == 1e-5);
    CHECK(c.optimizer.lambda == 0.2);
    CHECK(c.threads == 2);
    const auto r = parse({"residuals", "--data", "d.csv", "--out", "res", "--m-sets", "3"});
    CHECK(r.m_sets == 3);
  }
  SECTION("rejections name the flag") {
    CHECK(usage_code({"fit", "--data", "d.csv", "--out", "e.json", "--lambda", "0.7"}) == kExitUsage);
    CHECK_THAT(usage_message({"fit", "--data", "d.csv", "--out", "e.json", "--lambda", "0.7"}),
               ContainsSubstring("--lambda"));
    CHECK_THAT(usage_message({"fit", "--data", "d.csv", "--out", "e.json", "--bogus"}),
               ContainsSubstring("--bogus"));
    CHECK_THAT(usage_message({"fit", "--out", "e.json"}), ContainsSubstring("--data"));
    CHECK_THAT(usage_message({"fit", "--data", "d", "--out", "e", "--tol", "0"}),
               ContainsSubstring("--tol"));
    CHECK_THAT(usage_message({"fit", "--data", "d", "--out", "e", "--alpha", "1.5"}),
               ContainsSubstring("--alpha"));
    CHECK(usage_code({}) == kExitUsage);
    CHECK(usage_code({"fly"}) == kExitUsage);
    CHECK(usage_code({"--help"}) == kExitOk);
  }
  SECTION("seed from the environment") {
    ::setenv("CURECG_SEED", "1234", 1);
    CHECK(parse({"simulate", "--design", "d.json", "--out", "s.csv"}).seed == 1234);
    CHECK(parse({"simulate", "--design", "d.json", "--out", "s.csv", "--seed", "5"}).seed == 5);
    ::unsetenv("CURECG_SEED");
    CHECK(parse({"simulate", "--design", "d.json", "--out", "s.csv"}).seed == 0);
  }
}

TEST_CASE("file workflows", "[cli]") {
  TempDir tmp;
  write_text_file(tmp / "design.json", R"({"type": "binary", "n": 300})");

  REQUIRE(invoke({"simulate", "--design", tmp / "design.json", "--out", tmp / "a.csv", "--seed",
                  "42"}) == kExitOk);
  REQUIRE(invoke({"simulate", "--design", tmp / "design.json", "--out", tmp / "b.csv", "--seed",
                  "42"}) == kExitOk);
  CHECK(read_text_file(tmp / "a.csv") == read_text_file(tmp / "b.csv"));

  SECTION("fit of simulated data") {
    REQUIRE(invoke({"fit", "--data", tmp / "a.csv", "--out", tmp / "est.json", "--trace",
                    tmp / "trace.jsonl"}) == kExitOk);
    const auto j = nlohmann::json::parse(read_text_file(tmp / "est.json"));
    CHECK(j["converged"] == true);
    CHECK(j["status"] == "converged");
    // Weibull parameters within three reference RMSEs of the truth
    CHECK(std::abs(j["theta_hat"]["gamma1"].get<double>() - 0.316) < 3 * 0.034);
    CHECK(std::abs(j["theta_hat"]["gamma2"].get<double>() - 0.179) < 3 * 0.019);
    // regression and index parameters within three Monte Carlo RMSEs of this estimator
    CHECK(std::abs(j["theta_hat"]["beta"][0].get<double>() - 0.905) < 3 * 0.59);
    CHECK(std::abs(j["theta_hat"]["beta"][1].get<double>() + 0.755) < 3 * 0.44);
    CHECK(fs::exists(tmp / "est.txt"));
    CHECK(fs::file_size(tmp / "trace.jsonl") > 0);

    REQUIRE(invoke({"residuals", "--data", tmp / "a.csv", "--estimate", tmp / "est.json", "--out",
                    tmp / "res", "--seed", "3"}) == kExitOk);
    const auto qq = read_text_file(tmp / "res.qq.csv");
    CHECK(std::count(qq.begin(), qq.end(), '\n') == 301);
    const auto ks = nlohmann::json::parse(read_text_file(tmp / "res.ks.json"));
    CHECK(ks["p_value"].get<double>() >= 0.0);
    CHECK(fs::exists(tmp / "res.residuals.csv"));
  }
  SECTION("fixed alpha fit and bootstrap") {
    REQUIRE(invoke({"fit", "--data", tmp / "a.csv", "--out", tmp / "e1.json", "--alpha", "1"}) ==
            kExitOk);
    CHECK(parse_estimate_json(read_text_file(tmp / "e1.json")).alpha == 1.0);
    REQUIRE(invoke({"bootstrap", "--data", tmp / "a.csv", "--out", tmp / "b1.json", "--B", "20",
                    "--seed", "1"}) == kExitOk);
    REQUIRE(invoke({"bootstrap", "--data", tmp / "a.csv", "--out", tmp / "b2.json", "--B", "20",
                    "--seed", "1", "--threads", "1"}) == kExitOk);
    CHECK(read_text_file(tmp / "b1.json") == read_text_file(tmp / "b2.json"));
    const auto j = nlohmann::json::parse(read_text_file(tmp / "b1.json"));
    CHECK(j["se"]["alpha"].get<double>() > 0.0);
  }
  SECTION("mc") {
    REQUIRE(invoke({"mc", "--design", tmp / "design.json", "--reps", "4", "--out",
                    tmp / "mc.json"}) == kExitOk);
    const auto text = read_text_file(tmp / "mc.txt");
    CHECK_THAT(text, ContainsSubstring("Bias"));
    CHECK_THAT(text, ContainsSubstring("RMSE"));
    CHECK(nlohmann::json::parse(read_text_file(tmp / "mc.json"))["attempted"] == 4);
  }
  SECTION("error exit codes") {
    write_text_file(tmp / "bad.csv", "y,delta,x1\n1,1,0\n2,5,1\n");
    CHECK(invoke({"fit", "--data", tmp / "bad.csv", "--out", tmp / "x.json"}) == kExitIo);
    write_text_file(tmp / "empty.csv", "");
    CHECK(invoke({"fit", "--data", tmp / "empty.csv", "--out", tmp / "x.json"}) == kExitIo);
    CHECK(invoke({"fit", "--data", tmp / "missing.csv", "--out", tmp / "x.json"}) == kExitIo);
    write_text_file(tmp / "one.csv", "y,delta,x1\n2.5,1,0\n");
    const int code = invoke({"fit", "--data", tmp / "one.csv", "--out", tmp / "one.json"});
    CHECK((code == kExitOk || code == kExitNonconvergence));
    CHECK(fs::exists(tmp / "one.json"));
    CHECK(invoke({"fit", "--lambda", "0.7"}) == kExitUsage);
  }
}

TEST_CASE("installed executable", "[cli]") {
  TempDir tmp;
  write_text_file(tmp / "design.json", R"({"type": "continuous", "n": 150})");
  const std::string exe = CURECG_EXE;
  auto run = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " 2>/dev/null").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  const std::string sim = "simulate --design " + (tmp / "design.json") + " --seed 9 --out ";
  REQUIRE(run(sim + (tmp / "x.csv")) == 0);
  REQUIRE(run(sim + (tmp / "y.csv")) == 0);
  CHECK(read_text_file(tmp / "x.csv") == read_text_file(tmp / "y.csv"));
  CHECK(run("fit --data " + (tmp / "x.csv") + " --out " + (tmp / "e.json")) == 0);
  CHECK(run("fit --lambda 0.7") == 64);
  CHECK(run("--help >/dev/null") == 0);
}
