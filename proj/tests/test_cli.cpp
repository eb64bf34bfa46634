#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "selfapprox/cli.hpp"
#include "selfapprox/errors.hpp"

using namespace selfapprox;
using namespace selfapprox::cli;
namespace fs = std::filesystem;

namespace {

using Args = std::map<std::string, std::string>;

RunConfig config(const std::string& command, Args args = {}) { return resolve(command, args, std::nullopt); }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("selfapprox_cli_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_quiet(const RunConfig& c) {
  std::ostringstream out, err;
  return run(c, out, err);
}

}  // namespace

TEST_CASE("registry has unique names and parseable defaults") {
  std::set<std::string> seen;
  for (const auto& k : key_registry()) {
    CHECK(seen.insert(k.name).second);
    for (const auto& a : k.aliases) CHECK(seen.insert(a).second);
  }
  for (const auto& cmd : command_names()) CHECK_NOTHROW(validate(config(cmd)));
  CHECK(canonical_key("d") == "shifts");
  CHECK_FALSE(canonical_key("bogus").has_value());
}

TEST_CASE("relations example: 1, 1/2, 1/4") {
  const auto r = execute(config("relations", {{"shifts", "1,0.5,0.25"}})).results["results"]["relation"];
  CHECK(r["denominator"] == 4);
  CHECK(r["coefficients"] == Json::parse("[[2],[1]]"));
  CHECK(r["independent_indices"] == Json::parse("[0]"));
  CHECK(r["status"] == "exact");
}

TEST_CASE("kronecker example: primes up to 5, delta 0.1") {
  const auto r = execute(config("kronecker", {{"primes-upto", "5"},
                                              {"delta", "0.1"},
                                              {"d", "1"},
                                              {"T", "1e5"},
                                              {"samples", "1e6"},
                                              {"seed", "7"}}))
                     .results["results"];
  const double density = r["density"];
  CHECK(r["expected_density"].get<double>() == doctest::Approx(0.008).epsilon(1e-12));
  CHECK(std::abs(density - 0.008) <= 3.0 * r["standard_error"].get<double>());
  CHECK(r["within_3_se"] == true);
}

TEST_CASE("scan-density example: identical shifts give density 1") {
  const auto r = execute(config("scan-density", {{"d", "1,1"}, {"chars", "4:1,4:1"}, {"eps", "0.1"}, {"T", "100"}}))
                     .results["results"];
  CHECK(r["estimates"][0]["density"] == 1.0);
  CHECK(r["samples"]["g_max"] == 0.0);
}

TEST_CASE("configuration errors") {
  CHECK_THROWS_AS(config("scan-density", {{"bogus", "1"}}), ConfigError);
  CHECK_THROWS_AS(config("nope"), ConfigError);
  CHECK_THROWS_AS(resolve(std::nullopt, {}, std::nullopt), ConfigError);
  CHECK_THROWS_AS(config("scan-density", {{"samples", "many"}}), ConfigError);
  CHECK_THROWS_AS(config("scan-density", {{"samples", "2.5"}}), ConfigError);
  CHECK_THROWS_AS(config("scan-density", {{"sampling", "sobol"}}), ConfigError);
  CHECK_THROWS_AS(config("scan-density", {{"refine", "maybe"}}), ConfigError);
  CHECK_THROWS_AS(config("scan-density", {{"threads", "0"}}), ConfigError);
  CHECK_THROWS_AS(execute(config("scan-density", {{"chars", "4:1,4:1,4:1"}})), ConfigError);
  CHECK_THROWS_AS(execute(config("scan-density", {{"eps", "0"}})), ConfigError);
  CHECK_THROWS_AS(execute(config("relations", {{"shifts", "1,x"}})), ConfigError);
  CHECK(config("scan-density", {{"samples", "1e3"}}).count("samples") == 1000);
}

TEST_CASE("errors map to typed JSON and exit codes") {
  const ConfigError c("bad");
  const DomainError d("dom");
  const PoleError p("pole");
  const RangeError r("far");
  CHECK(error_json(c)["error"]["type"] == "ConfigError");
  CHECK(error_json(p)["error"]["type"] == "PoleError");
  CHECK(error_json(r)["error"]["message"] == "far");
  CHECK(exit_code(c) == 2);
  CHECK(exit_code(d) == 3);
  CHECK(exit_code(p) == 3);
  CHECK(exit_code(r) == 4);

  std::ostringstream out, err;
  const auto dir = scratch("range");
  const int rc = run(config("scan-density", {{"T", "1e5"}, {"output-dir", dir.string()}}), out, err);
  CHECK(rc == 4);
  const auto j = Json::parse(err.str());
  CHECK(j["error"]["type"] == "RangeError");
  CHECK(j["error"]["message"].get<std::string>().find("largest usable T is 24999.8") != std::string::npos);
  CHECK(out.str().empty());
}

TEST_CASE("precedence: command line > environment > config file > defaults") {
  const auto dir = scratch("precedence");
  const auto file = dir / "run.cfg";
  std::ofstream(file) << "# comment\ncommand = kronecker\nT = 500   # trailing\nseed=3\noutput-dir = from-file\n";
  auto c = resolve(std::nullopt, {{"config", file.string()}}, std::nullopt);
  CHECK(c.command == "kronecker");
  CHECK(c.real("T") == 500.0);
  CHECK(c.count("seed") == 3);
  CHECK(c.text("output-dir") == "from-file");
  CHECK(c.count("samples") == 1000);

  c = resolve(std::nullopt, {{"config", file.string()}}, "from-env");
  CHECK(c.text("output-dir") == "from-env");
  c = resolve("relations", {{"config", file.string()}, {"seed", "9"}, {"output-dir", "from-cli"}}, "from-env");
  CHECK(c.command == "relations");
  CHECK(c.count("seed") == 9);
  CHECK(c.text("output-dir") == "from-cli");

  std::ofstream(dir / "bad.cfg") << "bogus = 1\n";
  CHECK_THROWS_AS(resolve("relations", {{"config", (dir / "bad.cfg").string()}}, std::nullopt), ConfigError);
  std::ofstream(dir / "flat.json") << R"({"command": "b2", "N-ladder": [5, 50], "refine": false})";
  c = resolve(std::nullopt, {{"config", (dir / "flat.json").string()}}, std::nullopt);
  CHECK(c.command == "b2");
  CHECK(c.counts("N-ladder") == std::vector<std::uint64_t>{5, 50});
  CHECK_FALSE(c.flag("refine"));
  CHECK_THROWS_AS(resolve("b2", {{"config", (dir / "missing.cfg").string()}}, std::nullopt), ConfigError);
}

TEST_CASE("artifacts and manifest round trip") {
  const auto a = scratch("a");
  const auto b = scratch("b");
  const auto c = config("scan-density", {{"T", "200"},
                                         {"samples", "40"},
                                         {"t-lo", "-0.25"},
                                         {"eps", "0.5,1,2"},
                                         {"seed", "11"},
                                         {"output-dir", a.string()}});
  REQUIRE(run_quiet(c) == 0);
  for (const char* name : {"manifest.json", "results.json", "samples.csv", "plotdata.csv"})
    CHECK(fs::exists(a / name));
  CHECK(slurp(a / "samples.csv").rfind("tau,g_value,refine_delta\n", 0) == 0);
  CHECK(slurp(a / "plotdata.csv").rfind("series,x,y\n", 0) == 0);

  const auto replay = resolve(std::nullopt, {{"config", (a / "manifest.json").string()}, {"output-dir", b.string()}},
                              std::nullopt);
  CHECK(replay.command == "scan-density");
  REQUIRE(run_quiet(replay) == 0);
  CHECK(slurp(a / "results.json") == slurp(b / "results.json"));
  CHECK(slurp(a / "samples.csv") == slurp(b / "samples.csv"));
  CHECK(slurp(a / "plotdata.csv") == slurp(b / "plotdata.csv"));

  const auto results = Json::parse(slurp(a / "results.json"));
  CHECK_FALSE(results["parameters"].contains("threads"));
  CHECK_FALSE(results["parameters"].contains("output-dir"));
  CHECK(results["parameters"]["t-lo"] == -0.25);
}

TEST_CASE("results do not depend on the thread count") {
  const auto one = scratch("t1");
  const auto four = scratch("t4");
  Args args{{"T", "300"}, {"samples", "30"}, {"N-ladder", "10,100"}};
  args["output-dir"] = one.string();
  REQUIRE(run_quiet(config("b2", args)) == 0);
  args["output-dir"] = four.string();
  args["threads"] = "4";
  REQUIRE(run_quiet(config("b2", args)) == 0);
  CHECK(slurp(one / "results.json") == slurp(four / "results.json"));
}

TEST_CASE("samples-in reanalyses a previous run") {
  const auto a = scratch("resample");
  REQUIRE(run_quiet(config("scan-density", {{"T", "150"}, {"samples", "25"}, {"output-dir", a.string()}})) == 0);
  const auto first = Json::parse(slurp(a / "results.json"))["results"]["estimates"][0];
  const auto again = execute(config("scan-density", {{"T", "150"}, {"samples-in", (a / "samples.csv").string()}}))
                         .results["results"]["estimates"][0];
  CHECK(first == again);
}

TEST_CASE("plot data in JSON") {
  const auto a = scratch("json");
  REQUIRE(run_quiet(config("relations", {{"format", "json"}, {"output-dir", a.string()}})) == 0);
  const auto rows = Json::parse(slurp(a / "plotdata.json"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1]["series"] == "shift");
  CHECK(rows[1]["y"] == 2.0);
  CHECK(slurp(a / "plotdata.csv") == "series,x,y\nshift,0,1\nshift,1,2\n");
}

TEST_CASE("other commands produce their reports") {
  auto r = execute(config("dist-fn", {{"T-ladder", "100,200"}, {"samples", "40"}, {"refine", "false"}}));
  CHECK(r.results["results"]["steps"].size() == 1);
  CHECK(r.samples_csv.size() > 80);
  r = execute(config("find-tau", {{"d", "1"}, {"primes-upto", "3"}, {"search-bound", "2000"}}));
  CHECK(r.results["results"]["all_verified"] == true);
  CHECK(r.results["results"]["taus"][0] == 0.0);
  r = execute(config("mean-value", {{"T", "200"}, {"samples", "20"}, {"y", "20,40"}}));
  CHECK(r.results["results"]["entries"].size() == 2);
  r = execute(config("mean-value", {{"kind", "tail"}, {"T", "1e4"}, {"samples", "50"}, {"d", "1"}, {"y", "5"}}));
  CHECK(r.results["results"]["tail"]["empirical"] == 0.0);
  r = execute(config("relations", {{"shifts", "1,sqrt(2)"}, {"check-primes-upto", "3"}}));
  CHECK(r.results["results"]["relation"]["mode"] == "float");
  CHECK(r.results["results"]["log_prime_independence"]["relation_found"] == false);
}

TEST_CASE("selfcheck passes") {
  const auto r = execute(config("selfcheck"));
  CHECK(r.status == 0);
  CHECK(r.results["results"]["all_passed"] == true);
}

TEST_CASE("csv quoting and real formatting") {
  CHECK(csv_field("plain") == "plain");
  CHECK(csv_field("a,b") == "\"a,b\"");
  CHECK(csv_field("say \"hi\"") == "\"say \"\"hi\"\"\"");
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 1e21, 0.0})
    CHECK(std::stod(format_real(x)) == x);
  CHECK(format_real(0.1) == "0.1");
}
