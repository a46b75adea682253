#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

int run(const std::string& args, const std::string& out = "/dev/null") {
  const std::string cmd = std::string(FLAGEIN_CLI) + " " + args + " > " + out + " 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("cli exit codes") {
  CHECK(run("list A 3") == 0);
  CHECK(run("solve 'C:4:[4]:-'") == 0);
  CHECK(run("solve 'A:3:[2,2]'") == 64);
  CHECK(run("solve 'E:6:[6]:-'") == 64);
  CHECK(run("solve 'B:3:[2,1]:+'") == 2);
  CHECK(run("solve 'B:5:[2,3]:+' --closed-form") == 2);
  CHECK(run("check 'B:3:[3]:-'") == 0);
  CHECK(run("bogus") != 0);
}

TEST_CASE("cli solve report") {
  const std::string a = "cli_solve.json";
  REQUIRE(run("solve 'C:4:[4]:-'", a) == 0);
  auto j = nlohmann::json::parse(slurp(a));
  CHECK(j["schema_version"] == 1);
  CHECK(j["flag"] == "C:4:[4]:-");
  CHECK(j["result"]["solutions"].empty());
  CHECK(j.contains("tool_version"));
  CHECK(j.contains("command"));

  REQUIRE(run("solve 'A:3:[2,1,1]:-' --json " + a) == 0);
  auto ja = nlohmann::json::parse(slurp(a));
  REQUIRE(run("solve 'A:3:[2,1,1]:-' --json " + a) == 0);
  auto jb = nlohmann::json::parse(slurp(a));
  CHECK(ja["result"]["solutions"].size() == 5);
  ja.erase("timing_ms");
  jb.erase("timing_ms");
  CHECK(ja.dump() == jb.dump());
  std::remove(a.c_str());
}

TEST_CASE("cli table1 csv") {
  const std::string csv = "cli_table.csv";
  REQUIRE(run("table1 --max-l 3 --csv " + csv) == 0);
  const std::string text = slurp(csv);
  CHECK(text.find("A:3:[2,1,1]:-,3,yes,5,no,5,MATCH") != std::string::npos);
  CHECK(text.find("MISMATCH") == std::string::npos);
  std::remove(csv.c_str());
}
