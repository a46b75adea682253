#include <doctest.h>

#include "flagein/report.hpp"

using namespace flagein;

TEST_CASE("solution set JSON is byte-stable") {
  const auto spec = parse_flag_spec("A:3:[2,1,1]:-");
  const std::string a = to_json(solve(spec, SolveMode::Both)).dump(2);
  const std::string b = to_json(solve(spec, SolveMode::Both)).dump(2);
  CHECK(a == b);
  const auto j = nlohmann::json::parse(a);
  CHECK(j["flag"] == "A:3:[2,1,1]:-");
  CHECK(j["solutions"].size() == 5);
  CHECK(j["groups"].size() == 2);
  CHECK(j["solutions"][0]["coefficient_order"].size() == 4);
}

TEST_CASE("table CSV and Markdown") {
  std::vector<Table1Row> rows{table1_row(parse_flag_spec("A:3:[2,2]:-")), table1_row(parse_flag_spec("C:3:[3]:-"))};
  const std::string csv = table1_csv(rows);
  CHECK(csv.rfind("flag,summands,equiv,count,normal_einstein,expected_count,match\n", 0) == 0);
  CHECK(csv.find("A:3:[2,2]:-,2,no,1,yes,1,MATCH") != std::string::npos);
  CHECK(csv.find("C:3:[3]:-,2,no,0,no,0,MATCH") != std::string::npos);
  const std::string md = table1_markdown(rows);
  CHECK(md.find("| U(3)/O(3) |") != std::string::npos);
}
