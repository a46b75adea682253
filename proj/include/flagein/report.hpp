#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "flagein/checks.hpp"
#include "flagein/einstein.hpp"

namespace flagein {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

nlohmann::json to_json(const EinsteinSolution& s);
nlohmann::json to_json(const SolutionSet& set);
nlohmann::json to_json(const Table1Row& row);
nlohmann::json to_json(const std::vector<CheckResult>& checks);

std::string table1_csv(const std::vector<Table1Row>& rows);
std::string table1_markdown(const std::vector<Table1Row>& rows);

}  // namespace flagein
