#include "flagein/report.hpp"

#include <cmath>
#include <sstream>

namespace flagein {

namespace {

// fixed-precision rendering keeps the payload byte-stable across runs
double rounded(double v) {
  if (v == 0 || !std::isfinite(v)) return v;
  std::ostringstream o;
  o.precision(12);
  o << v;
  return std::stod(o.str());
}

}  // namespace

nlohmann::json to_json(const EinsteinSolution& s) {
  nlohmann::json j;
  j["rule_id"] = s.rule_id;
  j["provenance"] = to_string(s.provenance);
  const auto& ms = *s.metric.space;
  nlohmann::json coeffs = nlohmann::json::object();
  for (int i = 0; i < ms.dim(); ++i) coeffs[ms.coeff_names[i]] = rounded(s.metric.coeffs[i]);
  j["coefficients"] = coeffs;
  j["coefficient_order"] = ms.coeff_names;
  j["residual_below_1e-9"] = s.defect.residual < 1e-9;
  j["einstein_constant"] = rounded(s.defect.c_best);
  j["normalized_constant"] = rounded(s.defect.normalized_constant);
  return j;
}

nlohmann::json to_json(const SolutionSet& set) {
  nlohmann::json j;
  j["flag"] = set.flag.to_string();
  j["theta"] = theta_string(set.flag);
  j["catalog"] = set.catalog;
  nlohmann::json mods = nlohmann::json::array();
  for (const auto& m : set.space->decomposition().submodules) mods.push_back({{"name", m.name}, {"dim", m.dim()}});
  j["submodules"] = mods;
  j["solutions"] = nlohmann::json::array();
  for (const auto& s : set.solutions) j["solutions"].push_back(to_json(s));
  j["groups"] = nlohmann::json::array();
  for (const auto& g : set.groups)
    j["groups"].push_back({{"members", g.members},
                           {"status", to_string(g.status)},
                           {"normalized_constant", rounded(g.c_hat)},
                           {"witnesses", g.witnesses}});
  return j;
}

nlohmann::json to_json(const Table1Row& r) {
  return {{"flag", r.flag},         {"manifold", r.manifold}, {"summands", r.summands},
          {"equiv", r.equivalent},  {"count", r.count},       {"normal_einstein", r.normal_is_einstein},
          {"expected_count", r.expected}, {"match", r.match}};
}

nlohmann::json to_json(const std::vector<CheckResult>& checks) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& c : checks) j.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return j;
}

std::string table1_csv(const std::vector<Table1Row>& rows) {
  std::ostringstream o;
  o << "flag,summands,equiv,count,normal_einstein,expected_count,match\n";
  for (const auto& r : rows)
    o << r.flag << "," << r.summands << "," << (r.equivalent ? "yes" : "no") << "," << r.count << ","
      << (r.normal_is_einstein ? "yes" : "no") << "," << r.expected << "," << (r.match ? "MATCH" : "MISMATCH") << "\n";
  return o.str();
}

std::string table1_markdown(const std::vector<Table1Row>& rows) {
  std::ostringstream o;
  o << "| manifold | flag | summands | equiv | count | expected | normal | match |\n";
  o << "|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : rows)
    o << "| " << r.manifold << " | `" << r.flag << "` | " << r.summands << " | " << (r.equivalent ? "yes" : "-")
      << " | " << r.count << " | " << r.expected << " | " << (r.normal_is_einstein ? "yes" : "-") << " | "
      << (r.match ? "MATCH" : "MISMATCH") << " |\n";
  return o.str();
}

}  // namespace flagein
