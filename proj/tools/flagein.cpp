#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "flagein/checks.hpp"
#include "flagein/errors.hpp"
#include "flagein/report.hpp"

using namespace flagein;

namespace {

constexpr int kUsage = 64;

std::string echo(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) s += (i ? " " : "") + std::string(i == 0 ? "flagein" : argv[i]);
  return s;
}

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) {
    std::cerr << "cannot write " << path << "\n";
    return false;
  }
  f << text;
  return true;
}

int cmd_list(const std::string& fam, int l) {
  if (fam.size() != 1) throw BadFlag("family must be one of A, B, C, D");
  const Family f = family_from_char(fam[0]);
  for (const auto& spec : enumerate_small_flags(f, l)) {
    auto ms = shared_metric_space(spec);
    const auto& dec = ms->decomposition();
    std::cout << spec.to_string() << "  theta=" << theta_string(spec) << "  summands=" << dec.submodules.size()
              << "  equiv=" << (dec.has_equivalent_summands() ? "yes" : "no") << "  params=" << ms->dim()
              << "  catalog=" << (has_closed_form(spec) ? "closed-form" : "numeric") << "\n";
  }
  return 0;
}

int cmd_solve(const std::string& text, const std::string& mode_s, const std::string& json_out, const std::string& cmdline) {
  const FlagSpec spec = parse_flag_spec(text);
  SolveMode mode = SolveMode::Both;
  if (mode_s == "numeric") mode = SolveMode::Numeric;
  if (mode_s == "closed-form") mode = SolveMode::ClosedForm;
  if (mode_s == "auto" && !has_closed_form(spec)) mode = SolveMode::Numeric;
  const auto t0 = std::chrono::steady_clock::now();
  const auto set = solve(spec, mode);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::json report;
  report["schema_version"] = kSchemaVersion;
  report["tool_version"] = kToolVersion;
  report["command"] = cmdline;
  report["flag"] = spec.to_string();
  report["result"] = to_json(set);
  report["timing_ms"] = ms;
  if (!json_out.empty()) {
    if (!write_text(json_out, report.dump(2) + "\n")) return 1;
  } else {
    std::cout << report.dump(2) << "\n";
  }
  std::cerr << spec.to_string() << ": " << set.solutions.size() << " Einstein metric(s) up to homothety\n";
  return 0;
}

int cmd_table1(int max_l, const std::string& csv_out, const std::string& md_out) {
  std::vector<Table1Row> rows;
  for (const auto& inst : table1_instances(max_l)) {
    rows.push_back(table1_row(inst));
    const auto& r = rows.back();
    std::cout << (r.match ? "MATCH    " : "MISMATCH ") << r.flag << "  " << r.manifold << "  count=" << r.count
              << " expected=" << r.expected << " normal=" << (r.normal_is_einstein ? "yes" : "no") << "\n";
  }
  if (!csv_out.empty() && !write_text(csv_out, table1_csv(rows))) return 1;
  if (!md_out.empty() && !write_text(md_out, table1_markdown(rows))) return 1;
  int bad = 0;
  for (const auto& r : rows) bad += !r.match;
  std::cout << rows.size() - bad << "/" << rows.size() << " rows match\n";
  return bad ? 1 : 0;
}

int cmd_check(const std::string& text, bool json) {
  const FlagSpec spec = parse_flag_spec(text);
  const auto results = run_checks(spec);
  int bad = 0;
  for (const auto& c : results) bad += !c.pass;
  if (json) {
    std::cout << nlohmann::json{{"schema_version", kSchemaVersion}, {"flag", spec.to_string()}, {"checks", to_json(results)}}.dump(2)
              << "\n";
  } else {
    for (const auto& c : results) std::cout << (c.pass ? "pass " : "FAIL ") << c.name << "  " << c.detail << "\n";
  }
  return bad ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"invariant Einstein metrics on real flag manifolds"};
  app.require_subcommand(1);

  std::string fam;
  int rank = 0;
  auto* list = app.add_subcommand("list", "enumerate flags with 2 or 3 summands");
  list->add_option("family", fam, "A, B, C or D")->required();
  list->add_option("l", rank, "rank")->required();

  std::string spec_text, json_out;
  bool numeric = false, closed = false, both = false;
  auto* solve_cmd = app.add_subcommand("solve", "find all invariant Einstein metrics of a flag");
  solve_cmd->add_option("flag", spec_text, "FAMILY:l:[l_1,...,l_r]:(+|-)")->required();
  auto* o1 = solve_cmd->add_flag("--numeric", numeric, "numeric solver only");
  auto* o2 = solve_cmd->add_flag("--closed-form", closed, "catalog only");
  auto* o3 = solve_cmd->add_flag("--both", both, "catalog and numeric solver");
  o1->excludes(o2)->excludes(o3);
  o2->excludes(o3);
  solve_cmd->add_option("--json", json_out, "write the report here instead of stdout");

  int max_l = 6;
  std::string csv_out, md_out;
  auto* table = app.add_subcommand("table1", "reproduce the classification table");
  table->add_option("--max-l", max_l, "largest rank")->check(CLI::Range(2, 30));
  table->add_option("--csv", csv_out, "CSV output");
  table->add_option("--markdown", md_out, "Markdown output");

  std::string check_text;
  bool check_json = false;
  auto* check = app.add_subcommand("check", "run the invariant suite on one flag");
  check->add_option("flag", check_text, "FAMILY:l:[l_1,...,l_r]:(+|-)")->required();
  check->add_flag("--json", check_json, "JSON output");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) return cmd_list(fam, rank);
    if (*solve_cmd) {
      const std::string mode = numeric ? "numeric" : closed ? "closed-form" : both ? "both" : "auto";
      return cmd_solve(spec_text, mode, json_out, echo(argc, argv));
    }
    if (*table) return cmd_table1(max_l, csv_out, md_out);
    if (*check) return cmd_check(check_text, check_json);
  } catch (const BadFlag& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const BadPartition& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnsupportedRank& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const UnimplementedCase& e) {
    std::cerr << "unimplemented: " << e.what() << "\n";
    return 2;
  } catch (const NoCatalogEntry& e) {
    std::cerr << "unimplemented: " << e.what() << "\n";
    return 2;
  } catch (const TooManyParameters& e) {
    std::cerr << "unimplemented: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "invariant failure: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
