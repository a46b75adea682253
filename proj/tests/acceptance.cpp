// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "flagein/checks.hpp"
#include "flagein/einstein.hpp"

using namespace flagein;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream why;
  void fail(const std::string& s) {
    if (pass) why << s;
    pass = false;
  }
};

Eigen::VectorXd coeffs_by_name(const MetricSpace& ms, const std::map<std::string, double>& v) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(ms.dim());
  for (int i = 0; i < ms.dim(); ++i) {
    auto it = v.find(ms.coeff_names[i]);
    if (it == v.end()) throw std::runtime_error("no value for " + ms.coeff_names[i]);
    c[i] = it->second;
  }
  return c;
}

double residual_of(const std::string& flag, const std::map<std::string, double>& v) {
  auto ms = shared_metric_space(parse_flag_spec(flag));
  return einstein_defect(make_metric(ms, coeffs_by_name(*ms, v))).residual;
}

double rel_gap(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
}

Outcome criterion1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  int rows = 0;
  double worst = 0;
  for (const auto& inst : acceptance_instances()) {
    const auto r = table1_row(inst);
    ++rows;
    worst = std::max(worst, r.max_residual);
    if (!r.match) o.fail(r.flag + " count " + std::to_string(r.count) + " expected " + r.expected + "; ");
    if (r.max_residual >= 1e-9) o.fail(r.flag + " residual too large; ");
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= 300) o.fail("runtime " + std::to_string(secs) + " s; ");
  char buf[160];
  std::snprintf(buf, sizeof buf, "%d rows, max residual %.2e, %.1f s", rows, worst, secs);
  if (o.pass) o.why << buf;
  return o;
}

Outcome criterion2() {
  Outcome o;
  const std::vector<std::array<int, 3>> cases = {{1, 3, 2}, {3, 3, 4}, {4, 5, 3}, {20, 3, 2}};
  double worst = 0;
  for (auto [l1, m, want] : cases) {
    const int l = l1 + 2 * m - 1;
    const FlagSpec spec = make_flag(Family::A, l, {l1, m, m}, false);
    const auto cf = closed_form_solutions(spec);
    const auto nu = numeric_solutions(spec);
    if (int(cf.size()) != want || int(nu.size()) != want) {
      o.fail(spec.to_string() + " closed-form " + std::to_string(cf.size()) + " numeric " +
             std::to_string(nu.size()) + " expected " + std::to_string(want) + "; ");
      continue;
    }
    for (const auto& c : cf) {
      double best = 1e300;
      for (const auto& n : nu) best = std::min(best, rel_gap(c.metric.coeffs, n.metric.coeffs));
      worst = std::max(worst, best);
      if (best >= 1e-7) o.fail(spec.to_string() + " " + c.rule_id + " has no numeric partner; ");
    }
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "counts 2,4,3,2; worst coefficient gap %.2e", worst);
  if (o.pass) o.why << buf;
  return o;
}

Outcome criterion3() {
  Outcome o;
  double worst = 0;
  auto check = [&](const std::string& label, const std::string& flag, const std::map<std::string, double>& v) {
    const double r = residual_of(flag, v);
    worst = std::max(worst, r);
    if (!(r < 1e-9)) o.fail(label + " on " + flag + " residual " + std::to_string(r) + "; ");
  };
  for (int l : {3, 5}) {
    const std::string f = "B:" + std::to_string(l) + ":[" + std::to_string(l) + "]:-";
    check("mu=gamma/2", f, {{"a:V_1", 0.5}, {"a:U_1", 1}});
    check("mu=l/(2l-4) gamma", f, {{"a:V_1", double(l) / (2 * l - 4)}, {"a:U_1", 1}});
  }
  for (int l : {3, 4, 5}) {
    const std::string f = "C:" + std::to_string(l) + ":[1," + std::to_string(l - 1) + "]:+";
    check("mu0=2mu21", f, {{"a:V_1", 2}, {"a:M_21", 1}});
  }
  check("mu=gamma/2", "B:4:[4]:-", {{"a:V_1", 0.5}, {"a:T_1", 1}, {"a:T_2", 1}});
  check("mu=gamma", "B:4:[4]:-", {{"a:V_1", 1}, {"a:T_1", 1}, {"a:T_2", 1}});
  {
    const int l = 5;
    const double d = std::sqrt(double(l * l - 5 * l + 4)) / (2.0 * (l - 1));
    check("F1", "D:5:[4,1]:-", {{"a:U_1", 1}, {"a:W_21", 1 - d}, {"a:U_21", 1 + d}, {"b:W_21~U_21", 0}});
    check("F1'", "D:5:[4,1]:-", {{"a:U_1", 1}, {"a:W_21", 1 + d}, {"a:U_21", 1 - d}, {"b:W_21~U_21", 0}});
  }
  char buf[80];
  std::snprintf(buf, sizeof buf, "11 golden metrics, max residual %.2e", worst);
  if (o.pass) o.why << buf;
  return o;
}

Outcome criterion4() {
  Outcome o;
  auto a3 = shared_metric_space(parse_flag_spec("A:3:[2,2]:-"));
  const double r = einstein_defect(make_metric(a3, Eigen::Vector2d(1, 2))).residual;
  if (!(r >= 0.1)) o.fail("A:3:[2,2]:- residual " + std::to_string(r) + " at (1,2); ");

  const FlagSpec u3 = parse_flag_spec("C:3:[3]:-");
  auto ms = shared_metric_space(u3);
  const Eigen::MatrixXd R = ricci_bilinear(ricci_form(normal_metric(ms)));
  double z_max = 0, y_dev = 0;
  int y_count = 0;
  for (const auto& sm : ms->tangent->dec.submodules)
    for (const auto& v : sm.span) {
      const Eigen::VectorXd x = ms->tangent->from_span(v);
      const double ric = x.dot(R * x);
      if (sm.name == "V_1") z_max = std::max(z_max, std::abs(ric));
      // off-diagonal u_ij: a single raw basis element
      if (sm.name == "U_1" && (v.array() != 0).count() == 1) {
        y_dev = std::max(y_dev, std::abs(ric - 2.0 * u3.rank()));
        ++y_count;
      }
    }
  if (!(z_max < 1e-10)) o.fail("Ric(Z_1,Z_1) = " + std::to_string(z_max) + "; ");
  if (y_count == 0 || !(y_dev < 1e-10)) o.fail("Ric(u_21,u_21) off 6 by " + std::to_string(y_dev) + "; ");
  const auto sols = numeric_solutions(u3);
  if (!sols.empty()) o.fail("U(3)/O(3) has " + std::to_string(sols.size()) + " numeric solutions; ");
  char buf[160];
  std::snprintf(buf, sizeof buf, "residual %.3f at (1,2); |Ric(Z_1,Z_1)| %.1e; |Ric(u_21,u_21)-6| %.1e; 0 solutions", r,
                z_max, y_dev);
  if (o.pass) o.why << buf;
  return o;
}

int index_of(const SolutionSet& set, const std::string& rule) {
  for (int i = 0; i < int(set.solutions.size()); ++i)
    if (set.solutions[i].rule_id == rule) return i;
  return -1;
}

Outcome criterion5() {
  Outcome o;
  const auto b3 = solve(parse_flag_spec("B:3:[3]:-"), SolveMode::Both);
  double gap = 0;
  if (b3.solutions.size() != 2) {
    o.fail("B:3:[3]:- has " + std::to_string(b3.solutions.size()) + " solutions; ");
  } else {
    const double c0 = b3.solutions[0].defect.normalized_constant, c1 = b3.solutions[1].defect.normalized_constant;
    gap = std::abs(c0 - c1) / std::max(std::abs(c0), std::abs(c1));
    if (!(gap > 1e-3)) o.fail("c-hat gap " + std::to_string(gap) + "; ");
  }

  const auto a3 = solve(parse_flag_spec("A:3:[2,1,1]:-"), SolveMode::Both);
  const int e2 = index_of(a3, "E2");
  if (e2 < 0) {
    o.fail("E2 missing; ");
  } else {
    const auto& g = a3.groups[a3.group_of(e2)];
    if (g.status != GroupStatus::WitnessedEquivalent) o.fail("E2 group not witnessed; ");
    for (const char* id : {"E3", "E4", "E5"}) {
      const int k = index_of(a3, id);
      if (k < 0 || a3.group_of(k) != a3.group_of(e2)) o.fail(std::string(id) + " not with E2; ");
    }
  }

  const auto d5 = solve(parse_flag_spec("D:5:[4,1]:-"), SolveMode::Both);
  const int f1 = index_of(d5, "F1"), f3 = index_of(d5, "F3");
  if (f1 < 0 || f3 < 0 || pair_status(d5, f1, f3) != GroupStatus::ProvenDistinct) o.fail("F1, F3 not proven distinct; ");
  char buf[120];
  std::snprintf(buf, sizeof buf, "c-hat gap %.3e; E2-E5 witnessed; F1/F3 proven distinct", gap);
  if (o.pass) o.why << buf;
  return o;
}

Outcome criterion6() {
  Outcome o;
  int total = 0;
  for (const auto& inst : acceptance_instances())
    for (const auto& c : run_checks(inst.spec)) {
      ++total;
      if (!c.pass) o.fail(inst.spec.to_string() + " " + c.name + ": " + c.detail + "; ");
    }
  if (o.pass) o.why << total << " checks green";
  return o;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const char* title, Outcome (*f)()) {
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o.fail(std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << n << " (" << title << "): " << o.why.str() << "\n";
    std::cout.flush();
    failed += !o.pass;
  };
  report(1, "table reproduction", criterion1);
  report(2, "three-block counts", criterion2);
  report(3, "closed-form golden values", criterion3);
  report(4, "non-Einstein certification", criterion4);
  report(5, "equivalence screening", criterion5);
  report(6, "property suite", criterion6);
  return failed ? 1 : 0;
}
