#include <doctest.h>

#include "flagein/einstein.hpp"
#include "flagein/errors.hpp"

using namespace flagein;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd x(v.size());
  int i = 0;
  for (double a : v) x[i++] = a;
  return x;
}

// index of a numeric solution homothetic to c, or -1
int find(const std::vector<EinsteinSolution>& sols, const MetricSpace& ms, const Eigen::VectorXd& c, double tol) {
  for (int i = 0; i < int(sols.size()); ++i)
    if (homothety_distance(ms, sols[i].metric.coeffs, c) < tol) return i;
  return -1;
}

}  // namespace

TEST_CASE("Einstein counts of the classification table") {
  // exact rows: flag, count, normal metric Einstein
  const std::tuple<const char*, int, bool> rows[] = {
      {"A:3:[2,2]:-", 1, true},    {"B:3:[1,2]:+", 1, false},  {"B:4:[1,3]:+", 1, false},  {"B:3:[3]:-", 2, false},
      {"B:5:[5]:-", 2, false},     {"C:3:[3]:-", 0, false},    {"C:4:[4]:-", 0, false},    {"C:3:[1,2]:+", 1, false},
      {"C:4:[1,3]:+", 1, false},   {"D:4:[4]:-", 1, true},     {"A:3:[2,1,1]:-", 5, false}, {"B:4:[4]:-", 2, true},
      {"D:4:[3,1]:-", 5, true},    {"D:5:[4,1]:-", 6, false},
  };
  for (auto [flag, count, normal] : rows) {
    CAPTURE(flag);
    const auto r = table1_row(parse_flag_spec(flag));
    CHECK(r.count == count);
    CHECK(r.normal_is_einstein == normal);
    CHECK(r.match);
    CHECK(r.max_residual < 1e-9);
  }
}

TEST_CASE("non-diagonal metrics on SO(4)/S(O(2)xO(1)xO(1))") {
  const auto spec = parse_flag_spec("A:3:[2,1,1]:-");
  const auto ms = shared_metric_space(spec);
  const auto sols = numeric_solutions(spec);
  REQUIRE(sols.size() == 5);
  // (mu_32, mu_21, mu_31, b) up to scale
  const double q = 1.0 / 3;
  for (const auto& c : {vec({4 * q, 1, 1, 0}), vec({2 * q, q, 1, q}), vec({2, 3, 1, 1}), vec({2 * q, q, 1, -q}),
                        vec({2, 3, 1, -1})})
    CHECK(find(sols, *ms, c, 1e-7) >= 0);
}

TEST_CASE("closed-form branches at l = 3, 5") {
  for (int l : {3, 5}) {
    const auto spec = make_flag(Family::B, l, {l}, false);
    const auto ms = shared_metric_space(spec);
    const auto sols = numeric_solutions(spec);
    REQUIRE(sols.size() == 2);
    // (V_1, U_1) = (gamma/2, gamma) and (l gamma/(2l-4), gamma)
    CHECK(find(sols, *ms, vec({0.5, 1}), 1e-7) >= 0);
    CHECK(find(sols, *ms, vec({double(l) / (2 * l - 4), 1}), 1e-7) >= 0);
  }
}

TEST_CASE("three-block counts and companion cross-check") {
  const std::tuple<int, int, int> cases[] = {{1, 3, 2}, {3, 3, 4}, {20, 3, 2}};
  for (auto [l1, m, want] : cases) {
    const auto spec = make_flag(Family::A, l1 + 2 * m - 1, {l1, m, m}, false);
    CAPTURE(spec.to_string());
    const auto ms = shared_metric_space(spec);
    const auto cf = closed_form_solutions(spec);
    const auto comp = three_block_companion(spec);
    CHECK(int(cf.size()) == want);
    CHECK(int(comp.size()) == want);
    for (const auto& c : comp) CHECK(find(cf, *ms, c, 1e-8) >= 0);
  }
  // m = 2 is outside the closed-form family; the companion still applies
  const auto spec = parse_flag_spec("A:4:[1,2,2]:-");
  const auto sols = numeric_solutions(spec);
  const auto comp = three_block_companion(spec);
  CHECK(sols.size() == 2);
  REQUIRE(comp.size() == sols.size());
  for (const auto& c : comp) CHECK(find(sols, *shared_metric_space(spec), c, 1e-8) >= 0);
}

TEST_CASE("homothety deduplication") {
  const auto ms = shared_metric_space(parse_flag_spec("A:4:[1,2,2]:-"));
  auto mk = [&](Eigen::VectorXd c) { return make_solution(ms, c, Provenance::NumericRoot, "numeric"); };
  CHECK(dedup_homothety({mk(vec({1, 2, 2})), mk(vec({2, 4, 4}))}).size() == 1);
  CHECK(dedup_homothety({mk(vec({1, 2, 2})), mk(vec({1 + 1e-9, 2, 2}))}).size() == 1);
  CHECK(dedup_homothety({mk(vec({1, 2, 2})), mk(vec({1, 2, 3}))}).size() == 2);
  // E2 and E3 are isometric but not homothetic: both stay
  const auto a = shared_metric_space(parse_flag_spec("A:3:[2,1,1]:-"));
  const double q = 1.0 / 3;
  const auto e2 = make_solution(a, vec({2 * q, q, 1, q}), Provenance::ClosedForm, "E2");
  const auto e3 = make_solution(a, vec({2, 3, 1, 1}), Provenance::ClosedForm, "E3");
  CHECK(dedup_homothety({e2, e3}).size() == 2);
  CHECK(homothety_distance(*a, e2.metric.coeffs, 5 * e2.metric.coeffs) < 1e-12);
}

TEST_CASE("Einstein metrics are critical points of the normalized scalar curvature") {
  for (const char* flag : {"A:3:[2,1,1]:-", "B:4:[4]:-", "D:5:[4,1]:-", "A:6:[1,3,3]:-"}) {
    CAPTURE(flag);
    const auto spec = parse_flag_spec(flag);
    const auto ms = shared_metric_space(spec);
    const ReducedRicci rr(ms);
    for (const auto& s : closed_form_solutions(spec)) {
      CHECK(normalized_scalar_gradient(rr, s.metric.coeffs).norm() < 1e-5);
      Eigen::VectorXd off = s.metric.coeffs;
      off[0] *= 1.25;
      CHECK(normalized_scalar_gradient(rr, off).norm() > 1e-2);
    }
  }
}

TEST_CASE("equivalence screening") {
  const auto b3 = solve(parse_flag_spec("B:3:[3]:-"), SolveMode::Both);
  REQUIRE(b3.solutions.size() == 2);
  CHECK(pair_status(b3, 0, 1) == GroupStatus::ProvenDistinct);

  const auto a3 = solve(parse_flag_spec("A:3:[2,1,1]:-"), SolveMode::Both);
  REQUIRE(a3.groups.size() == 2);
  CHECK(a3.groups[0].status == GroupStatus::ProvenDistinct);
  CHECK(a3.groups[1].status == GroupStatus::WitnessedEquivalent);
  CHECK(a3.groups[1].members.size() == 4);

  const auto d5 = solve(parse_flag_spec("D:5:[4,1]:-"), SolveMode::Both);
  REQUIRE(d5.groups.size() == 2);
  for (const auto& g : d5.groups) CHECK(g.status == GroupStatus::WitnessedEquivalent);
  CHECK(d5.groups[0].c_hat != doctest::Approx(d5.groups[1].c_hat).epsilon(1e-6));

  // the two metrics differ by exchanging the equal blocks
  const auto a4 = solve(parse_flag_spec("A:4:[1,2,2]:-"), SolveMode::Numeric);
  REQUIRE(a4.groups.size() == 1);
  CHECK(a4.groups[0].status == GroupStatus::WitnessedEquivalent);
  CHECK(a4.groups[0].witnesses == std::vector<std::string>{"swap23:0->1"});
}

TEST_CASE("witness maps preserve m") {
  for (const char* flag : {"A:3:[2,1,1]:-", "A:3:[1,2,1]:-", "D:5:[4,1]:-", "A:5:[2,2,2]:-"}) {
    const auto spec = parse_flag_spec(flag);
    const auto tm = shared_metric_space(spec)->tangent;
    for (const auto& w : witness_maps(spec)) {
      const Eigen::MatrixXd r = adjoint_map(*tm, *tm, w.s);
      CHECK((r.transpose() * r - Eigen::MatrixXd::Identity(tm->n, tm->n)).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("solve modes") {
  const auto spec = parse_flag_spec("D:4:[3,1]:-");
  const auto a = solve(spec, SolveMode::ClosedForm), b = solve(spec, SolveMode::Numeric);
  CHECK(a.solutions.size() == 5);
  CHECK(b.solutions.size() == 5);
  CHECK(a.catalog == "closed-form");
  CHECK_THROWS_AS(solve(parse_flag_spec("B:5:[2,3]:+"), SolveMode::ClosedForm), NoCatalogEntry);
  CHECK(solve(parse_flag_spec("B:5:[2,3]:+"), SolveMode::Both).catalog == "bound-only");
  CHECK(solve(parse_flag_spec("A:4:[1,2,2]:-"), SolveMode::Both).catalog == "undecided");
  CHECK(solve(parse_flag_spec("C:4:[4]:-"), SolveMode::Both).solutions.empty());
}

TEST_CASE("numeric solver is deterministic") {
  const auto spec = parse_flag_spec("D:5:[4,1]:-");
  const auto a = numeric_solutions(spec), b = numeric_solutions(spec);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK((a[i].metric.coeffs - b[i].metric.coeffs).norm() == 0);
  NumericOptions serial;
  serial.parallel = false;
  const auto c = numeric_solutions(spec, serial);
  REQUIRE(c.size() == a.size());
  for (size_t i = 0; i < a.size(); ++i) CHECK((a[i].metric.coeffs - c[i].metric.coeffs).norm() == 0);
}
