#include <doctest.h>

#include <random>

#include "flagein/einstein.hpp"
#include "flagein/errors.hpp"

using namespace flagein;

namespace {

// dimension of the space of invariant metrics: one scale per summand, plus
// dim Hom_K(W_i, W_j) = 1 for each equivalent pair
const std::pair<const char*, int> kParams[] = {
    {"A:3:[2,2]:-", 2}, {"B:3:[3]:-", 2},     {"C:4:[1,3]:+", 2},   {"A:5:[1,2,3]:-", 3},
    {"B:4:[4]:-", 3},   {"A:3:[2,1,1]:-", 4}, {"A:3:[1,2,1]:-", 4}, {"D:4:[3,1]:-", 4},
    {"D:5:[4,1]:-", 4}, {"D:6:[5,1]:-", 4},   {"B:5:[2,3]:+", 3},   {"C:5:[2,3]:+", 3},
};

}  // namespace

TEST_CASE("commutant dimension") {
  for (auto [flag, p] : kParams) {
    CAPTURE(flag);
    const auto ms = shared_metric_space(parse_flag_spec(flag));
    CHECK(ms->dim() == p);
    CHECK(int(commutant(*ms->tangent).size()) == p);
  }
}

TEST_CASE("exact commutant agrees with the randomized one") {
  for (const char* flag : {"A:3:[2,1,1]:-", "B:3:[3]:-", "D:4:[3,1]:-", "C:3:[1,2]:+"}) {
    const auto ms = shared_metric_space(parse_flag_spec(flag));
    CHECK(commutant_exact(*ms->tangent).size() == commutant(*ms->tangent).size());
  }
}

TEST_CASE("operator basis commutes with the isotropy action") {
  for (auto [flag, p] : kParams) {
    CAPTURE(flag);
    const auto ms = shared_metric_space(parse_flag_spec(flag));
    double worst = 0;
    for (const auto& B : ms->operator_basis) {
      worst = std::max(worst, (B - B.transpose()).cwiseAbs().maxCoeff());
      for (const auto& ad : ms->tangent->ad_iso) {
        const Eigen::MatrixXd a = Eigen::MatrixXd(ad);
        worst = std::max(worst, (a * B - B * a).cwiseAbs().maxCoeff());
      }
      for (const auto& d : ms->tangent->discrete) worst = std::max(worst, (d * B - B * d).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("coefficient names") {
  const auto a = shared_metric_space(parse_flag_spec("A:3:[2,1,1]:-"));
  CHECK(a->coeff_names == std::vector<std::string>{"a:M_32", "a:M_21", "a:M_31", "b:M_21~M_31"});
  const auto d = shared_metric_space(parse_flag_spec("D:5:[4,1]:-"));
  CHECK(d->coeff_names == std::vector<std::string>{"a:U_1", "a:W_21", "a:U_21", "b:W_21~U_21"});
}

TEST_CASE("normal metric is the identity and frames are orthonormal") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (auto [flag, p] : kParams) {
    CAPTURE(flag);
    const auto ms = shared_metric_space(parse_flag_spec(flag));
    const auto n = normal_metric(ms);
    CHECK((n.op() - Eigen::MatrixXd::Identity(ms->tangent->n, ms->tangent->n)).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::VectorXd c(p);
    for (int i = 0; i < p; ++i) c[i] = ms->kinds[i] == CoeffKind::Scale ? u(rng) + 1 : 0.2 * u(rng);
    const auto m = make_metric(ms, c);
    for (const auto& fr : {orthonormal_frame(m), eigen_frame(m)}) {
      Eigen::MatrixXd g(fr.size(), fr.size());
      for (int i = 0; i < fr.size(); ++i)
        for (int j = 0; j < fr.size(); ++j) g(i, j) = metric_inner(m, fr.f.col(i), fr.f.col(j));
      CHECK((g - Eigen::MatrixXd::Identity(fr.size(), fr.size())).cwiseAbs().maxCoeff() < 1e-10);
    }
  }
}

TEST_CASE("non positive definite coefficients are rejected") {
  const auto ms = shared_metric_space(parse_flag_spec("A:3:[2,1,1]:-"));
  Eigen::VectorXd c(4);
  c << 1, 1, 1, 2;  // b^2 > a_21 a_31
  CHECK(smallest_eigenvalue(*ms, c) < 0);
  CHECK_THROWS_AS(make_metric(ms, c), NotPositiveDefinite);
  c << 1, 1, -1, 0;
  CHECK_THROWS_AS(make_metric(ms, c), NotPositiveDefinite);
}
