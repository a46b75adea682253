#include <doctest.h>

#include <random>

#include "flagein/curvature.hpp"
#include "flagein/einstein.hpp"
#include "oracle.hpp"

using namespace flagein;

namespace {

const char* kFlags[] = {"A:3:[2,2]:-", "A:3:[2,1,1]:-", "A:4:[1,2,2]:-", "B:3:[3]:-", "B:3:[1,2]:+", "B:4:[4]:-",
                        "C:3:[3]:-",   "C:3:[1,2]:+",   "D:4:[3,1]:-",   "D:5:[4,1]:-", "B:5:[2,3]:+"};

Eigen::VectorXd random_coeffs(const MetricSpace& ms, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  Eigen::VectorXd c(ms.dim());
  for (int i = 0; i < ms.dim(); ++i) c[i] = ms.kinds[i] == CoeffKind::Scale ? 1 + u(rng) : 0.3 * (u(rng) - 1.25);
  return c;
}

}  // namespace

TEST_CASE("Ricci form against the dense oracle") {
  std::mt19937 rng(11);
  for (const char* flag : kFlags) {
    CAPTURE(flag);
    const auto spec = parse_flag_spec(flag);
    const auto ms = shared_metric_space(spec);
    const oracle::Dense d(spec);
    for (int t = 0; t < 2; ++t) {
      const auto m = make_metric(ms, random_coeffs(*ms, rng));
      const Eigen::MatrixXd R = ricci_bilinear(ricci_form(m));
      for (int k = 0; k < 3; ++k) {
        const Eigen::VectorXd x = Eigen::VectorXd::Random(ms->tangent->n);
        CHECK(x.dot(R * x) == doctest::Approx(oracle::ricci(d, m, x)).epsilon(1e-10));
      }
    }
  }
}

// normal-metric scalar curvatures, computed once with the dense oracle and frozen
TEST_CASE("frozen scalar curvature of normal metrics") {
  const std::pair<const char*, double> frozen[] = {{"A:3:[2,2]:-", 2},   {"A:4:[1,2,2]:-", 18}, {"B:3:[3]:-", 16.5},
                                                   {"C:3:[3]:-", 30},    {"C:4:[1,3]:+", 45},   {"D:4:[4]:-", 24},
                                                   {"D:5:[4,1]:-", 66}};
  for (auto [flag, s] : frozen) {
    CAPTURE(flag);
    const auto ms = shared_metric_space(parse_flag_spec(flag));
    CHECK(scalar_curvature(normal_metric(ms)) == doctest::Approx(s).epsilon(1e-12));
    CHECK(ReducedRicci(ms).scalar(normal_metric(ms).coeffs) == doctest::Approx(s).epsilon(1e-12));
  }
}

TEST_CASE("U(3)/O(3): Ric vanishes on the center and equals 2l on u_21") {
  const auto spec = parse_flag_spec("C:3:[3]:-");
  const auto ms = shared_metric_space(spec);
  const Eigen::MatrixXd R = ricci_bilinear(ricci_form(normal_metric(ms)));
  for (const auto& sm : ms->decomposition().submodules)
    for (const auto& v : sm.span) {
      const Eigen::VectorXd x = ms->tangent->from_span(v);
      if (sm.name == "V_1") CHECK(std::abs(x.dot(R * x)) < 1e-10);
      if (sm.name == "U_1" && (v.array() != 0).count() == 1) CHECK(x.dot(R * x) == doctest::Approx(6).epsilon(1e-12));
    }
}

TEST_CASE("parallel and serial frame tensors agree") {
  std::mt19937 rng(12);
  for (const char* flag : {"A:4:[1,2,2]:-", "D:5:[4,1]:-", "B:5:[2,3]:+"}) {
    const auto ms = shared_metric_space(parse_flag_spec(flag));
    const auto fr = orthonormal_frame(make_metric(ms, random_coeffs(*ms, rng)));
    const auto a = frame_tensor(fr), b = frame_tensor_serial(fr);
    REQUIRE(a.c.size() == b.c.size());
    double worst = 0;
    for (size_t i = 0; i < a.c.size(); ++i) worst = std::max(worst, std::abs(a.c[i] - b.c[i]));
    CHECK(worst < 1e-13);
  }
}

TEST_CASE("reduced Ricci matches the frame computation") {
  std::mt19937 rng(13);
  for (const char* flag : kFlags) {
    CAPTURE(flag);
    const auto ms = shared_metric_space(parse_flag_spec(flag));
    const ReducedRicci rr(ms);
    const Eigen::VectorXd c = random_coeffs(*ms, rng);
    const auto m = make_metric(ms, c);
    const auto ric = ricci_form(m);
    const Eigen::VectorXd rho = rr.rho(c);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(ms->tangent->n, ms->tangent->n);
    for (int i = 0; i < ms->dim(); ++i) sum += rho[i] * ms->operator_basis[i];
    CHECK((ricci_bilinear(ric) - sum).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(rr.scalar(c) == doctest::Approx(scalar_curvature(m)).epsilon(1e-11));
    CHECK(ric.z.norm() < 1e-10);
    // S = tr_g Ric
    CHECK(ric.matrix.trace() == doctest::Approx(scalar_curvature(m)).epsilon(1e-11));
  }
}

TEST_CASE("scaling laws") {
  std::mt19937 rng(14);
  for (const char* flag : kFlags) {
    CAPTURE(flag);
    const auto ms = shared_metric_space(parse_flag_spec(flag));
    const Eigen::VectorXd c = random_coeffs(*ms, rng);
    const double t = 2.7;
    const auto m = make_metric(ms, c), mt = make_metric(ms, t * c);
    CHECK(scalar_curvature(mt) == doctest::Approx(scalar_curvature(m) / t).epsilon(1e-11));
    CHECK(einstein_defect(mt).normalized_constant ==
          doctest::Approx(einstein_defect(m).normalized_constant).epsilon(1e-10));
    const ReducedRicci rr(ms);
    CHECK(rr.log_det(t * c) == doctest::Approx(rr.log_det(c) + ms->tangent->n * std::log(t)).epsilon(1e-12));
  }
}

TEST_CASE("Einstein defect of the normal metric") {
  // normal metric: Einstein on the first two, not on the third
  CHECK(einstein_defect(normal_metric(shared_metric_space(parse_flag_spec("A:3:[2,2]:-")))).residual < 1e-12);
  CHECK(einstein_defect(normal_metric(shared_metric_space(parse_flag_spec("D:4:[4]:-")))).residual < 1e-12);
  CHECK(einstein_defect(normal_metric(shared_metric_space(parse_flag_spec("B:3:[3]:-")))).residual > 0.1);
}
