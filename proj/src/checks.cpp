#include "flagein/checks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "flagein/errors.hpp"

namespace flagein {

namespace {

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(3);
  o << std::scientific << v;
  return o.str();
}

CheckResult below(const std::string& name, double value, double tol) {
  return {name, value < tol, "max deviation " + fmt(value) + " (tol " + fmt(tol) + ")"};
}

Eigen::VectorXd random_coeffs(const MetricSpace& ms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> scale(0.5, 2.0), amp(-0.45, 0.45);
  Eigen::VectorXd c(ms.dim());
  for (int i = 0; i < ms.dim(); ++i)
    if (ms.kinds[i] == CoeffKind::Scale) c[i] = scale(rng);
  for (int i = 0; i < ms.dim(); ++i) {
    if (ms.kinds[i] == CoeffKind::Scale) continue;
    auto [m1, m2] = ms.coeff_modules[i];
    c[i] = amp(rng) * std::sqrt(c[ms.scale_index(m1)] * c[ms.scale_index(m2)]);
  }
  return c;
}

Eigen::VectorXd random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

}  // namespace

std::vector<CheckResult> property_checks(const FlagSpec& spec) {
  std::vector<CheckResult> out;
  std::mt19937_64 rng(7);
  const auto& alg = *spec.algebra;
  auto ms = shared_metric_space(spec);
  const auto& tm = *ms->tangent;
  const auto& dec = tm.dec;

  {
    double dev = 0;
    for (int t = 0; t < 20; ++t) {
      const auto x = random_vector(alg.dim(), rng), y = random_vector(alg.dim(), rng), z = random_vector(alg.dim(), rng);
      dev = std::max(dev, std::abs(alg.ambient_inner(alg.bracket(x, y), z) + alg.ambient_inner(y, alg.bracket(x, z))));
      dev = std::max(dev, std::abs(alg.killing(alg.bracket(x, y), z) + alg.killing(y, alg.bracket(x, z))) /
                              std::max(1.0, alg.killing_matrix().cwiseAbs().maxCoeff()));
    }
    out.push_back(below("ad_invariance", dev, 1e-9));
  }
  {
    double dev = 0;
    for (int t = 0; t < 20; ++t) {
      const auto x = random_vector(alg.dim(), rng), y = random_vector(alg.dim(), rng), z = random_vector(alg.dim(), rng);
      const Eigen::VectorXd j = alg.bracket(x, alg.bracket(y, z)) + alg.bracket(y, alg.bracket(z, x)) +
                                alg.bracket(z, alg.bracket(x, y));
      dev = std::max(dev, j.cwiseAbs().maxCoeff());
    }
    out.push_back(below("jacobi", dev, 1e-9));
  }
  {
    std::vector<int> role(alg.dim(), 0);
    for (int a : dec.isotropy) role[a] = 1;
    for (int b : dec.tangent) role[b] = 2;
    int bad = 0;
    for (const auto& s : alg.structure()) {
      const int ra = role[s.a], rb = role[s.b], rc = role[s.c];
      if (ra == 1 && rb == 1 && rc != 1) ++bad;                 // [k_T, k_T] in k_T
      if (ra + rb == 3 && rc != 2) ++bad;                       // [k_T, m_T] in m_T
    }
    const bool cover = static_cast<int>(dec.isotropy.size() + dec.tangent.size()) == alg.dim();
    out.push_back({"reductivity", bad == 0 && cover, std::to_string(bad) + " brackets leave their subspace"});
  }
  {
    double dev = 0;
    for (size_t k = 0; k < dec.submodules.size(); ++k) {
      const int d = dec.submodules[k].dim();
      const Eigen::MatrixXd q = ms->adapted.middleCols(ms->offsets[k], d);
      const Eigen::MatrixXd p = q * q.transpose();
      for (const auto& x : tm.ad_iso) dev = std::max(dev, (Eigen::MatrixXd(x) * p - p * Eigen::MatrixXd(x)).norm());
      for (const auto& g : tm.discrete) dev = std::max(dev, (g * p - p * g).norm());
    }
    out.push_back(below("submodule_invariance", dev, 1e-9));
  }
  {
    const auto com = commutant(tm);
    int npairs = 0;
    for (const auto& c : dec.equiv_classes) npairs += static_cast<int>(c.size() * (c.size() - 1) / 2);
    const int expected = static_cast<int>(dec.submodules.size()) + npairs;
    bool ok = static_cast<int>(com.size()) == expected && ms->dim() == expected;
    std::string detail = "commutant " + std::to_string(com.size()) + ", expected " + std::to_string(expected);
    if (tm.n <= 40) {
      const auto ex = commutant_exact(tm);
      ok = ok && ex.size() == com.size();
      detail += ", exact " + std::to_string(ex.size());
    }
    out.push_back({"commutant_dimension", ok, detail});
  }

  const Eigen::VectorXd coeffs = random_coeffs(*ms, rng);
  const auto metric = make_metric(ms, coeffs);
  const auto frame = orthonormal_frame(metric);
  {
    double dev = 0;
    for (int i = 0; i < frame.size(); ++i)
      for (int j = 0; j < frame.size(); ++j)
        dev = std::max(dev, std::abs(metric_inner(metric, frame.f.col(i), frame.f.col(j)) - (i == j ? 1.0 : 0.0)));
    out.push_back(below("frame_orthonormality", dev, 1e-10));
  }
  const auto ric = ricci_form(metric, frame, true);
  const Eigen::MatrixXd rb = ricci_bilinear(ric);
  const double scale = std::max(1.0, rb.cwiseAbs().maxCoeff());
  out.push_back(below("ricci_symmetry", (ric.matrix - ric.matrix.transpose()).cwiseAbs().maxCoeff() / scale, 1e-10));
  {
    double dev = 0;
    for (const auto& x : tm.ad_iso) dev = std::max(dev, (rb * Eigen::MatrixXd(x) - Eigen::MatrixXd(x) * rb).norm());
    for (const auto& g : tm.discrete) dev = std::max(dev, (g.transpose() * rb * g - rb).norm());
    out.push_back(below("ricci_equivariance", dev / scale, 1e-9));
  }
  {
    const auto other = ricci_form(metric, eigen_frame(metric), true);
    out.push_back(below("ricci_frame_independence", (ricci_bilinear(other) - rb).cwiseAbs().maxCoeff() / scale, 1e-9));
  }
  {
    const auto serial = ricci_form(metric, frame, false);
    out.push_back(below("parallel_matches_serial", (serial.matrix - ric.matrix).cwiseAbs().maxCoeff() / scale, 1e-10));
  }
  ReducedRicci rr(ms);
  {
    const Eigen::VectorXd rho = rr.rho(coeffs);
    Eigen::MatrixXd rec = Eigen::MatrixXd::Zero(tm.n, tm.n);
    for (int i = 0; i < ms->dim(); ++i) rec += rho[i] * ms->operator_basis[i];
    out.push_back(below("reduced_matches_frame", (rec - rb).cwiseAbs().maxCoeff() / scale, 1e-9));
  }
  {
    const double s = scalar_curvature(metric, frame);
    const double dev = std::max(std::abs(s - ric.matrix.trace()), std::abs(s - rr.scalar(coeffs)));
    out.push_back(below("trace_identity", dev / std::max(1.0, std::abs(s)), 1e-10));
  }
  {
    const double t = 2.7;
    const auto scaled = make_metric(ms, t * coeffs);
    const double s1 = scalar_curvature(metric), s2 = scalar_curvature(scaled);
    const double c1 = einstein_defect(metric).normalized_constant, c2 = einstein_defect(scaled).normalized_constant;
    const double dev = std::max(std::abs(s2 - s1 / t) / std::max(1.0, std::abs(s1)),
                                std::abs(c2 - c1) / std::max(1.0, std::abs(c1)));
    out.push_back(below("scaling_laws", dev, 1e-10));
  }
  return out;
}

namespace {

bool is_pair_flag(const FlagSpec& s) {
  return s.family() == Family::A && s.rank() == 3 && s.blocks() == 3 &&
         std::count(s.partition.begin(), s.partition.end(), 2) == 1;
}

bool is_d_pair_flag(const FlagSpec& s) {
  return s.family() == Family::D && s.partition == std::vector<int>{s.rank() - 1, 1} && !s.includes_last_root;
}

}  // namespace

std::vector<CheckResult> solution_checks(const FlagSpec& spec) {
  std::vector<CheckResult> out;
  auto ms = shared_metric_space(spec);
  ReducedRicci rr(ms);
  const bool closed = has_closed_form(spec);
  const auto set = solve(spec, closed ? SolveMode::Both : SolveMode::Numeric);

  {
    double worst = 0, smallest = INFINITY;
    for (const auto& s : set.solutions) {
      worst = std::max(worst, s.defect.residual);
      smallest = std::min(smallest, smallest_eigenvalue(*ms, s.metric.coeffs));
    }
    out.push_back({"solutions_einstein_spd", worst < 1e-9 && (set.solutions.empty() || smallest > 0),
                   std::to_string(set.solutions.size()) + " solutions, max residual " + fmt(worst)});
  }
  {
    double at = 0, off = INFINITY;
    for (const auto& s : set.solutions) {
      at = std::max(at, normalized_scalar_gradient(rr, s.metric.coeffs).norm());
      if (ms->dim() < 2) continue;
      // push the first diagonal coefficient off the solution
      Eigen::VectorXd p = s.metric.coeffs;
      p[0] *= 1.25;
      off = std::min(off, normalized_scalar_gradient(rr, p).norm());
    }
    const bool ok = at < 1e-5 && (off == INFINITY || off > 1e-2);
    out.push_back({"critical_points", ok, "|grad| " + fmt(at) + " at solutions, >= " + fmt(off) + " off them"});
  }
  {
    double gap = INFINITY;
    for (size_t i = 0; i < set.solutions.size(); ++i)
      for (size_t j = i + 1; j < set.solutions.size(); ++j)
        gap = std::min(gap, homothety_distance(*ms, set.solutions[i].metric.coeffs, set.solutions[j].metric.coeffs));
    out.push_back({"no_homothetic_duplicates", gap > 1e-6, "closest pair " + fmt(gap)});
  }
  if (closed) {
    const auto cf = closed_form_solutions(spec);
    const auto num = numeric_solutions(spec);
    double worst = 0;
    for (const auto& c : cf) {
      double best = INFINITY;
      for (const auto& n : num) best = std::min(best, homothety_distance(*ms, c.metric.coeffs, n.metric.coeffs));
      worst = std::max(worst, best);
    }
    const bool ok = cf.size() == num.size() && worst < 1e-7;
    out.push_back({"catalog_agreement", ok,
                   std::to_string(cf.size()) + " closed-form, " + std::to_string(num.size()) + " numeric, max gap " + fmt(cf.empty() ? 0 : worst)});
  }
  if (is_pair_flag(spec) || is_d_pair_flag(spec)) {
    double dev = 0;
    for (const auto& s : set.solutions) {
      const auto& c = s.metric.coeffs;
      int amp = -1;
      for (int i = 0; i < ms->dim(); ++i)
        if (ms->kinds[i] == CoeffKind::Amplitude) amp = i;
      if (std::abs(c[amp]) < 1e-9) continue;
      auto [m1, m2] = ms->coeff_modules[amp];
      const int i1 = ms->scale_index(m1), i2 = ms->scale_index(m2);
      int i0 = -1;
      for (int i = 0; i < ms->dim(); ++i)
        if (ms->kinds[i] == CoeffKind::Scale && i != i1 && i != i2) i0 = i;
      Eigen::Matrix2d blk;
      blk << c[i1], c[amp], c[amp], c[i2];
      const Eigen::Vector2d xi = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(blk).eigenvalues();
      dev = std::max(dev, std::abs(2 * xi[0] * xi[1] - c[i0] * c[i0]));
      dev = std::max(dev, std::abs(xi[0] + xi[1] - 2 * std::sqrt(2 * xi[0] * xi[1])));
    }
    out.push_back(below("non_diagonal_conditions", dev, 1e-9));
  }
  const int l = spec.rank();
  const int n = static_cast<int>(set.solutions.size());
  if (spec.family() == Family::B && spec.blocks() == 2 && spec.includes_last_root && spec.partition[0] >= 2) {
    const int d = spec.partition[0];
    const double ineq = double(l) * l * (l - 2) * (l - 2) - 2.0 * (d - 1) * (d - 1) * (d - 2) * (2 * l - d);
    const bool ok = d == 2 ? n <= 3 : (n <= 4 && (n == 0 || ineq > 0));
    out.push_back({"count_bound", ok, std::to_string(n) + " solutions"});
  }
  if (spec.family() == Family::C && spec.blocks() == 2 && spec.includes_last_root && spec.partition[0] >= 2)
    out.push_back({"count_bound", n <= 2, std::to_string(n) + " solutions"});
  if (is_three_block_a(spec)) {
    out.push_back({"count_bound", n <= 4, std::to_string(n) + " solutions"});
    const auto comp = three_block_companion(spec);
    double worst = 0;
    for (const auto& x : comp) {
      double best = INFINITY;
      for (const auto& s : set.solutions) best = std::min(best, homothety_distance(*ms, x, s.metric.coeffs));
      worst = std::max(worst, best);
    }
    out.push_back({"companion_agreement", static_cast<int>(comp.size()) == n && worst < 1e-6,
                   std::to_string(comp.size()) + " companion roots, max gap " + fmt(comp.empty() ? 0 : worst)});
  }
  return out;
}

std::vector<CheckResult> run_checks(const FlagSpec& spec) {
  auto out = property_checks(spec);
  auto more = solution_checks(spec);
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

}  // namespace flagein
