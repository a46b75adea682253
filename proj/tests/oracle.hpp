#pragma once
// Dense-matrix Ricci oracle. Works from the ambient matrices only: brackets are matrix
// commutators, projections go through the Gram matrix of the fixed product, and
// Ric(X,X) = -1/2 sum |[X,X_i]_m|^2 - 1/2 B(X,X) + 1/4 sum g([X_i,X_j]_m, X)^2
// over a g-orthonormal frame (B the Killing form of the compact algebra).
#include <Eigen/Dense>
#include <vector>

#include "flagein/invariant.hpp"

namespace oracle {

struct Dense {
  const flagein::AlgebraModel* alg;
  std::vector<Eigen::MatrixXd> basis;  // full algebra
  Eigen::MatrixXd gram_inv;
  double scale;

  explicit Dense(const flagein::FlagSpec& spec) : alg(spec.algebra.get()), scale(spec.inner_scale) {
    const int n = alg->dim();
    for (int a = 0; a < n; ++a) basis.push_back(alg->matrix(a));
    Eigen::MatrixXd g(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) g(a, b) = alg->ambient_inner_matrices(basis[a], basis[b]);
    gram_inv = g.inverse();
  }
  Eigen::VectorXd coords(const Eigen::MatrixXd& m) const {
    Eigen::VectorXd r(basis.size());
    for (size_t a = 0; a < basis.size(); ++a) r[a] = alg->ambient_inner_matrices(m, basis[a]);
    return gram_inv * r;
  }
  // B(X,X) = tr(ad X ad X) on the whole algebra
  double killing(const Eigen::MatrixXd& x) const {
    double t = 0;
    for (size_t a = 0; a < basis.size(); ++a) {
      Eigen::MatrixXd y = x * basis[a] - basis[a] * x;
      t += coords(x * y - y * x)[a];
    }
    return t;
  }
};

// Ric(x, x) for an f-coordinate vector x under the metric
inline double ricci(const Dense& d, const flagein::InvariantMetric& metric, const Eigen::VectorXd& x) {
  const auto& tm = *metric.space->tangent;
  const Eigen::MatrixXd A = metric.op();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  const int n = tm.n;
  auto mat = [&](const Eigen::VectorXd& f) { return d.alg->matrix(tm.to_algebra(f)); };
  // m-projection: f-coordinates of a matrix (f-basis is orthonormal for the fixed product)
  std::vector<Eigen::MatrixXd> fm;
  for (int p = 0; p < n; ++p) fm.push_back(mat(Eigen::VectorXd::Unit(n, p)));
  auto proj = [&](const Eigen::MatrixXd& m) {
    Eigen::VectorXd r(n);
    for (int p = 0; p < n; ++p) r[p] = d.alg->ambient_inner_matrices(m, fm[p]);
    return r;
  };
  auto g = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) { return d.scale * u.dot(A * v); };
  std::vector<Eigen::MatrixXd> frame_m;
  std::vector<Eigen::VectorXd> frame;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd v = es.eigenvectors().col(i) / std::sqrt(d.scale * es.eigenvalues()[i]);
    frame.push_back(v);
    frame_m.push_back(mat(v));
  }
  const Eigen::MatrixXd X = mat(x);
  double t1 = 0, t3 = 0;
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd b = proj(X * frame_m[i] - frame_m[i] * X);
    t1 += g(b, b);
    for (int j = 0; j < n; ++j) {
      const double c = g(proj(frame_m[i] * frame_m[j] - frame_m[j] * frame_m[i]), x);
      t3 += c * c;
    }
  }
  return -0.5 * t1 - 0.5 * d.killing(X) + 0.25 * t3;
}

}  // namespace oracle
