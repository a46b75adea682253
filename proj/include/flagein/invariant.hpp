#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <memory>
#include <string>
#include <vector>

#include "flagein/flag.hpp"

namespace flagein {

// Nonzero entry of the projected structure tensor ([f_p, f_q]_m, f_r), p < q.
struct TangentBracket {
  int p;
  int q;
  int r;
  double value;
};

// m_Theta in the ambient-orthonormal basis f_p = e_{t_p} / |e_{t_p}|.
struct TangentModel {
  FlagSpec spec;
  Decomposition dec;
  int n = 0;
  Eigen::VectorXd norms;  // |e_{t_p}| in the ambient product
  std::vector<TangentBracket> brackets;
  Eigen::MatrixXd killing;              // Killing form of k on m, f-basis
  std::vector<Eigen::SparseMatrix<double>> ad_iso;  // ad(e_a)|_m for each isotropy basis element, f-basis
  std::vector<Eigen::MatrixXd> discrete;  // Ad(k)|_m for the component generators

  // f-coordinates of a decomposition span vector
  Eigen::VectorXd from_span(const Eigen::VectorXd& span_coeffs) const;
  // algebra coordinates of an f-coordinate vector
  Eigen::VectorXd to_algebra(const Eigen::VectorXd& f) const;
  // f-coordinates of [x, y]_m for f-coordinate vectors
  Eigen::VectorXd bracket_m(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
};

std::shared_ptr<const TangentModel> tangent_model(const FlagSpec& spec, const Decomposition& dec,
                                                  const std::vector<Eigen::MatrixXd>& generators);

enum class CoeffKind { Scale, Amplitude };

struct MetricSpace {
  std::shared_ptr<const TangentModel> tangent;
  // symmetric operators on m in the f-basis; scales first (one per submodule), then amplitudes
  std::vector<Eigen::MatrixXd> operator_basis;
  std::vector<CoeffKind> kinds;
  std::vector<std::string> coeff_names;
  // for a Scale: {module, module}; for an Amplitude: {module i, module j} with T: W_i -> W_j
  std::vector<std::pair<int, int>> coeff_modules;
  // orthonormal f-basis adapted to the submodules; columns of module k are offsets[k]..offsets[k]+dim-1,
  // and paired modules are matched by the intertwiner
  Eigen::MatrixXd adapted;
  std::vector<int> offsets;

  int dim() const { return static_cast<int>(operator_basis.size()); }
  const FlagSpec& spec() const { return tangent->spec; }
  const Decomposition& decomposition() const { return tangent->dec; }
  int scale_index(int module) const;
};

// Raw commutant: symmetric operators commuting with ad(k_Theta)|_m and the discrete generators.
// Frobenius-orthonormal basis.
std::vector<Eigen::MatrixXd> commutant(const TangentModel& tm);
// Reference version: one SVD over all of Sym(m); only for small m.
std::vector<Eigen::MatrixXd> commutant_exact(const TangentModel& tm);

MetricSpace invariant_metric_space(const FlagSpec& spec, const Decomposition& dec,
                                   const std::vector<Eigen::MatrixXd>& discrete_generators);
MetricSpace invariant_metric_space(const FlagSpec& spec);

struct InvariantMetric {
  std::shared_ptr<const MetricSpace> space;
  Eigen::VectorXd coeffs;

  Eigen::MatrixXd op() const;  // operator in the f-basis
};

InvariantMetric make_metric(std::shared_ptr<const MetricSpace> space, const Eigen::VectorXd& coeffs);
InvariantMetric normal_metric(std::shared_ptr<const MetricSpace> space);
// smallest eigenvalue of the realized operator
double smallest_eigenvalue(const MetricSpace& space, const Eigen::VectorXd& coeffs);

struct Frame {
  Eigen::MatrixXd f;          // columns: frame vectors in f-coordinates
  Eigen::VectorXd eigenvalues;
  std::vector<int> module;    // module (first of its class) each vector belongs to
  double inner_scale = 1;
  std::shared_ptr<const TangentModel> tangent;

  int size() const { return static_cast<int>(f.cols()); }
  // frame vector i as algebra coordinates
  Eigen::VectorXd vector(int i) const;
};

Frame orthonormal_frame(const InvariantMetric& metric);
// Frame from a plain eigendecomposition of the operator; any g-orthonormal frame works for curvature
Frame eigen_frame(const InvariantMetric& metric);

// g(x, y) for f-coordinate vectors
double metric_inner(const InvariantMetric& metric, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

}  // namespace flagein
