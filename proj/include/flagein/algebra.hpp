#pragma once

#include <Eigen/Dense>
#include <array>
#include <string>
#include <vector>

namespace flagein {

enum class Family { A, B, C, D };

char family_char(Family f);
Family family_from_char(char c);

// One entry of a sparse ambient matrix.
struct Entry {
  int row;
  int col;
  double value;
};

enum class BasisKind { W, U, V };

struct BasisElement {
  BasisKind kind;
  int i;  // 1-based; for v(k) and u(k,k) only i is meaningful (j == i for u(k,k))
  int j;
  std::vector<Entry> entries;  // nonzero entries of the ambient matrix
  // root in lambda-coordinates (length rank+1 for A, rank otherwise)
  std::vector<int> root;

  std::string label() const;
  std::string root_label() const;
};

using AlgebraElement = Eigen::VectorXd;

// [e_a, e_b] = sum value * e_c
struct StructureConstant {
  int a;
  int b;
  int c;
  double value;
};

class AlgebraModel {
 public:
  Family family() const { return family_; }
  int rank() const { return rank_; }
  int ambient_dim() const { return ambient_dim_; }
  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<BasisElement>& basis() const { return basis_; }
  const Eigen::MatrixXd& gram() const { return gram_; }
  const Eigen::MatrixXd& killing_matrix() const { return killing_; }
  // all nonzero constants with a < b
  const std::vector<StructureConstant>& structure() const { return structure_; }

  int index_of(BasisKind kind, int i, int j = 0) const;

  Eigen::MatrixXd matrix(int index) const;
  Eigen::MatrixXd matrix(const AlgebraElement& x) const;
  // coefficients of a skew matrix in the basis; throws ClosureViolation if the residual exceeds tol
  AlgebraElement expand(const Eigen::MatrixXd& m, double tol = 1e-12) const;
  AlgebraElement unit(int index) const;

  AlgebraElement bracket(const AlgebraElement& x, const AlgebraElement& y) const;
  // the family-specific fixed product, evaluated from the ambient block structure
  double ambient_inner(const AlgebraElement& x, const AlgebraElement& y) const;
  double ambient_inner_matrices(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) const;
  double killing(const AlgebraElement& x, const AlgebraElement& y) const;
  // sparse ad(e_a) as a list of (target c, source b, value): [e_a, e_b] = value e_c
  const std::vector<std::vector<std::array<double, 3>>>& ad_table() const { return ad_; }

  friend AlgebraModel build_algebra(Family family, int rank);

 private:
  Family family_{};
  int rank_ = 0;
  int ambient_dim_ = 0;
  double trace_scale_ = 0;  // product = -trace_scale * tr(XY)
  std::vector<BasisElement> basis_;
  Eigen::MatrixXd gram_;
  Eigen::MatrixXd killing_;
  std::vector<StructureConstant> structure_;
  std::vector<std::vector<std::array<double, 3>>> ad_;
  std::vector<std::vector<std::pair<int, double>>> position_index_;  // ambient (r,c) -> (basis, value)
};

AlgebraModel build_algebra(Family family, int rank);

}  // namespace flagein
