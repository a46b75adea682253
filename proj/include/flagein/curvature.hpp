#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "flagein/invariant.hpp"

namespace flagein {

// C(i,j,k) = g([X_i, X_j]_m, X_k) over a frame, stored with k fastest.
struct FrameTensor {
  int n = 0;
  std::vector<double> c;
  double operator()(int i, int j, int k) const { return c[(static_cast<size_t>(i) * n + j) * n + k]; }
};

FrameTensor frame_tensor(const Frame& frame);           // OpenMP
FrameTensor frame_tensor_serial(const Frame& frame);    // reference

struct RicciForm {
  Eigen::MatrixXd matrix;  // Ric(X_i, X_j)
  Frame frame;
  Eigen::VectorXd z;       // frame components of Z = sum_i U(X_i, X_i)
};

RicciForm ricci_form(const InvariantMetric& metric, const Frame& frame, bool parallel = true);
RicciForm ricci_form(const InvariantMetric& metric);

// U(x, y) in f-coordinates, for f-coordinate vectors x, y
Eigen::VectorXd u_map(const InvariantMetric& metric, const Frame& frame, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y);

double scalar_curvature(const InvariantMetric& metric);
double scalar_curvature(const InvariantMetric& metric, const Frame& frame);

struct EinsteinDefect {
  double c_best = 0;
  double residual = 0;
  double normalized_constant = 0;
};

EinsteinDefect einstein_defect(const InvariantMetric& metric);
EinsteinDefect einstein_defect(const RicciForm& ric);

// Ricci as a bilinear form on m in the f-basis: Ric(x, y) = x^T R y
Eigen::MatrixXd ricci_bilinear(const RicciForm& ric);

// Coefficient-space Ricci evaluation. The Ricci bilinear form (f-basis) of the metric with
// coefficients a is sum_i rho_i(a) B_i over the operator basis B_i.
class ReducedRicci {
 public:
  explicit ReducedRicci(std::shared_ptr<const MetricSpace> space);

  Eigen::VectorXd rho(const Eigen::VectorXd& coeffs) const;
  double scalar(const Eigen::VectorXd& coeffs) const;
  double scalar(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& rho) const;
  // log det of the realized operator s*A on m
  double log_det(const Eigen::VectorXd& coeffs) const;
  const MetricSpace& space() const { return *space_; }

 private:
  struct Slot {
    int cls;
    int a;
    int b;
  };
  // small symmetric matrices of a commutant element, one per class
  std::vector<Eigen::MatrixXd> blocks(const Eigen::VectorXd& coeffs) const;
  std::vector<Eigen::MatrixXd> unit_blocks(int coeff) const;

  std::shared_ptr<const MetricSpace> space_;
  std::vector<std::vector<int>> classes_;  // modules per class, in metric order
  std::vector<int> class_dim_;
  std::vector<Slot> slots_;
  std::vector<int> class_offset_;               // first slot of each class
  std::vector<std::vector<int>> coeff_slots_;   // slots where B_i is 1
  std::vector<double> w_;  // slots^3
  Eigen::VectorXd killing_trace_;  // tr(kappa B_i)
  Eigen::VectorXd norm2_;          // tr(B_i^2)
};

}  // namespace flagein
