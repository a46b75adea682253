#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flagein/curvature.hpp"

namespace flagein {

enum class Provenance { ClosedForm, NumericRoot };

struct EinsteinSolution {
  InvariantMetric metric;
  EinsteinDefect defect;
  Provenance provenance = Provenance::NumericRoot;
  std::string rule_id;  // branch label for catalog entries, "numeric" otherwise
  bool singular = false;  // Jacobian of the reduced system is (near) singular at the root
};

enum class GroupStatus { ProvenDistinct, WitnessedEquivalent, Undecided };

const char* to_string(GroupStatus s);
const char* to_string(Provenance p);

struct EquivalenceGroup {
  std::vector<int> members;  // indices into SolutionSet::solutions
  GroupStatus status = GroupStatus::Undecided;
  double c_hat = 0;
  std::vector<std::string> witnesses;  // "name:i->j"
};

struct SolutionSet {
  FlagSpec flag;
  std::shared_ptr<const MetricSpace> space;
  std::vector<EinsteinSolution> solutions;
  std::vector<EquivalenceGroup> groups;
  std::string catalog;  // "closed-form", "bound-only", "undecided"

  int group_of(int solution) const;
};

// Cached invariant metric spaces, shared by the solvers.
std::shared_ptr<const MetricSpace> shared_metric_space(const FlagSpec& spec);

// Index of the gauge coefficient (the last diagonal one).
int gauge_index(const MetricSpace& space);
// coefficients rescaled so the gauge coefficient is 1
Eigen::VectorXd normalize_gauge(const MetricSpace& space, const Eigen::VectorXd& coeffs);

EinsteinSolution make_solution(std::shared_ptr<const MetricSpace> space, const Eigen::VectorXd& coeffs,
                               Provenance provenance, std::string rule_id);

bool has_closed_form(const FlagSpec& spec);
std::vector<EinsteinSolution> closed_form_solutions(const FlagSpec& spec);

struct NumericOptions {
  int grid = 21;
  int confirm_grid = 13;
  int retry_grid = 41;
  double lo = 1e-2;
  double hi = 1e2;
  bool parallel = true;
};

// Residual of the gauge-fixed Einstein system at the given coefficients (relative units).
Eigen::VectorXd einstein_system(const ReducedRicci& rr, const Eigen::VectorXd& coeffs);

std::vector<EinsteinSolution> numeric_solutions(const FlagSpec& spec, const NumericOptions& opt = {});
// one multi-start sweep at a fixed grid density, no confirmation
std::vector<EinsteinSolution> numeric_sweep(const FlagSpec& spec, int grid, const NumericOptions& opt = {});

std::vector<EinsteinSolution> dedup_homothety(std::vector<EinsteinSolution> solutions, double tol = 1e-6);
double homothety_distance(const MetricSpace& space, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Ad(s) restricted to m, mapping f-coordinates of `from` to f-coordinates of `to`.
// Throws InvariantFailure if Ad(s) does not carry m(from) into m(to).
Eigen::MatrixXd adjoint_map(const TangentModel& from, const TangentModel& to, const Eigen::MatrixXd& s);
// Coefficients of R^T A R in `target`, or nothing if the pullback leaves the invariant space.
std::optional<Eigen::VectorXd> pullback(const MetricSpace& source, const Eigen::VectorXd& coeffs,
                                        const MetricSpace& target, const Eigen::MatrixXd& r);

struct Witness {
  std::string name;
  Eigen::MatrixXd s;  // ambient matrix; the map is kK -> s k s^T K
};

// Stored pullback maps of the flag (validated: Ad(s) preserves m).
std::vector<Witness> witness_maps(const FlagSpec& spec);

SolutionSet equivalence_screen(SolutionSet set);
GroupStatus pair_status(const SolutionSet& set, int i, int j);

enum class SolveMode { Numeric, ClosedForm, Both };
SolutionSet solve(const FlagSpec& spec, SolveMode mode);

// Scale-invariant total scalar curvature S * det(A)^(1/N) and its coefficient gradient.
double normalized_scalar(const ReducedRicci& rr, const Eigen::VectorXd& coeffs);
Eigen::VectorXd normalized_scalar_gradient(const ReducedRicci& rr, const Eigen::VectorXd& coeffs, double h = 1e-6);

// Companion-matrix cross-check for three-block A flags with inequivalent summands: the
// gauge-fixed (x1, x2, 1) Einstein points from the resultant quartic.
std::vector<Eigen::VectorXd> three_block_companion(const FlagSpec& spec);
bool is_three_block_a(const FlagSpec& spec);

struct Table1Instance {
  FlagSpec spec;
  std::string manifold;
  int summands = 0;
  bool equivalent = false;
  std::optional<int> count;        // exact count, when known
  int bound = -1;                  // upper bound for bound-only rows
  std::optional<bool> normal;      // normal metric Einstein, when the table decides it
};

std::vector<Table1Instance> table1_instances(int max_l);
// the fixed acceptance instance list
std::vector<Table1Instance> acceptance_instances();

struct Table1Row {
  std::string flag;
  std::string manifold;
  int summands = 0;
  bool equivalent = false;
  int count = 0;
  bool normal_is_einstein = false;
  std::string expected;  // "5", "<=4"
  bool match = false;
  double max_residual = 0;
};

Table1Row table1_row(const FlagSpec& spec);
Table1Row table1_row(const Table1Instance& inst);

}  // namespace flagein
