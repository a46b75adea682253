#pragma once

#include <memory>
#include <string>
#include <vector>

#include "flagein/algebra.hpp"

namespace flagein {

// Cached, shared algebra models.
std::shared_ptr<const AlgebraModel> algebra_for(Family family, int rank);

struct FlagSpec {
  std::shared_ptr<const AlgebraModel> algebra;
  std::vector<int> partition;
  bool includes_last_root = false;
  double inner_scale = 1.0;

  Family family() const { return algebra->family(); }
  int rank() const { return algebra->rank(); }
  // simple roots in Theta, 1-based and increasing
  std::vector<int> theta() const;
  // first and last (1-based) index of block i (0-based i)
  int block_begin(int i) const;
  int block_end(int i) const;
  int blocks() const { return static_cast<int>(partition.size()); }
  // canonical text form FAMILY:l:[l_1,...,l_r]:(+|-)
  std::string to_string() const;
};

FlagSpec make_flag(std::shared_ptr<const AlgebraModel> algebra, std::vector<int> partition, bool includes_last_root);
FlagSpec make_flag(Family family, int rank, std::vector<int> partition, bool includes_last_root);
FlagSpec parse_flag_spec(const std::string& text);
std::string theta_string(const FlagSpec& spec);

struct Reductive {
  std::vector<int> isotropy;  // algebra indices spanning k_Theta
  std::vector<int> tangent;   // algebra indices spanning m_Theta
};

Reductive split_reductive(const FlagSpec& spec);

struct Submodule {
  std::string name;
  // each vector holds coefficients over the tangent basis elements (algebra basis, not normalized)
  std::vector<Eigen::VectorXd> span;
  int dim() const { return static_cast<int>(span.size()); }
};

struct Decomposition {
  std::vector<int> isotropy;
  std::vector<int> tangent;
  std::vector<Submodule> submodules;
  std::vector<std::vector<int>> equiv_classes;

  int class_of(int submodule) const;
  bool has_equivalent_summands() const;
};

// Whether the (family, rank, Theta) triple is covered by the rule tables.
bool decomposition_implemented(const FlagSpec& spec);
Decomposition decompose_isotropy(const FlagSpec& spec);

// Sign matrices representing the components of K_Theta (ambient realization).
std::vector<Eigen::MatrixXd> component_generators(const FlagSpec& spec);

// Automorphisms of k outside K_Theta that fix the catalog's metric family in low-rank cases where
// K_Theta alone has a larger commutant (B_3 with Theta = {a1,a2}; D_4 with a 3 + 1 block split).
// Empty everywhere else.
std::vector<Eigen::MatrixXd> ansatz_generators(const FlagSpec& spec);

std::vector<FlagSpec> enumerate_small_flags(Family family, int rank);

}  // namespace flagein
