#pragma once

#include <stdexcept>
#include <string>

namespace flagein {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedRank : Error { using Error::Error; };
struct ClosureViolation : Error { using Error::Error; };
struct BadPartition : Error { using Error::Error; };
struct BadFlag : Error { using Error::Error; };
struct UnimplementedCase : Error { using Error::Error; };
struct GeneratorMismatch : Error { using Error::Error; };
struct NotPositiveDefinite : Error {
  double smallest_eigenvalue;
  NotPositiveDefinite(const std::string& what, double ev) : Error(what), smallest_eigenvalue(ev) {}
};
struct NoCatalogEntry : Error { using Error::Error; };
struct TooManyParameters : Error { using Error::Error; };
struct ConvergenceGap : Error { using Error::Error; };
// raised when a computed object violates one of its documented invariants
struct InvariantFailure : Error { using Error::Error; };

}  // namespace flagein
