#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dpt {

enum class ErrorKind {
  InvalidArgument,
  NotPSD,
  SingularTransform,
  UnsupportedDomain,
  DomainMismatch,
  TraceUnavailable,
  NegativeEntry,
  NotConvex,
  NotPeriodic,
  IncompatiblePair,
  NegativeDensity,
  NegativePressure,
  NegativeDistribution,
  SuperluminalVelocity,
  NotSingularDirection,
  SupportTouchesBoundary,
  CompatibilityViolated,
  NotConvexIterate,
  MaxIterations,
  SingularAPlus,
  SingularLattice,
  CFLViolation,
  VacuumBreakdown,
  BoundaryFlux,
  NegativeRelaxation,
  BudgetExceeded,
  NotElliptic,
  SolverDiverged,
  ParseError,
  UnknownKey,
  UnknownOperation,
  MissingJobs,
  IOError,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace dpt
