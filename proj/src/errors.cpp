#include "dpt/errors.hpp"

namespace dpt {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotPSD: return "NotPSD";
    case ErrorKind::SingularTransform: return "SingularTransform";
    case ErrorKind::UnsupportedDomain: return "UnsupportedDomain";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::TraceUnavailable: return "TraceUnavailable";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::NotConvex: return "NotConvex";
    case ErrorKind::NotPeriodic: return "NotPeriodic";
    case ErrorKind::IncompatiblePair: return "IncompatiblePair";
    case ErrorKind::NegativeDensity: return "NegativeDensity";
    case ErrorKind::NegativePressure: return "NegativePressure";
    case ErrorKind::NegativeDistribution: return "NegativeDistribution";
    case ErrorKind::SuperluminalVelocity: return "SuperluminalVelocity";
    case ErrorKind::NotSingularDirection: return "NotSingularDirection";
    case ErrorKind::SupportTouchesBoundary: return "SupportTouchesBoundary";
    case ErrorKind::CompatibilityViolated: return "CompatibilityViolated";
    case ErrorKind::NotConvexIterate: return "NotConvexIterate";
    case ErrorKind::MaxIterations: return "MaxIterations";
    case ErrorKind::SingularAPlus: return "SingularAPlus";
    case ErrorKind::SingularLattice: return "SingularLattice";
    case ErrorKind::CFLViolation: return "CFLViolation";
    case ErrorKind::VacuumBreakdown: return "VacuumBreakdown";
    case ErrorKind::BoundaryFlux: return "BoundaryFlux";
    case ErrorKind::NegativeRelaxation: return "NegativeRelaxation";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::NotElliptic: return "NotElliptic";
    case ErrorKind::SolverDiverged: return "SolverDiverged";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::UnknownOperation: return "UnknownOperation";
    case ErrorKind::MissingJobs: return "MissingJobs";
    case ErrorKind::IOError: return "IOError";
  }
  return "Unknown";
}

}  // namespace dpt
