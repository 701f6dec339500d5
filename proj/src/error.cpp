#include "vwl/error.hpp"

namespace vwl {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::NoCriticalPoint: return "NoCriticalPoint";
    case ErrorCode::InvalidVorticity: return "InvalidVorticity";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::UnsupportedTestFn: return "UnsupportedTestFn";
    case ErrorCode::AllNodesExcluded: return "AllNodesExcluded";
    case ErrorCode::StagnationInterior: return "StagnationInterior";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::SeedFailure: return "SeedFailure";
    case ErrorCode::NewtonDivergence: return "NewtonDivergence";
    case ErrorCode::NonMonotoneSurface: return "NonMonotoneSurface";
    case ErrorCode::WindowOutsideDomain: return "WindowOutsideDomain";
    case ErrorCode::InsufficientResolution: return "InsufficientResolution";
    case ErrorCode::ConeNotContained: return "ConeNotContained";
    case ErrorCode::NonPositiveAbscissa: return "NonPositiveAbscissa";
    case ErrorCode::QuaViolated: return "QuaViolated";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::ValidationError: return "ValidationError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace vwl
