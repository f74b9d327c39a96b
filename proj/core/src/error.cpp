#include "robincone/error.hpp"

namespace robincone {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotOnSphere: return "NotOnSphere";
    case ErrorCode::NonSimpleCurve: return "NonSimpleCurve";
    case ErrorCode::UnderResolvedCurve: return "UnderResolvedCurve";
    case ErrorCode::InvalidCrossSection: return "InvalidCrossSection";
    case ErrorCode::DegenerateRadius: return "DegenerateRadius";
    case ErrorCode::IndeterminateSign: return "IndeterminateSign";
    case ErrorCode::UnsupportedGeometry: return "UnsupportedGeometry";
    case ErrorCode::InvalidDomain: return "InvalidDomain";
    case ErrorCode::MeshQualityFailure: return "MeshQualityFailure";
    case ErrorCode::NotAxisymmetric: return "NotAxisymmetric";
    case ErrorCode::SingularElement: return "SingularElement";
    case ErrorCode::AxisSingularity: return "AxisSingularity";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::FactorizationBreakdown: return "FactorizationBreakdown";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::RegimeError: return "RegimeError";
    case ErrorCode::CurvatureNotPositive: return "CurvatureNotPositive";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::RBudgetExceeded: return "RBudgetExceeded";
    case ErrorCode::OutOfChart: return "OutOfChart";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ExpressionSyntax: return "ExpressionSyntax";
    case ErrorCode::FitDegenerate: return "FitDegenerate";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::NotOnSphere:
    case ErrorCode::NonSimpleCurve:
    case ErrorCode::UnderResolvedCurve:
    case ErrorCode::InvalidCrossSection:
    case ErrorCode::UnsupportedGeometry:
    case ErrorCode::IndeterminateSign:
    case ErrorCode::NotAxisymmetric:
      return 2;
    case ErrorCode::DegenerateRadius:
    case ErrorCode::InvalidDomain:
    case ErrorCode::CurvatureNotPositive:
    case ErrorCode::RegimeError:
    case ErrorCode::InvalidConfig:
    case ErrorCode::ExpressionSyntax:
    case ErrorCode::ZeroVector:
    case ErrorCode::OutOfChart:
    case ErrorCode::AxisSingularity:
      return 3;
    case ErrorCode::RBudgetExceeded:
      return 4;
    case ErrorCode::MeshQualityFailure:
    case ErrorCode::SingularElement:
    case ErrorCode::FactorizationBreakdown:
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::QuadratureNonConvergence:
    case ErrorCode::FitDegenerate:
      return 5;
  }
  return 1;
}

}  // namespace robincone
