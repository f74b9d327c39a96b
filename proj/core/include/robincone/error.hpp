#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace robincone {

enum class ErrorCode {
  // geometry
  NotOnSphere,
  NonSimpleCurve,
  UnderResolvedCurve,
  InvalidCrossSection,
  DegenerateRadius,
  IndeterminateSign,
  UnsupportedGeometry,
  // meshing
  InvalidDomain,
  MeshQualityFailure,
  NotAxisymmetric,
  // fem
  SingularElement,
  AxisSingularity,
  ZeroVector,
  // eigen
  FactorizationBreakdown,
  ConvergenceFailure,
  // certify
  RegimeError,
  CurvatureNotPositive,
  QuadratureNonConvergence,
  RBudgetExceeded,
  OutOfChart,
  // cli / config
  InvalidConfig,
  ExpressionSyntax,
  FitDegenerate,
};

std::string_view to_string(ErrorCode code);

/// Process exit code for the command-line contract:
/// 0 success, 2 geometry, 3 precondition, 4 budget, 5 solver.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace robincone
