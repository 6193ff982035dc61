#ifndef TRQUANT_ERRORS_HPP
#define TRQUANT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace trq {

enum class errc {
  not_admissible,
  zero_denominator,
  step_mismatch,
  zero_leading_coefficient,
  truncation_too_low,
  inconsistent_degrees,
  quadrature_non_convergent,
  singular_period_matrix,
  order_budget_exceeded,
  base_point_dependence,
  unknown_time,
  path_crosses_cycle,
  coincident_branch_points,
  insufficient_correlators,
  missing_derivative,
  insufficient_order,
  not_positive_definite,
  missing_epsilon_derivative,
  shape_fit_failure,
  constraint_violation,
  singular_interpolation,
  regularity_failure,
  zero_derivative_of_w,
  identity_failure,
  singularity_encountered,
  step_underflow,
  config_error,
  stage_failure,
  io_error,
  internal
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::not_admissible: return "NotAdmissible";
    case errc::zero_denominator: return "ZeroDenominator";
    case errc::step_mismatch: return "StepMismatch";
    case errc::zero_leading_coefficient: return "ZeroLeadingCoefficient";
    case errc::truncation_too_low: return "TruncationTooLow";
    case errc::inconsistent_degrees: return "InconsistentDegrees";
    case errc::quadrature_non_convergent: return "QuadratureNonConvergent";
    case errc::singular_period_matrix: return "SingularPeriodMatrix";
    case errc::order_budget_exceeded: return "OrderBudgetExceeded";
    case errc::base_point_dependence: return "BasePointDependence";
    case errc::unknown_time: return "UnknownTime";
    case errc::path_crosses_cycle: return "PathCrossesCycle";
    case errc::coincident_branch_points: return "CoincidentBranchPoints";
    case errc::insufficient_correlators: return "InsufficientCorrelators";
    case errc::missing_derivative: return "MissingDerivative";
    case errc::insufficient_order: return "InsufficientOrder";
    case errc::not_positive_definite: return "NotPositiveDefinite";
    case errc::missing_epsilon_derivative: return "MissingEpsilonDerivative";
    case errc::shape_fit_failure: return "ShapeFitFailure";
    case errc::constraint_violation: return "ConstraintViolation";
    case errc::singular_interpolation: return "SingularInterpolation";
    case errc::regularity_failure: return "RegularityFailure";
    case errc::zero_derivative_of_w: return "ZeroDerivativeOfW";
    case errc::identity_failure: return "IdentityFailure";
    case errc::singularity_encountered: return "SingularityEncountered";
    case errc::step_underflow: return "StepUnderflow";
    case errc::config_error: return "ConfigError";
    case errc::stage_failure: return "StageFailure";
    case errc::io_error: return "IoError";
    case errc::internal: return "Internal";
  }
  return "Unknown";
}

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what_arg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what_arg), code_(code) {}
  errc code() const { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) { throw error(code, msg); }

inline void check(bool ok, errc code, const std::string& msg) {
  if (!ok) fail(code, msg);
}

}  // namespace trq

#endif
