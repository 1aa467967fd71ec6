#include "cvxnav/errors.hpp"

namespace cvxnav {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularParametrization: return "singular parametrization";
    case ErrorKind::DegenerateChart: return "degenerate chart point";
    case ErrorKind::NonConvex: return "non-convex curvature detected";
    case ErrorKind::FrameDegenerate: return "frame degenerate";
    case ErrorKind::InsideBody: return "inside body";
    case ErrorKind::ConvexityViolation: return "convexity/positivity violation";
    case ErrorKind::ChartSingularity: return "chart singularity";
    case ErrorKind::StepUnderflow: return "stiffness/singularity abort";
    case ErrorKind::TrackingDiverged: return "tracking diverged";
    case ErrorKind::NotInOmega: return "not in Omega";
    case ErrorKind::OracleFailure: return "oracle failure";
    case ErrorKind::Construction: return "construction error";
    case ErrorKind::InvalidArgument: return "invalid argument";
  }
  return "unknown error";
}

}  // namespace cvxnav
