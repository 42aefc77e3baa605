#include "rcdenoise/error.hpp"

namespace rcdenoise {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::IntegrationBlowup: return "integration-blowup";
    case ErrorKind::DegenerateSignal: return "degenerate-signal";
    case ErrorKind::DegenerateTopology: return "degenerate-topology";
    case ErrorKind::Instability: return "instability";
    case ErrorKind::RankDeficiency: return "rank-deficiency";
    case ErrorKind::State: return "state";
    case ErrorKind::Singularity: return "singularity";
    case ErrorKind::NoFeasiblePoint: return "no-feasible-point";
    case ErrorKind::PruneFloor: return "prune-floor";
    case ErrorKind::Orchestration: return "orchestration";
    case ErrorKind::Io: return "io";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::SchemaVersion: return "schema-version";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

bool Error::is_numeric() const noexcept {
  switch (kind_) {
    case ErrorKind::IntegrationBlowup:
    case ErrorKind::DegenerateSignal:
    case ErrorKind::DegenerateTopology:
    case ErrorKind::Instability:
    case ErrorKind::RankDeficiency:
    case ErrorKind::Singularity:
    case ErrorKind::NoFeasiblePoint:
    case ErrorKind::PruneFloor:
      return true;
    default:
      return false;
  }
}

void fail(ErrorKind kind, const std::string& message) { throw Error(kind, message); }

}  // namespace rcdenoise
