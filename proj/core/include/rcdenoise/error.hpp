#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rcdenoise {

enum class ErrorKind {
  InvalidArgument,
  IntegrationBlowup,
  DegenerateSignal,
  DegenerateTopology,
  Instability,
  RankDeficiency,
  State,
  Singularity,
  NoFeasiblePoint,
  PruneFloor,
  Orchestration,
  Io,
  Parse,
  SchemaVersion,
  Config,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` tells callers which
/// contract was violated.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

  /// True for failures caused by numerics rather than bad input or I/O.
  [[nodiscard]] bool is_numeric() const noexcept;

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorKind::InvalidArgument, message);
}

}  // namespace rcdenoise
