#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace devlore {

enum class ErrorCode {
  // core model
  MalformedManifest,
  DuplicateBugId,
  MissingWorkspace,
  InvalidArtifactConfig,
  PreconditionViolated,
  // trace host
  TracerFailed,
  EmptyTrace,
  TestRunFailedToStart,
  // prompt builder
  TokenBudgetExceeded,
  // llm client
  EndpointUnavailable,
  ContextOverflow,
  AuthFailure,
  ReplayFixtureMissing,
  // response parser
  NoLocationsFound,
  OrphanLineEntry,
  MalformedEditBlock,
  NoEditBlocks,
  AmbiguousClassPath,
  // patch engine
  SearchNotFound,
  AmbiguousMatch,
  FileOutsideWorkspace,
  RevertFailed,
  // validator
  TestHarnessFailure,
  Timeout,
  MissingGroundTruth,
  // persistence
  MalformedRecord,
  Io,
};

std::string_view error_code_name(ErrorCode code);

/// Every harness failure surfaces as this exception; `code()` is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace devlore
