#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace infodemic {

// Error kinds surface by name on the command line, so keep the spellings stable.
enum class ErrorKind {
  InvalidArgument,
  UnreadableStream,
  TooManyMalformed,
  EmptyActivity,
  EmptyResult,
  DegenerateNetwork,
  DegenerateSeries,
  AllMissing,
  SeriesTooShort,
  MissingValues,
  DegenerateTarget,
  InvalidParams,
  Diverged,
  MissingArtifact,
};

std::string_view error_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& detail);

}  // namespace infodemic
