#include "infodemic/error.hpp"

namespace infodemic {

std::string_view error_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnreadableStream: return "UnreadableStream";
    case ErrorKind::TooManyMalformed: return "TooManyMalformed";
    case ErrorKind::EmptyActivity: return "EmptyActivity";
    case ErrorKind::EmptyResult: return "EmptyResult";
    case ErrorKind::DegenerateNetwork: return "DegenerateNetwork";
    case ErrorKind::DegenerateSeries: return "DegenerateSeries";
    case ErrorKind::AllMissing: return "AllMissing";
    case ErrorKind::SeriesTooShort: return "SeriesTooShort";
    case ErrorKind::MissingValues: return "MissingValues";
    case ErrorKind::DegenerateTarget: return "DegenerateTarget";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::Diverged: return "Diverged";
    case ErrorKind::MissingArtifact: return "MissingArtifact";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(error_name(kind)) + "(" + detail + ")"),
      kind_(kind),
      detail_(detail) {}

void fail(ErrorKind kind, const std::string& detail) { throw Error(kind, detail); }

}  // namespace infodemic
