#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace infodemic::cli {

inline constexpr const char* kToolVersion = "infodemic 1.0.0";

// Exit codes: 0 success, 1 usage error, 2 data error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Renders report.md plus one SVG per figure from a run directory. Throws
// MissingArtifact naming the first absent input.
void write_report(const std::filesystem::path& run_dir);

}  // namespace infodemic::cli
