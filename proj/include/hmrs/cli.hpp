#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "hmrs/config.hpp"
#include "hmrs/hybrid.hpp"

namespace hmrs {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,     // bad flags or configuration
  kExitData = 2,      // unreadable or invalid input files
  kExitInternal = 3,  // anything else
};

/// Runs the tool with argv-style arguments (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Directory holding one segment's trained models under an output directory.
std::filesystem::path model_dir(const std::filesystem::path& output_dir, Segment segment);

/// Writes som.json, mlp.json, clusters.json and one genre CSV per cluster.
void save_segment_model(const std::filesystem::path& dir, const SegmentModel& model,
                        const Config& config);

/// Reads back what save_segment_model wrote; cluster genre matrices are
/// rebuilt from `segment`. Throws DataError on missing or malformed files.
SegmentModel load_segment_model(const std::filesystem::path& dir, const RatingMatrix& segment,
                                const MovieCatalog& movies);

}  // namespace hmrs
