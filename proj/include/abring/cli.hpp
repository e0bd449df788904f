#pragma once

#include "abring/records_io.hpp"

#include <string>

namespace abring {

inline constexpr const char* kVersion = "0.1.0";

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPointErrors = 1;
inline constexpr int kExitConfig = 2;

// Writes data, manifest and (optionally) plots for a finished sweep into
// config.output.out_dir. Returns the manifest that was written.
RunManifest write_outputs(const SweepConfig& config, const SweepOutcome& outcome, const std::string& timestamp);

std::string utc_timestamp();

int cli_main(int argc, char** argv);

}  // namespace abring
