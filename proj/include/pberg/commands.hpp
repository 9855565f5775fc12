#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pberg/config.hpp"
#include "pberg/report.hpp"

namespace pberg {

struct CommandOutput {
  ReportTable table;
  /// Command-specific results; the emitted JSON adds command, config, hash and rows.
  nlohmann::json results = nlohmann::json::object();
  int exit_status = 0;
};

const std::vector<std::string>& command_names();

/// Runs one subcommand. `progress` receives human-readable lines (verify
/// reports one per criterion, with timings that stay out of the artifacts).
CommandOutput run_command(const RunConfig& config,
                          const std::function<void(const std::string&)>& progress = {});

/// The JSON summary document.
nlohmann::json summary_json(const CommandOutput& out, const RunConfig& config);

/// Writes <out_dir>/<command>.csv and/or .json; returns the paths written.
std::vector<std::filesystem::path> emit(const CommandOutput& out, const RunConfig& config);

}  // namespace pberg
