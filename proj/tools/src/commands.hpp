#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace kerrtwpa::cli {

using Json = nlohmann::ordered_json;

struct OutputFile {
  std::string name;
  std::string content;
};

/// Everything a subcommand produces, held in memory until it has finished.
struct CommandOutput {
  std::vector<OutputFile> files;
  std::vector<std::filesystem::path> inputs;
  std::vector<std::string> diagnostics;
  Json results = Json::object();
  Json seeds = Json::object();
};

const std::vector<std::string>& subcommands();

/// Runs one subcommand against a loaded configuration. Throws the library
/// error types; writes nothing.
CommandOutput run_command(const std::string& subcommand, const RunConfig& config);

/// Writes all files and then manifest.json into `dir`. Files are staged
/// under temporary names and renamed once every write succeeded.
void write_outputs(const std::string& subcommand, const RunConfig& config,
                   const CommandOutput& output, const std::filesystem::path& dir);

/// Lowercase hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

}  // namespace kerrtwpa::cli
