#pragma once

// Command implementations behind the `counterplan` executable. Each command
// writes diagnostics to `err`, summaries to `out`, and returns an exit code.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace counterplan::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitNotSuccessful = 3,
  kExitTransportFailure = 4,
};

struct RunManifest {
  std::optional<std::filesystem::path> domain;
  std::optional<std::filesystem::path> trajectory;
  std::optional<std::filesystem::path> deploy_state;
  std::optional<std::filesystem::path> goal;
  std::string proposer = "search";  // scripted | search | external
  std::optional<std::filesystem::path> fixture;
  std::size_t depth = 2;
  std::optional<std::string> endpoint;
  std::size_t budget = 10;
  std::uint64_t seed = 1;
  std::filesystem::path out = ".";
  int timeout_ms = 30000;

  // Throws InvalidValue naming the first problem.
  void validate() const;
};

struct ValidateInputs {
  std::optional<std::filesystem::path> domain;
  std::optional<std::filesystem::path> trajectory;
  std::optional<std::filesystem::path> deploy_state;
  std::optional<std::filesystem::path> goal;
  std::optional<std::filesystem::path> fixture;
  std::optional<std::filesystem::path> patch;
  std::vector<std::filesystem::path> files;  // kind guessed from the content
};

struct BenchConfig {
  std::string suite = "full";
  bool mini = false;
  std::string proposer = "search";  // search | external
  std::size_t depth = 3;
  std::optional<std::size_t> budget;
  std::optional<std::string> endpoint;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  double lambda = 0.0;
  std::optional<std::string> perturb;  // "drop:0.1" or "noise:0.1"
  std::optional<std::filesystem::path> export_dir;
  std::filesystem::path out = ".";
  int timeout_ms = 30000;
};

int cmd_validate(const ValidateInputs& inputs, std::ostream& out, std::ostream& err);
int cmd_build_model(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_adapt(const RunManifest& manifest, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchConfig& config, std::ostream& out, std::ostream& err);
// Reads task outcomes (JSON array) and prints the metric table.
int cmd_metrics(const std::filesystem::path& outcomes, double lambda, const std::optional<std::filesystem::path>& out_dir,
                std::ostream& out, std::ostream& err);

// Full command-line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace counterplan::cli
