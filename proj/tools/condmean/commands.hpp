#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "condmean/output.hpp"

namespace condmean::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitAssertion = 3,
  kExitRuntime = 4,
};

struct Manifest {
  std::string command;
  std::filesystem::path config_path;
  std::filesystem::path out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
};

/// A failure inside the library during an experiment (exit code 4).
class RuntimeFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunOutput {
  Table table{{}};
  std::vector<Series> series;
  nlohmann::json summary = nlohmann::json::object();
  bool assertion_failed = false;
};

/// Runs `command` on a validated, normalized config.
RunOutput execute(const std::string& command, const nlohmann::json& config,
                  std::uint64_t seed, unsigned workers);

/// Validates, executes and writes outputs. Messages go to `log` / `err`.
int run(const Manifest& manifest, std::ostream& log, std::ostream& err);

/// Full command line entry point.
int run_main(int argc, char** argv);

}  // namespace condmean::cli
