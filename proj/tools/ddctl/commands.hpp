#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"

namespace ddctl {

struct Output {
  std::string name;
  std::string content;
};

struct CommandResult {
  std::vector<Output> outputs;  // the first one is printed when no output directory is given
  std::vector<std::pair<std::string, std::uint64_t>> seeds;
  RunConfig effective;          // configuration recorded in the manifest
};

// Command-line values that take precedence over the config file or demo defaults.
struct Overrides {
  std::optional<NRange> N;
  std::optional<int> L;
  std::optional<double> tol;
  bool tol_auto = false;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> data;

  void apply(RunConfig& cfg) const;
};

struct Invocation {
  std::string command;
  std::string demo;  // demo name for the demo command
  RunConfig cfg;
  Overrides overrides;
};

const std::vector<std::string>& command_names();
const std::vector<std::string>& demo_names();

CommandResult run_command(const Invocation& inv);

// Canonical manifest text for a finished command.
std::string manifest(const Invocation& inv, const CommandResult& result, const std::vector<Output>& inputs);

}  // namespace ddctl
