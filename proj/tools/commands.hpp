#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "rtflow/config.hpp"

namespace rtflow::cli {

struct Job {
  const RunConfig& cfg;
  std::filesystem::path out_dir;
  std::ostream& out;
};

/// Runs one subcommand; returns an exit code. Library exceptions propagate.
int run_command(std::string_view name, const Job& job);

}  // namespace rtflow::cli
