#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "options.h"

namespace scgan::cli {

struct Command {
  std::string name;
  std::unique_ptr<Options> options;
  std::function<void(const Json& cfg, const std::string& name)> run;
};

/// Registers every subcommand on `app`.
std::vector<Command> register_commands(CLI::App& app);

}  // namespace scgan::cli
