#include <iostream>

#include "commands.h"
#include "scgan/error.h"

namespace {

enum Exit { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scgan: GAN-based data augmentation for snore sound classification"};
  app.require_subcommand(1);
  auto commands = scgan::cli::register_commands(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  for (auto& cmd : commands) {
    if (!cmd.options->app()->parsed()) continue;
    try {
      cmd.run(cmd.options->resolve(), cmd.name);
      return kOk;
    } catch (const scgan::cli::UsageError& e) {
      std::cerr << "error: " << e.what() << "\n\n" << cmd.options->app()->help();
      return kUsage;
    } catch (const scgan::ValidationError& e) {
      std::cerr << "invalid: " << e.what() << '\n';
      return kValidation;
    } catch (const scgan::DimensionError& e) {
      std::cerr << "invalid: " << e.what() << '\n';
      return kValidation;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "invalid config: " << e.what() << '\n';
      return kValidation;
    } catch (const std::exception& e) {
      std::cerr << "failed: " << e.what() << '\n';
      return kRuntime;
    }
  }
  return kUsage;
}
