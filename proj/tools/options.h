#pragma once

#include <deque>
#include <filesystem>
#include <stdexcept>
#include <string>

#include <CLI11.hpp>

#include "scgan/io/model_json.h"

namespace scgan::cli {

using io::Json;

/// Malformed command line (exit code 1).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Options of one subcommand. Every option has a key used both in the JSON
/// config file and, with '_' written as '-', as a long flag. Resolution order
/// is defaults, then the --config file, then flags.
class Options {
 public:
  enum class Kind { string, size, real, boolean, size_list, real_list, string_list, object };

  explicit Options(CLI::App* app);

  /// A null default marks the option as unset unless given.
  Options& add(const std::string& key, Kind kind, Json def, const std::string& help);
  /// Nested object accepted from the config file only.
  Options& object(const std::string& key);

  Json resolve() const;
  CLI::App* app() const { return app_; }

 private:
  struct Entry {
    std::string key;
    Kind kind;
    Json def;
    CLI::Option* flag = nullptr;
    std::string raw;
  };

  Json parse_flag(const Entry& e) const;
  void check_type(const Entry& e, const Json& v) const;

  CLI::App* app_;
  std::string config_path_;
  std::deque<Entry> entries_;
};

/// out, seed and jobs.
void add_common(Options& opts);

/// Resolved output directory: the "out" key, else $SCGAN_OUTPUT_ROOT/<command>,
/// else scgan-out/<command>. Created on return.
std::filesystem::path output_dir(const Json& cfg, const std::string& command);

/// Writes the resolved configuration as config.json in `dir`.
void echo_config(const std::filesystem::path& dir, const Json& cfg);

/// Value of a string key, or ValidationError naming the missing field.
std::string require_string(const Json& cfg, const std::string& key);

}  // namespace scgan::cli
