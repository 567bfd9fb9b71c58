#include "options.h"

#include <cstdlib>
#include <sstream>

#include "scgan/error.h"

namespace scgan::cli {

namespace {

std::string flag_name(const std::string& key) {
  std::string s = "--" + key;
  for (char& c : s) {
    if (c == '_') c = '-';
  }
  return s;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::size_t parse_size(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (!s.empty() && s[0] == '-') throw std::invalid_argument(s);
    v = std::stoull(s, &pos);
  } catch (const std::exception&) {
    throw UsageError(flag_name(key) + ": expected a non-negative integer, got '" + s + "'");
  }
  if (pos != s.size()) {
    throw UsageError(flag_name(key) + ": expected a non-negative integer, got '" + s + "'");
  }
  return static_cast<std::size_t>(v);
}

double parse_real(const std::string& key, const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw UsageError(flag_name(key) + ": expected a number, got '" + s + "'");
  }
  if (pos != s.size()) throw UsageError(flag_name(key) + ": expected a number, got '" + s + "'");
  return v;
}

}  // namespace

Options::Options(CLI::App* app) : app_(app) {
  app_->add_option("--config", config_path_, "JSON config file; flags override its values");
}

Options& Options::add(const std::string& key, Kind kind, Json def, const std::string& help) {
  auto& e = entries_.emplace_back();
  e.key = key;
  e.kind = kind;
  e.def = std::move(def);
  e.flag = app_->add_option(flag_name(key), e.raw, help);
  switch (kind) {
    case Kind::size: e.flag->type_name("UINT"); break;
    case Kind::real: e.flag->type_name("FLOAT"); break;
    case Kind::boolean: e.flag->type_name("BOOL")->check(CLI::IsMember({"true", "false", "1", "0"})); break;
    case Kind::size_list:
    case Kind::real_list:
    case Kind::string_list: e.flag->type_name("LIST"); break;
    default: break;
  }
  return *this;
}

Options& Options::object(const std::string& key) {
  auto& e = entries_.emplace_back();
  e.key = key;
  e.kind = Kind::object;
  e.def = Json::object();
  return *this;
}

Json Options::parse_flag(const Entry& e) const {
  switch (e.kind) {
    case Kind::string: return e.raw;
    case Kind::size: return parse_size(e.key, e.raw);
    case Kind::real: return parse_real(e.key, e.raw);
    case Kind::boolean: return e.raw == "true" || e.raw == "1";
    case Kind::size_list: {
      Json a = Json::array();
      for (const auto& s : split_list(e.raw)) a.push_back(parse_size(e.key, s));
      return a;
    }
    case Kind::real_list: {
      Json a = Json::array();
      for (const auto& s : split_list(e.raw)) a.push_back(parse_real(e.key, s));
      return a;
    }
    case Kind::string_list: return split_list(e.raw);
    case Kind::object: break;
  }
  return nullptr;
}

void Options::check_type(const Entry& e, const Json& v) const {
  bool ok = true;
  switch (e.kind) {
    case Kind::string: ok = v.is_string(); break;
    case Kind::size: ok = v.is_number_unsigned(); break;
    case Kind::real: ok = v.is_number(); break;
    case Kind::boolean: ok = v.is_boolean(); break;
    case Kind::size_list:
      ok = v.is_array();
      for (const auto& x : v) ok = ok && x.is_number_unsigned();
      break;
    case Kind::real_list:
      ok = v.is_array();
      for (const auto& x : v) ok = ok && x.is_number();
      break;
    case Kind::string_list:
      ok = v.is_array();
      for (const auto& x : v) ok = ok && x.is_string();
      break;
    case Kind::object: ok = v.is_object(); break;
  }
  if (!ok && !v.is_null()) {
    throw ValidationError("config key '" + e.key + "' has the wrong type");
  }
}

Json Options::resolve() const {
  Json cfg = Json::object();
  for (const auto& e : entries_) cfg[e.key] = e.def;
  if (!config_path_.empty()) {
    const Json file = io::read_json(config_path_);
    if (!file.is_object()) throw ValidationError(config_path_ + ": config must be a JSON object");
    for (const auto& [k, v] : file.items()) {
      const Entry* match = nullptr;
      for (const auto& e : entries_) {
        if (e.key == k) match = &e;
      }
      if (!match) throw ValidationError(config_path_ + ": unknown key '" + k + "'");
      check_type(*match, v);
      cfg[k] = v;
    }
  }
  for (const auto& e : entries_) {
    if (e.flag && e.flag->count() > 0) cfg[e.key] = parse_flag(e);
  }
  return cfg;
}

void add_common(Options& opts) {
  using K = Options::Kind;
  opts.add("out", K::string, "", "output directory")
      .add("seed", K::size, 0, "seed governing all randomness")
      .add("jobs", K::size, 1, "concurrent runs or ensemble members");
}

std::filesystem::path output_dir(const Json& cfg, const std::string& command) {
  std::filesystem::path dir;
  const auto& out = cfg.at("out");
  if (out.is_string() && !out.get<std::string>().empty()) {
    dir = out.get<std::string>();
  } else if (const char* root = std::getenv("SCGAN_OUTPUT_ROOT"); root && *root) {
    dir = std::filesystem::path(root) / command;
  } else {
    dir = std::filesystem::path("scgan-out") / command;
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

void echo_config(const std::filesystem::path& dir, const Json& cfg) {
  io::write_json(dir / "config.json", cfg);
}

std::string require_string(const Json& cfg, const std::string& key) {
  const auto it = cfg.find(key);
  if (it == cfg.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw ValidationError("missing required field '" + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace scgan::cli
