#include "scgan/io/model_json.h"

#include <fstream>

#include "scgan/error.h"

namespace scgan::io {

void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ValidationError(where + ": expected a JSON object");
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) throw ValidationError(where + ": unknown key '" + key + "'");
  }
}

Json tensors_to_json(const nn::ParameterLayout& layout, std::span<const double> params) {
  require_dims(params.size() == layout.total(), "tensors_to_json: parameter count mismatch");
  Json arr = Json::array();
  for (const auto& s : layout.slots()) {
    const auto first = params.begin() + static_cast<std::ptrdiff_t>(s.offset);
    arr.push_back({{"name", s.name},
                   {"rows", s.rows},
                   {"cols", s.cols},
                   {"values", std::vector<double>(first, first + static_cast<std::ptrdiff_t>(
                                                                     s.rows * s.cols))}});
  }
  return arr;
}

std::vector<double> tensors_from_json(const Json& j, const nn::ParameterLayout& layout) {
  if (!j.is_array() || j.size() != layout.slots().size()) {
    throw ValidationError("model file: expected " + std::to_string(layout.slots().size()) +
                          " tensors");
  }
  std::vector<double> out(layout.total());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& s = layout.slots()[i];
    const auto& t = j[i];
    if (t.at("name").get<std::string>() != s.name || t.at("rows").get<std::size_t>() != s.rows ||
        t.at("cols").get<std::size_t>() != s.cols) {
      throw ValidationError("model file: tensor " + std::to_string(i) + " does not match '" +
                            s.name + "'");
    }
    const auto vals = t.at("values").get<std::vector<double>>();
    require_dims(vals.size() == s.rows * s.cols, "model file: tensor '" + s.name + "' size");
    std::copy(vals.begin(), vals.end(), out.begin() + static_cast<std::ptrdiff_t>(s.offset));
  }
  return out;
}

namespace {

Json threshold_json(const gan::ThresholdParams& p) {
  return {{"decay", p.decay}, {"offset", p.offset}, {"floor", p.floor}};
}

gan::ThresholdParams threshold_from(const Json& j, gan::ThresholdParams p, const std::string& at) {
  reject_unknown_keys(j, {"decay", "offset", "floor"}, at);
  if (j.contains("decay")) p.decay = j["decay"].get<double>();
  if (j.contains("offset")) p.offset = j["offset"].get<double>();
  if (j.contains("floor")) p.floor = j["floor"].get<double>();
  return p;
}

template <class T>
void take(const Json& j, const char* key, T& out) {
  if (j.contains(key)) out = j[key].get<T>();
}

}  // namespace

Json to_json(const gan::ScganConfig& c) {
  const auto& a = c.alternation;
  return {
      {"mode", gan::to_string(c.mode)},
      {"num_classes", c.num_classes},
      {"latent_dim", c.latent_dim},
      {"prior", gan::to_string(c.prior)},
      {"hidden_size", c.hidden_size},
      {"hidden_layers", c.hidden_layers},
      {"generator_lr", c.generator_lr},
      {"discriminator_lr", c.discriminator_lr},
      {"batch_size", c.batch_size},
      {"l2", c.l2},
      {"alternation",
       {{"kind", a.kind == gan::AlternationPolicy::Kind::fixed ? "fixed" : "dynamic"},
        {"generator_epochs", a.generator_epochs},
        {"discriminator_epochs", a.discriminator_epochs},
        {"generator", threshold_json(a.generator)},
        {"discriminator", threshold_json(a.discriminator)}}},
      {"max_iterations", c.max_iterations},
      {"turn_step_cap", c.turn_step_cap},
      {"convergence_turns", c.convergence_turns},
      {"seed", c.seed},
      {"data_kind", data::to_string(c.data_kind)},
      {"sequence_length", c.sequence_length},
      {"init_stddev", c.init_stddev},
  };
}

gan::ScganConfig scgan_config_from_json(const Json& j) {
  return scgan_config_from_json(j, gan::ScganConfig{});
}

gan::ScganConfig scgan_config_from_json(const Json& j, gan::ScganConfig c) {
  reject_unknown_keys(j,
                      {"mode", "num_classes", "latent_dim", "prior", "hidden_size",
                       "hidden_layers", "generator_lr", "discriminator_lr", "batch_size", "l2",
                       "alternation", "max_iterations", "turn_step_cap", "convergence_turns",
                       "seed", "data_kind", "sequence_length", "init_stddev"},
                      "gan");
  try {
    if (j.contains("mode")) c.mode = gan::mode_from_string(j["mode"].get<std::string>());
    if (j.contains("prior")) c.prior = gan::prior_from_string(j["prior"].get<std::string>());
    if (j.contains("data_kind")) {
      c.data_kind = data::data_kind_from_string(j["data_kind"].get<std::string>());
    }
    take(j, "num_classes", c.num_classes);
    take(j, "latent_dim", c.latent_dim);
    take(j, "hidden_size", c.hidden_size);
    take(j, "hidden_layers", c.hidden_layers);
    take(j, "generator_lr", c.generator_lr);
    take(j, "discriminator_lr", c.discriminator_lr);
    take(j, "batch_size", c.batch_size);
    take(j, "l2", c.l2);
    take(j, "max_iterations", c.max_iterations);
    take(j, "turn_step_cap", c.turn_step_cap);
    take(j, "convergence_turns", c.convergence_turns);
    take(j, "seed", c.seed);
    take(j, "sequence_length", c.sequence_length);
    take(j, "init_stddev", c.init_stddev);
    if (j.contains("alternation")) {
      const auto& a = j["alternation"];
      reject_unknown_keys(a,
                          {"kind", "generator_epochs", "discriminator_epochs", "generator",
                           "discriminator"},
                          "gan.alternation");
      auto& p = c.alternation;
      if (a.contains("kind")) {
        const auto k = a["kind"].get<std::string>();
        if (k == "fixed") p.kind = gan::AlternationPolicy::Kind::fixed;
        else if (k == "dynamic") p.kind = gan::AlternationPolicy::Kind::dynamic;
        else throw ValidationError("gan.alternation.kind must be 'fixed' or 'dynamic'");
      }
      take(a, "generator_epochs", p.generator_epochs);
      take(a, "discriminator_epochs", p.discriminator_epochs);
      if (a.contains("generator")) {
        p.generator = threshold_from(a["generator"], p.generator, "gan.alternation.generator");
      }
      if (a.contains("discriminator")) {
        p.discriminator =
            threshold_from(a["discriminator"], p.discriminator, "gan.alternation.discriminator");
      }
    }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("gan config: ") + e.what());
  }
  c.validate();
  return c;
}

Json to_json(const gan::ScganModel& m) {
  return {{"format", "scgan-model"},
          {"version", 1},
          {"config", to_json(m.config())},
          {"feature_dim", m.feature_dim()},
          {"seed", m.config().seed},
          {"generator", tensors_to_json(m.generator().layout(), m.generator_params())},
          {"discriminator",
           tensors_to_json(m.discriminator().layout(), m.discriminator_params())}};
}

gan::ScganModel scgan_model_from_json(const Json& j) {
  try {
    if (j.at("format").get<std::string>() != "scgan-model") {
      throw ValidationError("not an scGAN model file");
    }
    const auto cfg = scgan_config_from_json(j.at("config"));
    const auto d = j.at("feature_dim").get<std::size_t>();
    const gan::Generator g(cfg, d);
    const gan::Discriminator disc(cfg, d);
    return gan::ScganModel::from_parameters(cfg, d,
                                            tensors_from_json(j.at("generator"), g.layout()),
                                            tensors_from_json(j.at("discriminator"), disc.layout()));
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("model file: ") + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void save_model(const std::filesystem::path& path, const gan::ScganModel& model) {
  write_json(path, to_json(model));
}

gan::ScganModel load_model(const std::filesystem::path& path) {
  return scgan_model_from_json(read_json(path));
}

}  // namespace scgan::io
