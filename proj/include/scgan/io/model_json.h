#pragma once

// JSON container for trained models: a kind tag, the configuration, and every
// parameter tensor as {name, rows, cols, values}. Doubles are written with
// round-trip precision so parameters reload bit-exactly.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scgan/gan/config.h"
#include "scgan/gan/model.h"
#include "scgan/nn/tensor.h"

namespace scgan::io {

using Json = nlohmann::json;

Json tensors_to_json(const nn::ParameterLayout& layout, std::span<const double> params);
/// Rebuilds a parameter buffer for `layout`; names and shapes must match.
std::vector<double> tensors_from_json(const Json& j, const nn::ParameterLayout& layout);

Json to_json(const gan::ScganConfig& cfg);
/// Keys absent from `j` keep their defaults; unknown keys are rejected.
gan::ScganConfig scgan_config_from_json(const Json& j);
gan::ScganConfig scgan_config_from_json(const Json& j, gan::ScganConfig base);

Json to_json(const gan::ScganModel& model);
gan::ScganModel scgan_model_from_json(const Json& j);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

void save_model(const std::filesystem::path& path, const gan::ScganModel& model);
gan::ScganModel load_model(const std::filesystem::path& path);

/// Throws ValidationError naming the first key of `j` not in `allowed`.
void reject_unknown_keys(const Json& j, std::initializer_list<const char*> allowed,
                         const std::string& where);

}  // namespace scgan::io
