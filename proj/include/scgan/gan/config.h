#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "scgan/data/dataset.h"

namespace scgan::gan {

/// scgan: conditioned G, (K+1)-way D. sgan: G pushes mass onto any real
/// class. cgan: binary real/fake D that also sees the condition.
enum class Mode { scgan, cgan, sgan };
enum class Prior { gaussian, uniform };
enum class Network { generator, discriminator };

const char* to_string(Mode m);
const char* to_string(Prior p);
const char* to_string(Network n);
Mode mode_from_string(const std::string& s);
Prior prior_from_string(const std::string& s);

/// Loss threshold max(decay^i + offset, floor).
struct ThresholdParams {
  double decay = 0.95;
  double offset = 0.0;
  double floor = 0.7;
};

double threshold(const ThresholdParams& p, long iteration);

struct AlternationPolicy {
  enum class Kind { fixed, dynamic };
  Kind kind = Kind::dynamic;
  // fixed
  std::size_t generator_epochs = 1;
  std::size_t discriminator_epochs = 1;
  // dynamic
  ThresholdParams generator{0.95, 1.0, 1.0};
  ThresholdParams discriminator{0.95, 0.0, 0.7};

  static AlternationPolicy fixed(std::size_t generator_epochs, std::size_t discriminator_epochs);
  static AlternationPolicy dynamic();

  void validate() const;
};

/// Threshold for one network's turn. Throws ValidationError for a fixed policy.
double threshold(const AlternationPolicy& policy, Network which, long iteration);

struct ScganConfig {
  Mode mode = Mode::scgan;
  std::size_t num_classes = 4;
  std::size_t latent_dim = 32;
  Prior prior = Prior::gaussian;
  std::size_t hidden_size = 60;
  std::size_t hidden_layers = 2;
  double generator_lr = 0.001;
  double discriminator_lr = 0.01;
  std::size_t batch_size = 64;
  double l2 = 1e-4;
  AlternationPolicy alternation;
  std::size_t max_iterations = 200;  // completed G/D turn pairs
  std::size_t turn_step_cap = 50;
  std::size_t convergence_turns = 10;
  std::uint64_t seed = 0;
  data::DataKind data_kind = data::DataKind::static_vector;
  std::size_t sequence_length = 40;
  double init_stddev = 0.1;

  void validate() const;
};

}  // namespace scgan::gan
