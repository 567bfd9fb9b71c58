#include "scgan/gan/config.h"

#include <algorithm>
#include <cmath>

#include "scgan/error.h"

namespace scgan::gan {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::scgan: return "scgan";
    case Mode::cgan: return "cgan";
    case Mode::sgan: return "sgan";
  }
  return "scgan";
}

const char* to_string(Prior p) { return p == Prior::uniform ? "uniform" : "gaussian"; }

const char* to_string(Network n) {
  return n == Network::generator ? "generator" : "discriminator";
}

Mode mode_from_string(const std::string& s) {
  if (s == "scgan") return Mode::scgan;
  if (s == "cgan") return Mode::cgan;
  if (s == "sgan") return Mode::sgan;
  throw ValidationError("unknown GAN mode '" + s + "'");
}

Prior prior_from_string(const std::string& s) {
  if (s == "gaussian") return Prior::gaussian;
  if (s == "uniform") return Prior::uniform;
  throw ValidationError("unknown prior '" + s + "'");
}

double threshold(const ThresholdParams& p, long iteration) {
  return std::max(std::pow(p.decay, static_cast<double>(iteration)) + p.offset, p.floor);
}

AlternationPolicy AlternationPolicy::fixed(std::size_t generator_epochs,
                                           std::size_t discriminator_epochs) {
  AlternationPolicy p;
  p.kind = Kind::fixed;
  p.generator_epochs = generator_epochs;
  p.discriminator_epochs = discriminator_epochs;
  return p;
}

AlternationPolicy AlternationPolicy::dynamic() { return AlternationPolicy{}; }

void AlternationPolicy::validate() const {
  if (kind == Kind::fixed) {
    if (generator_epochs < 1 || discriminator_epochs < 1) {
      throw ValidationError("fixed alternation needs at least one epoch per turn");
    }
    return;
  }
  for (const auto* p : {&generator, &discriminator}) {
    if (!(p->decay > 0.0 && p->decay < 1.0)) {
      throw ValidationError("dynamic alternation decay must lie in (0, 1)");
    }
  }
}

double threshold(const AlternationPolicy& policy, Network which, long iteration) {
  if (policy.kind != AlternationPolicy::Kind::dynamic) {
    throw ValidationError("fixed alternation has no loss threshold");
  }
  return threshold(which == Network::generator ? policy.generator : policy.discriminator,
                   iteration);
}

void ScganConfig::validate() const {
  if (num_classes < 2) throw ValidationError("scgan: need at least 2 classes");
  if (hidden_size == 0) throw ValidationError("scgan: hidden_size must be positive");
  if (hidden_layers == 0) throw ValidationError("scgan: hidden_layers must be positive");
  if (latent_dim == 0) throw ValidationError("scgan: latent_dim must be positive");
  if (!(generator_lr > 0.0) || !(discriminator_lr > 0.0)) {
    throw ValidationError("scgan: learning rates must be positive");
  }
  if (batch_size == 0) throw ValidationError("scgan: batch_size must be positive");
  if (l2 < 0.0) throw ValidationError("scgan: l2 must be non-negative");
  if (turn_step_cap == 0) throw ValidationError("scgan: turn_step_cap must be positive");
  if (data_kind == data::DataKind::sequence && sequence_length == 0) {
    throw ValidationError("scgan: sequence_length must be positive");
  }
  alternation.validate();
}

}  // namespace scgan::gan
