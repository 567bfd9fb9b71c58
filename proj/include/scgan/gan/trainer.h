#pragma once

#include <cstddef>
#include <vector>

#include "scgan/data/dataset.h"
#include "scgan/gan/config.h"
#include "scgan/gan/model.h"
#include "scgan/parallel/kernels.h"

namespace scgan::gan {

/// One minibatch step. Both losses are batch data terms measured on the
/// step's batch before its update; thresholds are NaN under fixed alternation.
struct TraceRecord {
  long step = 0;  // strictly increasing
  long turn = 0;  // completed D/G turn pairs before this step (threshold index i)
  Network network = Network::discriminator;
  double generator_loss = 0.0;
  double discriminator_loss = 0.0;
  double generator_threshold = 0.0;
  double discriminator_threshold = 0.0;
};

struct TrainTrace {
  std::vector<TraceRecord> records;
  long turns = 0;
  bool converged = false;
};

struct TrainResult {
  ScganModel model;
  TrainTrace trace;
};

/// Alternating adversarial training. Each turn pair runs the discriminator
/// first, then the generator. Under dynamic alternation a turn ends once the
/// active network's batch loss falls below its threshold (or after
/// turn_step_cap steps); under fixed alternation it runs the configured epochs.
/// Throws DivergenceError (carrying the turn index) on a non-finite loss.
TrainResult train(const ScganConfig& cfg, const data::Dataset& train_set,
                  parallel::Exec exec = parallel::Exec::omp);

/// Standard deviation of L_G and L_D over the last `window` records (all of
/// them if fewer).
struct LossSpread {
  double generator = 0.0;
  double discriminator = 0.0;
  double combined() const { return generator + discriminator; }
};
LossSpread final_loss_spread(const TrainTrace& trace, std::size_t window = 200);

}  // namespace scgan::gan
