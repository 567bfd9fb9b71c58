#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "scgan/augment/baselines.h"
#include "scgan/experiments/metrics.h"
#include "scgan/experiments/pipeline.h"
#include "scgan/experiments/toy.h"
#include "scgan/gan/trainer.h"
#include "scgan/io/model_json.h"

namespace scgan::experiments {

enum class Augmentation { none, transform, smote, cgan, sgan, scgan_mono, scgan_ensemble };
const char* to_string(Augmentation a);
Augmentation augmentation_from_string(const std::string& s);
bool is_gan(Augmentation a);

struct RunConfig {
  FeatureSystem system = FeatureSystem::functionals_svm;
  Augmentation augmentation = Augmentation::none;
  std::size_t m_per_class = 250;
  std::size_t runs = 20;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  /// GAN template; num_classes, data_kind, sequence_length and seed are set
  /// per run.
  gan::ScganConfig gan = default_gan();
  std::vector<std::size_t> ensemble_sizes{40, 60, 80, 100};
  std::size_t pool_factor = 3;       // pool per class = pool_factor * m before filtering
  std::size_t max_pool_rounds = 10;  // extra synthesis rounds when filtering leaves too few
  bool filter = true;

  std::size_t smote_k = 5;
  augment::TransformGrid transform;
  double svm_c = 0.0;  // 0: 1e-4 for functionals, 1e-3 for BoAW
  BoawParams boaw;
  classifiers::GruClassifierConfig gru;

  static gan::ScganConfig default_gan();
  void validate() const;
  double effective_svm_c() const;
};

io::Json to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const io::Json& j, RunConfig base = {});

struct RunResult {
  double dev_uar = 0.0, test_uar = 0.0;
  Confusion dev_confusion, test_confusion;
  std::size_t synthetic_added = 0;
};

struct EvalReport {
  RunConfig config;
  std::vector<RunResult> runs;
  MeanSd dev, test;
  void summarize();
};

/// Full protocol over cfg.runs independent runs on a prepared system.
EvalReport run_experiment(const RunConfig& cfg, const CorpusFeatures& corpus,
                          const SystemData& sys);
EvalReport run_experiment(const RunConfig& cfg, const CorpusFeatures& corpus);

struct SweepPoint {
  std::size_t m = 0;
  MeanSd dev, test;
  std::size_t runs = 0;
};

/// One point per m (ascending). Within a run the augmentor is trained once
/// and shared by all m, so points differ only in how much is selected.
std::vector<SweepPoint> sweep_augmentation(const RunConfig& cfg, const CorpusFeatures& corpus,
                                           const std::vector<std::size_t>& m_values,
                                           std::vector<EvalReport>* reports = nullptr);

struct AlternationStats {
  gan::LossSpread final_window;   // sample SD over the final 200 records
  gan::LossSpread sliding_mean;   // mean SD over sliding 50-record windows
  std::size_t steps = 0;
  long turns = 0;
};

struct AlternationComparison {
  gan::TrainTrace first_trace, second_trace;
  AlternationStats first, second;
};

AlternationStats alternation_stats(const gan::TrainTrace& trace, std::size_t final_window = 200,
                                   std::size_t sliding_window = 50);

/// Trains `base` under each policy on the same data and seed.
AlternationComparison compare_alternation(const gan::ScganConfig& base,
                                          const gan::AlternationPolicy& first,
                                          const gan::AlternationPolicy& second,
                                          const data::Dataset& train_set);

}  // namespace scgan::experiments
