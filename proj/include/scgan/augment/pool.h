#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "scgan/data/dataset.h"
#include "scgan/gan/trainer.h"

namespace scgan::augment {

/// Ensemble of independently trained scGANs that differ in hidden width.
struct EnsembleConfig {
  std::vector<std::size_t> hidden_sizes{40, 60, 80, 100};
  gan::ScganConfig member;  // hidden_size and seed are overridden per member
  /// Per-member seeds; when empty, member i uses member.seed + i.
  std::vector<std::uint64_t> seeds;

  void validate() const;
  gan::ScganConfig member_config(std::size_t i) const;
};

struct EnsembleMember {
  gan::ScganModel model;
  gan::TrainTrace trace;
  bool failed = false;
  std::string error;  // divergence message when failed
};

/// Trains one member per hidden size, at most `jobs` at a time. A diverging
/// member is flagged and the others are unaffected.
std::vector<EnsembleMember> train_ensemble(const EnsembleConfig& cfg,
                                           const data::Dataset& train_set, std::size_t jobs = 1);

enum class Verdict { unfiltered, kept, rejected };
const char* to_string(Verdict v);
Verdict verdict_from_string(const std::string& s);

struct PoolEntry {
  nn::Matrix payload;
  std::size_t cls = 0;
  std::size_t member = 0;
  Verdict verdict = Verdict::unfiltered;
};

struct SynthPool {
  data::DataKind kind = data::DataKind::static_vector;
  std::size_t num_classes = 0;
  std::vector<PoolEntry> entries;

  std::size_t size() const { return entries.size(); }
  /// Entries per class with the given verdict.
  std::vector<std::size_t> count(Verdict v) const;
};

/// members x K x per_member_per_class unfiltered entries, generated in
/// member, class, index order. Failed members are skipped.
SynthPool synthesize_pool(const std::vector<EnsembleMember>& members,
                          std::size_t per_member_per_class, std::mt19937_64& rng);

/// Marks an entry kept iff its own member's discriminator puts the argmax on
/// the conditioning class (cgan members: on "real"). Rejected entries stay
/// rejected, so the operation is idempotent.
SynthPool filter_by_discriminator(const SynthPool& pool,
                                  const std::vector<EnsembleMember>& members);

class PoolShortfallError : public std::runtime_error {
 public:
  PoolShortfallError(std::size_t cls, std::size_t available, std::size_t wanted);
  std::size_t cls() const { return cls_; }
  std::size_t shortfall() const { return shortfall_; }

 private:
  std::size_t cls_, shortfall_;
};

/// Exactly m non-rejected entries per class, drawn uniformly without
/// replacement; output is grouped by class.
std::vector<PoolEntry> select_balanced(const SynthPool& pool, std::size_t m,
                                       std::mt19937_64& rng);

/// Pool entries as training records tagged synthetic.
std::vector<data::FeatureRecord> to_records(const std::vector<PoolEntry>& entries);

/// Multiset union; records keep their provenance. Throws DimensionError on
/// a feature-width or data-kind mismatch.
data::Dataset merge(const data::Dataset& original, const std::vector<data::FeatureRecord>& extra);

}  // namespace scgan::augment
