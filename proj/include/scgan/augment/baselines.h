#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "scgan/audio/wav.h"
#include "scgan/data/dataset.h"

namespace scgan::augment {

// ---------------------------------------------------------------- SMOTE

struct SmoteResult {
  std::vector<data::FeatureRecord> records;
  /// Indices into the input set of each sample's two parents.
  std::vector<std::pair<std::size_t, std::size_t>> parents;
};

/// x + lambda * (neighbour - x).
std::vector<double> smote_interpolate(std::span<const double> x, std::span<const double> neighbour,
                                      double lambda);

/// Raises every class to `target_count` (default: the majority count) with
/// interpolations between a random member and one of its k nearest
/// same-class neighbours. Static vectors only.
SmoteResult smote(const data::Dataset& train_set, std::size_t k_neighbors,
                  std::optional<std::size_t> target_count, std::mt19937_64& rng);

// ---------------------------------------------------------- replication

/// Replicates each class (whole copies plus a uniformly chosen remainder)
/// up to the majority count. Added records are tagged replicated.
data::Dataset oversample_replicate(const data::Dataset& train_set, std::mt19937_64& rng);

// ------------------------------------------------------ noise transform

enum class NoiseType { white, pink };
const char* to_string(NoiseType t);

/// Unit-variance white or pink (1/f) noise.
audio::AudioClip make_noise(NoiseType type, std::size_t samples, std::uint32_t sample_rate,
                            std::mt19937_64& rng);

struct NoiseResult {
  audio::AudioClip clip;
  double noise_gain = 0.0;       // applied to the noise crop
  double headroom_scale = 1.0;   // < 1 when the sum had to be scaled to avoid clipping
  std::size_t crop_offset = 0;
};

double power(std::span<const double> x);
double snr_db(std::span<const double> signal, std::span<const double> noise);

/// Adds a random crop of `noise` (tiled if shorter than the signal) scaled to
/// the requested SNR. snr_db = +inf passes the signal through unchanged.
NoiseResult noise_transform(const audio::AudioClip& clip, const audio::AudioClip& noise,
                            double snr_db, std::mt19937_64& rng);

/// The transformation grid: each noise type at each SNR.
struct TransformGrid {
  std::vector<NoiseType> types{NoiseType::white, NoiseType::pink};
  std::vector<double> snrs_db{10.0, 13.75, 17.5, 21.25, 25.0};
  std::size_t copies() const { return types.size() * snrs_db.size(); }
};

}  // namespace scgan::augment
